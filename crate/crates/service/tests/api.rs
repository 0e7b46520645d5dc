use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use tracegraph_core::kb::{self, ChangeEvent, KnowledgeBase};
use tracegraph_core::{parse_file, populate, tokenize};
use tracegraph_service::{router, AppState, REVISION_HEADER};

const SOURCE: &str = "namespace GeomKernel.CmdsCleanUp {
    class C {
        private GLControl glControl;
        private int m_drag_curve;
        void SplitVertex(object sender, EventArgs e) { Init(); m_drag_curve = 0; glControl.Invalidate(); }
        void Init() { m_drag_curve = 1; }
    }
    class D { }
}";

fn fixture_kb() -> KnowledgeBase {
    let model = parse_file(&tokenize(SOURCE, "c.cs").unwrap()).unwrap().model;
    let mut kb = KnowledgeBase::new();
    populate(&model, &mut kb).unwrap();
    kb
}

fn state() -> (Arc<AppState>, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.tracekb.json");
    (AppState::new(fixture_kb(), path), dir)
}

async fn call(state: &Arc<AppState>, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, u64, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let rev = resp.headers().get(REVISION_HEADER).unwrap_or_else(|| panic!("{uri}: {} without revision", resp.status())).to_str().unwrap().parse().unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, rev, value)
}

fn enc(id: &str) -> String {
    id.replace('%', "%25").replace('#', "%23").replace(' ', "%20").replace('>', "%3E").replace('<', "%3C")
}

#[tokio::test]
async fn registries() {
    let (s, _d) = state();
    let (st, _, types) = call(&s, Method::GET, "/api/v1/types", None).await;
    assert_eq!(st, StatusCode::OK);
    let names: Vec<_> = types.as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["Namespace", "Class", "Constructor", "Method", "Property", "Variable", "Delegate", "Event"]);
    assert_eq!(types[3]["colorKey"], "red");
    let (_, _, links) = call(&s, Method::GET, "/api/v1/link-types", None).await;
    assert_eq!(links.as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn fresh_kb_has_eight_types() {
    let s = AppState::new(KnowledgeBase::new(), "unused.json");
    let (_, rev, types) = call(&s, Method::GET, "/api/v1/types", None).await;
    assert_eq!(types.as_array().unwrap().len(), 8);
    assert_eq!(rev, 0);
}

#[tokio::test]
async fn objects_roots_and_children() {
    let (s, _d) = state();
    let (st, _, all) = call(&s, Method::GET, "/api/v1/objects?type=Variable", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(all.as_array().unwrap().len(), 4);
    let (_, _, roots) = call(&s, Method::GET, "/api/v1/objects?type=Method&roots=true", None).await;
    let names: Vec<_> = roots.as_array().unwrap().iter().map(|o| o["displayName"].as_str().unwrap()).collect();
    assert_eq!(names, ["Init", "SplitVertex"]);

    let (_, _, kids) = call(&s, Method::GET, "/api/v1/objects/Namespace:GeomKernel.CmdsCleanUp/children", None).await;
    let kids: Vec<_> = kids
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["linkTypeName"].as_str().unwrap().to_string(), c["object"]["displayName"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(kids, [("Contains".to_string(), "C".to_string()), ("Contains".to_string(), "D".to_string())]);

    let (_, _, sv) = call(&s, Method::GET, "/api/v1/objects/Method:GeomKernel.CmdsCleanUp.C.SplitVertex/children", None).await;
    let sv: Vec<_> = sv
        .as_array()
        .unwrap()
        .iter()
        .map(|c| format!("{} {}", c["linkTypeName"].as_str().unwrap(), c["object"]["displayName"].as_str().unwrap()))
        .collect();
    assert_eq!(sv, ["Calls Init", "Uses glControl", "Uses m_drag_curve"]);

    let (_, _, only_calls) = call(
        &s,
        Method::GET,
        "/api/v1/objects/Method:GeomKernel.CmdsCleanUp.C.SplitVertex/children?links=Calls",
        None,
    )
    .await;
    assert_eq!(only_calls.as_array().unwrap().len(), 1);

    assert_eq!(call(&s, Method::GET, "/api/v1/objects", None).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&s, Method::GET, "/api/v1/objects?type=Nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&s, Method::GET, "/api/v1/objects?type=Class&roots=maybe", None).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&s, Method::GET, "/api/v1/objects/Nope/children", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&s, Method::GET, &enc("/api/v1/objects/Class:GeomKernel.CmdsCleanUp.D"), None).await.0, StatusCode::OK);
}

#[tokio::test]
async fn query_endpoint() {
    let (s, _d) = state();
    let kb = s.snapshot();
    let body = json!({
        "displayedTypeIds": ["Class", "Method", "Variable"],
        "checked": {},
        "enabledLinkTypeIds": ["Contains", "Uses", "Calls"]
    });
    let (st, rev, r) = call(&s, Method::POST, "/api/v1/query", Some(&body.to_string())).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(r["revision"], rev);
    for t in ["Class", "Method", "Variable"] {
        assert_eq!(r["visible"][t].as_array().unwrap().len(), kb.objects_of_type(t).count());
    }

    let body = json!({
        "displayedTypeIds": ["Method", "Variable"],
        "checked": {"Method": ["Method:GeomKernel.CmdsCleanUp.C.Init"]},
        "enabledLinkTypeIds": ["Uses"]
    });
    let (_, _, r) = call(&s, Method::POST, "/api/v1/query", Some(&body.to_string())).await;
    assert_eq!(r["visible"]["Variable"], json!(["Variable:GeomKernel.CmdsCleanUp.C.m_drag_curve"]));

    assert_eq!(call(&s, Method::POST, "/api/v1/query", Some("{not json")).await.0, StatusCode::BAD_REQUEST);
    let stale = json!({"displayedTypeIds": ["Class"], "checked": {"Class": ["Class:Gone"]}, "enabledLinkTypeIds": []});
    assert_eq!(call(&s, Method::POST, "/api/v1/query", Some(&stale.to_string())).await.0, StatusCode::NOT_FOUND);
    let bad = json!({"displayedTypeIds": ["Class"], "checked": {"Method": []}, "enabledLinkTypeIds": []});
    assert_eq!(call(&s, Method::POST, "/api/v1/query", Some(&bad.to_string())).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn link_editing_and_events() {
    let (s, _d) = state();
    let start = s.revision();
    let body = json!({
        "linkTypeId": "UserDefined",
        "parentId": "Variable:GeomKernel.CmdsCleanUp.C.glControl",
        "childId": "Method:GeomKernel.CmdsCleanUp.C.Init"
    })
    .to_string();
    let (st1, _, l1) = call(&s, Method::POST, "/api/v1/links", Some(&body)).await;
    let (st2, _, l2) = call(&s, Method::POST, "/api/v1/links", Some(&body)).await;
    assert_eq!((st1, st2), (StatusCode::CREATED, StatusCode::OK));
    assert_eq!(l1["id"], l2["id"]);

    let (_, rev, ev) = call(&s, Method::GET, &format!("/api/v1/events?since={start}&wait=0"), None).await;
    let events: Vec<ChangeEvent> = serde_json::from_value(ev["events"].clone()).unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].kind(), kb::ChangeKind::LinkAdded);
    assert_eq!(rev, start + 1);

    let self_contain = json!({"linkTypeId": "Contains", "parentId": "Class:GeomKernel.CmdsCleanUp.D", "childId": "Class:GeomKernel.CmdsCleanUp.D"});
    assert_eq!(call(&s, Method::POST, "/api/v1/links", Some(&self_contain.to_string())).await.0, StatusCode::CONFLICT);
    let unknown = json!({"linkTypeId": "Uses", "parentId": "Class:X", "childId": "Class:GeomKernel.CmdsCleanUp.D"});
    assert_eq!(call(&s, Method::POST, "/api/v1/links", Some(&unknown.to_string())).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&s, Method::POST, "/api/v1/links", Some("{\"linkTypeId\":1}")).await.0, StatusCode::BAD_REQUEST);

    let id = l1["id"].as_str().unwrap();
    let (st, _, removed) = call(&s, Method::DELETE, &format!("/api/v1/links/{}", enc(id)), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(removed["id"], l1["id"]);
    assert_eq!(call(&s, Method::DELETE, &format!("/api/v1/links/{}", enc(id)), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn annotations() {
    let (s, _d) = state();
    let uri = "/api/v1/objects/Method:GeomKernel.CmdsCleanUp.C.Init/annotations";
    let (st, _, o) = call(&s, Method::POST, uri, Some(r#"{"kind":"Note","text":"thread-unsafe"}"#)).await;
    assert_eq!(st, StatusCode::CREATED);
    assert_eq!(o["annotations"][0]["text"], "thread-unsafe");
    let (st, _, o) = call(&s, Method::POST, uri, Some(r#"{"kind":"DocumentLink","uri":"https://example.org/a.pdf"}"#)).await;
    assert_eq!(st, StatusCode::CREATED);
    assert_eq!(o["annotations"].as_array().unwrap().len(), 2);
    let (st, _, e) = call(&s, Method::POST, uri, Some(r#"{"kind":"DocumentLink","uri":"notauri^^"}"#)).await;
    assert_eq!((st, e["error"].as_str()), (StatusCode::BAD_REQUEST, Some("InvalidUri")));
    assert_eq!(call(&s, Method::POST, uri, Some(r#"{"kind":"Sticker"}"#)).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(
        call(&s, Method::POST, "/api/v1/objects/Nope/annotations", Some(r#"{"kind":"Note","text":"x"}"#)).await.0,
        StatusCode::NOT_FOUND
    );
}

#[tokio::test]
async fn replaying_events_reconstructs_visible_state() {
    let (s, _d) = state();
    let link = json!({"linkTypeId": "UserDefined", "parentId": "Class:GeomKernel.CmdsCleanUp.D", "childId": "Method:GeomKernel.CmdsCleanUp.C.Init"});
    call(&s, Method::POST, "/api/v1/links", Some(&link.to_string())).await;
    call(
        &s,
        Method::POST,
        "/api/v1/objects/Class:GeomKernel.CmdsCleanUp.D/annotations",
        Some(r#"{"kind":"Note","text":"n"}"#),
    )
    .await;
    let (_, _, ev) = call(&s, Method::GET, "/api/v1/events?since=0&wait=0", None).await;
    let events: Vec<ChangeEvent> = serde_json::from_value(ev["events"].clone()).unwrap();
    let rebuilt = KnowledgeBase::replay(&events).unwrap();
    assert_eq!(rebuilt, s.snapshot());
    for t in ["Namespace", "Class", "Method", "Variable"] {
        let (_, _, objs) = call(&s, Method::GET, &format!("/api/v1/objects?type={t}"), None).await;
        let from_api: Vec<kb::KnowledgeObject> = serde_json::from_value(objs).unwrap();
        let replayed: Vec<_> = rebuilt.objects_of_type(t).cloned().collect();
        assert_eq!(from_api, replayed);
    }
}

#[tokio::test]
async fn long_poll_wakes_on_mutation() {
    let (s, _d) = state();
    let since = s.revision();
    let poll = tokio::spawn({
        let s = s.clone();
        async move { call(&s, Method::GET, &format!("/api/v1/events?since={since}&wait=10"), None).await }
    });
    tokio::time::sleep(Duration::from_millis(100)).await;
    let body = json!({"linkTypeId": "Calls", "parentId": "Method:GeomKernel.CmdsCleanUp.C.Init", "childId": "Method:GeomKernel.CmdsCleanUp.C.Init"});
    let started = std::time::Instant::now();
    call(&s, Method::POST, "/api/v1/links", Some(&body.to_string())).await;
    let (_, _, ev) = poll.await.unwrap();
    assert!(started.elapsed() < Duration::from_secs(5));
    assert_eq!(ev["events"].as_array().unwrap().len(), 1);

    let (_, _, empty) = call(&s, Method::GET, &format!("/api/v1/events?since={}&wait=0.05", since + 1), None).await;
    assert!(empty["events"].as_array().unwrap().is_empty());
    assert_eq!(call(&s, Method::GET, "/api/v1/events?since=abc", None).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn save_persists_to_kb_file() {
    let (s, dir) = state();
    let (st, rev, body) = call(&s, Method::POST, "/api/v1/save", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(body["revision"], rev);
    let bytes = std::fs::read(dir.path().join("p.tracekb.json")).unwrap();
    assert_eq!(kb::load(&bytes).unwrap(), s.snapshot());
    let reopened = AppState::open(&dir.path().join("p.tracekb.json")).unwrap();
    assert_eq!(reopened.snapshot(), s.snapshot());
}
