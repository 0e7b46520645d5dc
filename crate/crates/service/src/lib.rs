//! HTTP/JSON facade over one knowledge base.
//!
//! Every response carries the knowledge-base revision it was computed at in
//! the `x-tracegraph-revision` header. Mutations are serialized through a
//! single write lock; change notification uses a watch channel so long-poll
//! readers never block writers.

use std::collections::{BTreeSet, HashMap};
use std::future::Future;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::watch;

use tracegraph_core::kb::{self, Annotation, KbError, KnowledgeBase};
use tracegraph_core::query::{compute_visibility, tree_children, tree_roots, QueryError, SelectionQuery};

pub const REVISION_HEADER: &str = "x-tracegraph-revision";

/// Longest time a `/events` request waits for a new event.
pub const MAX_WAIT: Duration = Duration::from_secs(60);
const DEFAULT_WAIT: Duration = Duration::from_secs(25);

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot load {path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: KbError,
    },
}

pub struct AppState {
    kb: RwLock<KnowledgeBase>,
    kb_file: PathBuf,
    revision: watch::Sender<u64>,
}

impl AppState {
    pub fn new(kb: KnowledgeBase, kb_file: impl Into<PathBuf>) -> Arc<Self> {
        let (revision, _) = watch::channel(kb.revision());
        Arc::new(Self {
            kb: RwLock::new(kb),
            kb_file: kb_file.into(),
            revision,
        })
    }

    /// Load the knowledge base persisted at `path`.
    pub fn open(path: &Path) -> Result<Arc<Self>, ServiceError> {
        let bytes = std::fs::read(path).map_err(|source| ServiceError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let kb = kb::load(&bytes).map_err(|source| ServiceError::Load {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::new(kb, path))
    }

    fn read(&self) -> RwLockReadGuard<'_, KnowledgeBase> {
        self.kb.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Run a mutation under the write lock and wake event waiters.
    fn write<T>(&self, f: impl FnOnce(&mut KnowledgeBase) -> T) -> (T, u64) {
        let (out, rev) = {
            let mut guard: RwLockWriteGuard<'_, KnowledgeBase> = self.kb.write().unwrap_or_else(|e| e.into_inner());
            let out = f(&mut guard);
            (out, guard.revision())
        };
        self.revision.send_if_modified(|r| {
            let changed = *r != rev;
            *r = rev;
            changed
        });
        (out, rev)
    }

    pub fn revision(&self) -> u64 {
        self.read().revision()
    }

    /// Snapshot of the current knowledge base.
    pub fn snapshot(&self) -> KnowledgeBase {
        self.read().clone()
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    revision: u64,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>, revision: u64) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            revision,
        }
    }

    fn bad_request(message: impl Into<String>, revision: u64) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message, revision)
    }

    fn from_kb(e: KbError, revision: u64) -> Self {
        let (status, code) = match &e {
            KbError::UnknownId(_) => (StatusCode::NOT_FOUND, "UnknownId"),
            KbError::UnknownType(_) => (StatusCode::NOT_FOUND, "UnknownType"),
            KbError::SelfContainment(_) => (StatusCode::CONFLICT, "SelfContainment"),
            KbError::DuplicateName(_) => (StatusCode::CONFLICT, "DuplicateName"),
            KbError::InvalidUri { .. } => (StatusCode::BAD_REQUEST, "InvalidUri"),
            KbError::RevisionTooOld { .. } => (StatusCode::GONE, "RevisionTooOld"),
            KbError::RevisionGap { .. } | KbError::InconsistentEvent(_) => (StatusCode::CONFLICT, "Conflict"),
            KbError::FormatError(_) | KbError::VersionMismatch { .. } => (StatusCode::BAD_REQUEST, "FormatError"),
        };
        Self::new(status, code, e.to_string(), revision)
    }

    fn from_query(e: QueryError, revision: u64) -> Self {
        let (status, code) = match &e {
            QueryError::UnknownId(_) => (StatusCode::NOT_FOUND, "UnknownId"),
            QueryError::UnknownType(_) => (StatusCode::NOT_FOUND, "UnknownType"),
            QueryError::InvalidQuery(_) => (StatusCode::BAD_REQUEST, "InvalidQuery"),
        };
        Self::new(status, code, e.to_string(), revision)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code,
            message: self.message,
        };
        with_revision((self.status, Json(body)).into_response(), self.revision)
    }
}

fn with_revision(mut r: Response, revision: u64) -> Response {
    r.headers_mut().insert(REVISION_HEADER, HeaderValue::from(revision));
    r
}

fn reply<T: Serialize>(status: StatusCode, revision: u64, body: T) -> Response {
    with_revision((status, Json(body)).into_response(), revision)
}

fn parse_body<T: for<'de> Deserialize<'de>>(bytes: &Bytes, revision: u64) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("malformed body: {e}"), revision))
}

type Shared = State<Arc<AppState>>;
type ApiResult = Result<Response, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/types", get(types))
        .route("/api/v1/link-types", get(link_types))
        .route("/api/v1/objects", get(objects))
        .route("/api/v1/objects/{id}", get(object))
        .route("/api/v1/objects/{id}/children", get(children))
        .route("/api/v1/objects/{id}/annotations", post(annotate))
        .route("/api/v1/query", post(query))
        .route("/api/v1/links", post(add_link))
        .route("/api/v1/links/{id}", delete(remove_link))
        .route("/api/v1/events", get(events))
        .route("/api/v1/save", post(save))
        .with_state(state)
}

async fn types(State(s): Shared) -> Response {
    let kb = s.read();
    reply(StatusCode::OK, kb.revision(), kb.knowledge_types())
}

async fn link_types(State(s): Shared) -> Response {
    let kb = s.read();
    reply(StatusCode::OK, kb.revision(), kb.link_types())
}

async fn objects(State(s): Shared, Query(params): Query<HashMap<String, String>>) -> ApiResult {
    let kb = s.read();
    let rev = kb.revision();
    let type_id = params
        .get("type")
        .ok_or_else(|| ApiError::bad_request("missing `type` parameter", rev))?;
    let roots = match params.get("roots").map(String::as_str) {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => return Err(ApiError::bad_request(format!("`roots` must be true or false, not {other:?}"), rev)),
    };
    if roots {
        let list = tree_roots(&kb, type_id).map_err(|e| ApiError::from_query(e, rev))?;
        return Ok(reply(StatusCode::OK, rev, list));
    }
    if kb.knowledge_type(type_id).is_none() {
        return Err(ApiError::from_query(QueryError::UnknownType(type_id.clone()), rev));
    }
    let list: Vec<_> = kb.objects_of_type(type_id).collect();
    Ok(reply(StatusCode::OK, rev, list))
}

async fn object(State(s): Shared, UrlPath(id): UrlPath<String>) -> ApiResult {
    let kb = s.read();
    let rev = kb.revision();
    let o = kb.object(&id).ok_or_else(|| ApiError::from_kb(KbError::UnknownId(id.clone()), rev))?;
    Ok(reply(StatusCode::OK, rev, o))
}

async fn children(
    State(s): Shared,
    UrlPath(id): UrlPath<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult {
    let kb = s.read();
    let rev = kb.revision();
    let enabled: Option<BTreeSet<String>> = params
        .get("links")
        .map(|l| l.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect());
    if let Some(unknown) = enabled.iter().flatten().find(|l| kb.link_type(l).is_none()) {
        return Err(ApiError::from_query(QueryError::UnknownType(unknown.clone()), rev));
    }
    let list = tree_children(&kb, &id, enabled.as_ref()).map_err(|e| ApiError::from_query(e, rev))?;
    Ok(reply(StatusCode::OK, rev, list))
}

async fn query(State(s): Shared, body: Bytes) -> ApiResult {
    let kb = s.read();
    let rev = kb.revision();
    let q: SelectionQuery = parse_body(&body, rev)?;
    let result = compute_visibility(&kb, &q).map_err(|e| ApiError::from_query(e, rev))?;
    Ok(reply(StatusCode::OK, rev, result))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct NewLink {
    link_type_id: String,
    parent_id: String,
    child_id: String,
}

async fn add_link(State(s): Shared, body: Bytes) -> ApiResult {
    let req: NewLink = parse_body(&body, s.revision())?;
    let (result, rev) = s.write(|kb| {
        let existed = kb.link(&kb::link_id(&req.link_type_id, &req.parent_id, &req.child_id)).is_some();
        kb.add_link(&req.link_type_id, &req.parent_id, &req.child_id).map(|l| (l, existed))
    });
    let (link, existed) = result.map_err(|e| ApiError::from_kb(e, rev))?;
    let status = if existed { StatusCode::OK } else { StatusCode::CREATED };
    Ok(reply(status, rev, link))
}

async fn remove_link(State(s): Shared, UrlPath(id): UrlPath<String>) -> ApiResult {
    let (result, rev) = s.write(|kb| kb.remove_link(&id));
    let link = result.map_err(|e| ApiError::from_kb(e, rev))?;
    Ok(reply(StatusCode::OK, rev, link))
}

async fn annotate(State(s): Shared, UrlPath(id): UrlPath<String>, body: Bytes) -> ApiResult {
    let annotation: Annotation = parse_body(&body, s.revision())?;
    let (result, rev) = s.write(|kb| {
        kb.annotate(&id, annotation)?;
        Ok::<_, KbError>(kb.object(&id).expect("annotated object exists").clone())
    });
    let object = result.map_err(|e| ApiError::from_kb(e, rev))?;
    Ok(reply(StatusCode::CREATED, rev, object))
}

#[derive(Serialize)]
struct EventsBody {
    revision: u64,
    events: Vec<kb::ChangeEvent>,
}

/// Long poll: answers as soon as an event newer than `since` exists, or with
/// an empty list after `wait` seconds (default 25, at most 60).
async fn events(State(s): Shared, Query(params): Query<HashMap<String, String>>) -> ApiResult {
    let rev = s.revision();
    let since: u64 = match params.get("since") {
        None => 0,
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::bad_request(format!("`since` must be a revision number, not {v:?}"), rev))?,
    };
    let wait = match params.get("wait") {
        None => DEFAULT_WAIT,
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite() && *w >= 0.0)
            .map(|w| Duration::from_secs_f64(w).min(MAX_WAIT))
            .ok_or_else(|| ApiError::bad_request(format!("`wait` must be a number of seconds, not {v:?}"), rev))?,
    };
    let mut rx = s.revision.subscribe();
    let deadline = tokio::time::Instant::now() + wait;
    loop {
        {
            let kb = s.read();
            let rev = kb.revision();
            let events = kb.events_since(since).map_err(|e| ApiError::from_kb(e, rev))?;
            if !events.is_empty() || tokio::time::Instant::now() >= deadline {
                return Ok(reply(StatusCode::OK, rev, EventsBody { revision: rev, events }));
            }
        }
        match tokio::time::timeout_at(deadline, rx.changed()).await {
            Ok(Ok(())) => continue,
            // Timed out, or the state is shutting down: answer with what exists.
            _ => {
                let kb = s.read();
                let rev = kb.revision();
                let events = kb.events_since(since).map_err(|e| ApiError::from_kb(e, rev))?;
                return Ok(reply(StatusCode::OK, rev, EventsBody { revision: rev, events }));
            }
        }
    }
}

#[derive(Serialize)]
struct Saved {
    revision: u64,
    path: String,
}

async fn save(State(s): Shared) -> ApiResult {
    let (bytes, rev) = {
        let kb = s.read();
        (kb::save(&kb), kb.revision())
    };
    let path = s.kb_file.clone();
    let tmp = path.with_extension("tmp");
    let write = async {
        tokio::fs::write(&tmp, &bytes).await?;
        tokio::fs::rename(&tmp, &path).await
    };
    write.await.map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "IoError",
            format!("cannot write {}: {e}", path.display()),
            rev,
        )
    })?;
    Ok(reply(
        StatusCode::OK,
        rev,
        Saved {
            revision: rev,
            path: path.display().to_string(),
        },
    ))
}

/// Serve `state` on an already-bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

/// Load `kb_file` and serve it on `bind` until interrupted.
pub async fn serve(kb_file: &Path, bind: &str) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let state = AppState::open(kb_file)?;
    let listener = tokio::net::TcpListener::bind(bind).await?;
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    serve_on(listener, state, shutdown).await?;
    Ok(())
}
