//! JSON persistence.
//!
//! Registries keep their list order (it is the default column order);
//! objects, links and annotations are sorted by id so equal knowledge bases
//! save to identical bytes. Revision and history are not stored: loading
//! rebuilds the base through ordinary mutations, so the loaded history is a
//! valid replay log of the loaded content.

use serde::{Deserialize, Serialize};

use super::{Access, Annotation, KbError, KnowledgeBase, KnowledgeType, LinkObject, LinkType};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Document {
    version: u64,
    knowledge_types: Vec<KnowledgeType>,
    link_types: Vec<LinkType>,
    objects: Vec<ObjectRecord>,
    links: Vec<LinkObject>,
    annotations: Vec<AnnotationRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ObjectRecord {
    id: String,
    type_id: String,
    display_name: String,
    qualified_name: String,
    access: Access,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind_tag: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct AnnotationRecord {
    object_id: String,
    #[serde(flatten)]
    annotation: Annotation,
}

pub fn save(kb: &KnowledgeBase) -> Vec<u8> {
    let doc = Document {
        version: FORMAT_VERSION,
        knowledge_types: kb.knowledge_types.clone(),
        link_types: kb.link_types.clone(),
        objects: kb
            .objects
            .values()
            .map(|o| ObjectRecord {
                id: o.id.clone(),
                type_id: o.type_id.clone(),
                display_name: o.display_name.clone(),
                qualified_name: o.qualified_name.clone(),
                access: o.access,
                kind_tag: o.kind_tag.clone(),
            })
            .collect(),
        links: kb.links.values().cloned().collect(),
        // Stable by object id; per-object annotation order is preserved.
        annotations: kb
            .objects
            .values()
            .flat_map(|o| {
                o.annotations.iter().map(|a| AnnotationRecord {
                    object_id: o.id.clone(),
                    annotation: a.clone(),
                })
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("knowledge base serializes");
    bytes.push(b'\n');
    bytes
}

pub fn load(bytes: &[u8]) -> Result<KnowledgeBase, KbError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| KbError::FormatError(e.to_string()))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(KbError::VersionMismatch {
                found,
                expected: FORMAT_VERSION,
            })
        }
        None => return Err(KbError::FormatError("missing numeric version".into())),
    }
    let doc: Document = serde_json::from_value(value).map_err(|e| KbError::FormatError(e.to_string()))?;
    let malformed = |e: KbError| KbError::FormatError(e.to_string());

    let (builtin_types, user_types): (Vec<_>, Vec<_>) = doc.knowledge_types.into_iter().partition(|t| t.builtin);
    let (builtin_links, user_links): (Vec<_>, Vec<_>) = doc.link_types.into_iter().partition(|t| t.builtin);
    let mut kb = KnowledgeBase::with_registries(builtin_types, builtin_links);
    for t in user_types {
        let added = kb.add_type(&t.name, t.color_key).map_err(malformed)?;
        if added.id != t.id {
            return Err(KbError::FormatError(format!("type id {} does not match name {}", t.id, t.name)));
        }
    }
    for t in user_links {
        let added = kb.add_link_type(&t.name).map_err(malformed)?;
        if added.id != t.id {
            return Err(KbError::FormatError(format!("link type id {} does not match name {}", t.id, t.name)));
        }
    }
    for o in doc.objects {
        if kb.object(&o.id).is_some() {
            return Err(KbError::FormatError(format!("duplicate object {}", o.id)));
        }
        let added = kb
            .add_object(&o.type_id, &o.qualified_name, &o.display_name, o.access, o.kind_tag.as_deref())
            .map_err(malformed)?;
        if added.id != o.id {
            return Err(KbError::FormatError(format!("object id {} does not match its type and name", o.id)));
        }
    }
    for l in doc.links {
        if kb.link(&l.id).is_some() {
            return Err(KbError::FormatError(format!("duplicate link {}", l.id)));
        }
        let added = kb.add_link(&l.link_type_id, &l.parent_id, &l.child_id).map_err(malformed)?;
        if added.id != l.id {
            return Err(KbError::FormatError(format!("link id {} does not match its endpoints", l.id)));
        }
    }
    for a in doc.annotations {
        kb.annotate(&a.object_id, a.annotation).map_err(malformed)?;
    }
    Ok(kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{ColorKey, KnowledgeBase};

    fn sample() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.add_type("Requirements", ColorKey::Neutral).unwrap();
        kb.add_link_type("Implements").unwrap();
        let n = kb.add_object("Namespace", "N", "N", Access::Other, None).unwrap();
        let c = kb.add_object("Class", "N.C", "C", Access::Public, None).unwrap();
        let p = kb.add_object("Variable", "N.C.M.x", "x", Access::Other, Some("parameter")).unwrap();
        let r = kb.add_object("Requirements", "R-7", "R-7", Access::Other, None).unwrap();
        kb.add_link("Contains", &n.id, &c.id).unwrap();
        kb.add_link("Implements", &c.id, &r.id).unwrap();
        kb.add_link("ParameterOf", &p.id, &c.id).unwrap();
        kb.annotate(&c.id, Annotation::note("first")).unwrap();
        kb.annotate(&c.id, Annotation::document_link("file:///specs/c.pdf")).unwrap();
        kb
    }

    #[test]
    fn round_trip() {
        let kb = sample();
        let bytes = save(&kb);
        let back = load(&bytes).unwrap();
        assert_eq!(back, kb);
        assert_eq!(save(&back), bytes);
        assert_eq!(KnowledgeBase::replay(&back.events_since(0).unwrap()).unwrap(), back);
    }

    #[test]
    fn top_level_keys() {
        let v: serde_json::Value = serde_json::from_slice(&save(&sample())).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut expected = ["version", "knowledgeTypes", "linkTypes", "objects", "links", "annotations"].map(String::from);
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert_eq!(v["version"], 1);
        assert_eq!(v["annotations"][1]["kind"], "DocumentLink");
    }

    #[test]
    fn version_and_format_errors() {
        let mut v: serde_json::Value = serde_json::from_slice(&save(&sample())).unwrap();
        v["version"] = 2.into();
        assert_eq!(
            load(&serde_json::to_vec(&v).unwrap()),
            Err(KbError::VersionMismatch { found: 2, expected: 1 })
        );
        assert!(matches!(load(b"{"), Err(KbError::FormatError(_))));
        assert!(matches!(load(b"[]"), Err(KbError::FormatError(_))));
        v["version"] = 1.into();
        v["links"][0]["childId"] = "Class:Missing".into();
        assert!(matches!(load(&serde_json::to_vec(&v).unwrap()), Err(KbError::FormatError(_))));
    }
}
