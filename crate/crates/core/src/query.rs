//! Column selection queries and tree expansion.
//!
//! Checked objects seed a reachability search over an undirected graph whose
//! nodes are the objects of displayed columns. A column with checked objects
//! contributes only those objects as nodes, so it restricts what can pass
//! through it; a column without checks contributes all of its objects.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{KnowledgeBase, KnowledgeObject, CONTAINS};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectionQuery {
    pub displayed_type_ids: Vec<String>,
    #[serde(default)]
    pub checked: BTreeMap<String, BTreeSet<String>>,
    #[serde(default)]
    pub enabled_link_type_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VisibilityResult {
    pub visible: BTreeMap<String, BTreeSet<String>>,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("unknown type: {0}")]
    UnknownType(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

fn validate(kb: &KnowledgeBase, q: &SelectionQuery) -> Result<(), QueryError> {
    for t in &q.displayed_type_ids {
        if kb.knowledge_type(t).is_none() {
            return Err(QueryError::UnknownType(t.clone()));
        }
    }
    for l in &q.enabled_link_type_ids {
        if kb.link_type(l).is_none() {
            return Err(QueryError::UnknownType(l.clone()));
        }
    }
    for (t, ids) in &q.checked {
        if !q.displayed_type_ids.contains(t) {
            return Err(QueryError::InvalidQuery(format!("checked column {t} is not displayed")));
        }
        for id in ids {
            let o = kb.object(id).ok_or_else(|| QueryError::UnknownId(id.clone()))?;
            if &o.type_id != t {
                return Err(QueryError::InvalidQuery(format!("{id} is not of type {t}")));
            }
        }
    }
    Ok(())
}

/// Objects visible in each displayed column.
pub fn compute_visibility(kb: &KnowledgeBase, q: &SelectionQuery) -> Result<VisibilityResult, QueryError> {
    validate(kb, q)?;
    let all_of = |t: &str| kb.objects_of_type(t).map(|o| o.id.clone()).collect::<BTreeSet<_>>();
    let nothing_checked = q.checked.values().all(BTreeSet::is_empty);
    if nothing_checked {
        return Ok(VisibilityResult {
            visible: q.displayed_type_ids.iter().map(|t| (t.clone(), all_of(t))).collect(),
            revision: kb.revision(),
        });
    }

    let mut active: HashMap<&str, &str> = HashMap::new();
    for t in &q.displayed_type_ids {
        match q.checked.get(t).filter(|s| !s.is_empty()) {
            Some(ids) => active.extend(ids.iter().map(|id| (id.as_str(), t.as_str()))),
            None => active.extend(kb.objects_of_type(t).map(|o| (o.id.as_str(), t.as_str()))),
        }
    }
    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    for l in kb.links() {
        if !q.enabled_link_type_ids.contains(&l.link_type_id) {
            continue;
        }
        let (Some((p, _)), Some((c, _))) = (active.get_key_value(l.parent_id.as_str()), active.get_key_value(l.child_id.as_str())) else {
            continue;
        };
        adjacency.entry(p).or_default().push(c);
        adjacency.entry(c).or_default().push(p);
    }

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for id in q.checked.values().flatten() {
        if seen.insert(id) {
            queue.push_back(id);
        }
    }
    while let Some(n) = queue.pop_front() {
        for &m in adjacency.get(n).into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }

    let mut visible: BTreeMap<String, BTreeSet<String>> =
        q.displayed_type_ids.iter().map(|t| (t.clone(), BTreeSet::new())).collect();
    for id in seen {
        let t = active[id];
        visible.get_mut(t).expect("displayed").insert(id.to_string());
    }
    Ok(VisibilityResult {
        visible,
        revision: kb.revision(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeChild {
    pub link_type_name: String,
    pub link_id: String,
    pub object: KnowledgeObject,
}

/// Children of `object_id` in tree view: targets of links where it is the
/// parent, sorted by (link type name, child display name). `None` enables
/// every link type.
pub fn tree_children(
    kb: &KnowledgeBase,
    object_id: &str,
    enabled: Option<&BTreeSet<String>>,
) -> Result<Vec<TreeChild>, QueryError> {
    if kb.object(object_id).is_none() {
        return Err(QueryError::UnknownId(object_id.to_string()));
    }
    let mut out: Vec<TreeChild> = kb
        .incident_links(object_id)
        .filter(|l| l.parent_id == object_id)
        .filter(|l| enabled.is_none_or(|e| e.contains(&l.link_type_id)))
        .map(|l| TreeChild {
            link_type_name: kb.link_type(&l.link_type_id).map_or_else(|| l.link_type_id.clone(), |t| t.name.clone()),
            link_id: l.id.clone(),
            object: kb.object(&l.child_id).expect("link endpoints exist").clone(),
        })
        .collect();
    out.sort_by(|a, b| {
        (&a.link_type_name, &a.object.display_name, &a.object.id).cmp(&(&b.link_type_name, &b.object.display_name, &b.object.id))
    });
    Ok(out)
}

/// Top level of a column: objects of `type_id` not contained by another
/// object of the same type, sorted by display name.
pub fn tree_roots(kb: &KnowledgeBase, type_id: &str) -> Result<Vec<KnowledgeObject>, QueryError> {
    if kb.knowledge_type(type_id).is_none() {
        return Err(QueryError::UnknownType(type_id.to_string()));
    }
    let mut roots: Vec<KnowledgeObject> = kb
        .objects_of_type(type_id)
        .filter(|o| {
            !kb.incident_links(&o.id).any(|l| {
                l.link_type_id == CONTAINS
                    && l.child_id == o.id
                    && kb.object(&l.parent_id).is_some_and(|p| p.type_id == type_id)
            })
        })
        .cloned()
        .collect();
    roots.sort_by(|a, b| (&a.display_name, &a.id).cmp(&(&b.display_name, &b.id)));
    Ok(roots)
}
