//! Traceability knowledge base.
//!
//! Five kinds of record: the base itself, knowledge types (columns), link
//! types, knowledge objects and the links between them. Every successful
//! mutation is one [`ChangeEvent`] with the next revision number; the event
//! log replays into an equal knowledge base.

mod persist;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::mpsc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::model::Access;
pub use persist::{load, save, FORMAT_VERSION};

/// Builtin knowledge types in default column order.
pub const BUILTIN_TYPES: [&str; 8] = [
    "Namespace", "Class", "Constructor", "Method", "Property", "Variable", "Delegate", "Event",
];

pub const BUILTIN_LINK_TYPES: [&str; 7] = [
    "Contains", "Calls", "Uses", "ParameterOf", "Handles", "Instantiates", "UserDefined",
];

pub const CONTAINS: &str = "Contains";

/// Text color family of a column. Parameters, which are `Variable` objects
/// tagged `parameter`, use [`ColorKey::Orange`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorKey {
    Grey,
    Blue,
    Brown,
    Red,
    Purple,
    Magenta,
    Teal,
    Olive,
    Orange,
    Neutral,
}

impl ColorKey {
    pub fn for_builtin(type_name: &str) -> ColorKey {
        match type_name {
            "Namespace" => ColorKey::Grey,
            "Class" => ColorKey::Blue,
            "Constructor" => ColorKey::Brown,
            "Method" => ColorKey::Red,
            "Property" => ColorKey::Purple,
            "Variable" => ColorKey::Magenta,
            "Delegate" => ColorKey::Teal,
            "Event" => ColorKey::Olive,
            _ => ColorKey::Neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KnowledgeType {
    pub id: String,
    pub name: String,
    pub color_key: ColorKey,
    pub builtin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkType {
    pub id: String,
    pub name: String,
    pub builtin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AnnotationBody {
    Note { text: String },
    DocumentLink { uri: String },
}

/// User-supplied note or document link attached to an object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    #[serde(flatten)]
    pub body: AnnotationBody,
    #[serde(default = "Utc::now")]
    pub created_at: DateTime<Utc>,
}

impl Annotation {
    pub fn note(text: impl Into<String>) -> Self {
        Self {
            body: AnnotationBody::Note { text: text.into() },
            created_at: Utc::now(),
        }
    }

    pub fn document_link(uri: impl Into<String>) -> Self {
        Self {
            body: AnnotationBody::DocumentLink { uri: uri.into() },
            created_at: Utc::now(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KnowledgeObject {
    pub id: String,
    pub type_id: String,
    pub display_name: String,
    pub qualified_name: String,
    pub access: Access,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind_tag: Option<String>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

/// Directed relationship `parent -> child` of a given link type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkObject {
    pub id: String,
    pub link_type_id: String,
    pub parent_id: String,
    pub child_id: String,
}

pub fn object_id(type_id: &str, qualified_name: &str) -> String {
    format!("{type_id}:{qualified_name}")
}

pub fn link_id(link_type_id: &str, parent_id: &str, child_id: &str) -> String {
    format!("{link_type_id}:{parent_id}->{child_id}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "category")]
pub enum TypeDefinition {
    Knowledge(KnowledgeType),
    Link(LinkType),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    TypeAdded,
    ObjectAdded,
    ObjectRemoved,
    LinkAdded,
    LinkRemoved,
    AnnotationChanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all_fields = "camelCase")]
pub enum Change {
    TypeAdded { definition: TypeDefinition },
    ObjectAdded { object: KnowledgeObject },
    ObjectRemoved { object_id: String },
    LinkAdded { link: LinkObject },
    LinkRemoved { link_id: String },
    AnnotationChanged { object_id: String, annotation: Annotation },
}

impl Change {
    pub fn kind(&self) -> ChangeKind {
        match self {
            Change::TypeAdded { .. } => ChangeKind::TypeAdded,
            Change::ObjectAdded { .. } => ChangeKind::ObjectAdded,
            Change::ObjectRemoved { .. } => ChangeKind::ObjectRemoved,
            Change::LinkAdded { .. } => ChangeKind::LinkAdded,
            Change::LinkRemoved { .. } => ChangeKind::LinkRemoved,
            Change::AnnotationChanged { .. } => ChangeKind::AnnotationChanged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeEvent {
    pub revision: u64,
    #[serde(flatten)]
    pub change: Change,
}

impl ChangeEvent {
    pub fn kind(&self) -> ChangeKind {
        self.change.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("name already in use: {0}")]
    DuplicateName(String),
    #[error("unknown type: {0}")]
    UnknownType(String),
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("object {0} cannot contain itself")]
    SelfContainment(String),
    #[error("invalid URI {uri:?}: {reason}")]
    InvalidUri { uri: String, reason: String },
    #[error("revision {requested} predates retained history (oldest available after {floor})")]
    RevisionTooOld { requested: u64, floor: u64 },
    #[error("event revision {found} does not follow {current}")]
    RevisionGap { current: u64, found: u64 },
    #[error("event conflicts with current state: {0}")]
    InconsistentEvent(String),
    #[error("malformed knowledge base document: {0}")]
    FormatError(String),
    #[error("unsupported knowledge base format version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
}

/// Receiving end of a subscription; events arrive in revision order.
pub struct Subscription {
    rx: mpsc::Receiver<ChangeEvent>,
}

impl Subscription {
    pub fn try_next(&self) -> Option<ChangeEvent> {
        self.rx.try_recv().ok()
    }

    /// All events delivered so far.
    pub fn drain(&self) -> Vec<ChangeEvent> {
        self.rx.try_iter().collect()
    }

    pub fn recv_timeout(&self, timeout: std::time::Duration) -> Option<ChangeEvent> {
        self.rx.recv_timeout(timeout).ok()
    }
}

#[derive(Default)]
struct Subscribers(Vec<mpsc::Sender<ChangeEvent>>);

impl Clone for Subscribers {
    // Subscriptions belong to one knowledge base instance.
    fn clone(&self) -> Self {
        Subscribers::default()
    }
}

impl fmt::Debug for Subscribers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} subscriber(s)", self.0.len())
    }
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    knowledge_types: Vec<KnowledgeType>,
    link_types: Vec<LinkType>,
    objects: BTreeMap<String, KnowledgeObject>,
    links: BTreeMap<String, LinkObject>,
    revision: u64,
    history: Vec<ChangeEvent>,
    /// Events up to and including this revision are no longer retained.
    history_floor: u64,
    history_limit: Option<usize>,
    incident: HashMap<String, BTreeSet<String>>,
    by_type: HashMap<String, BTreeSet<String>>,
    subscribers: Subscribers,
}

/// Equality is over content: registries, objects (with annotations) and
/// links. Revision, history and subscribers are not compared.
impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.knowledge_types == other.knowledge_types
            && self.link_types == other.link_types
            && self.objects == other.objects
            && self.links == other.links
    }
}

impl Eq for KnowledgeBase {}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new()
    }
}

impl KnowledgeBase {
    /// A knowledge base holding the builtin type and link-type registries.
    pub fn new() -> Self {
        let knowledge_types = BUILTIN_TYPES
            .iter()
            .map(|n| KnowledgeType {
                id: n.to_string(),
                name: n.to_string(),
                color_key: ColorKey::for_builtin(n),
                builtin: true,
            })
            .collect();
        let link_types = BUILTIN_LINK_TYPES
            .iter()
            .map(|n| LinkType {
                id: n.to_string(),
                name: n.to_string(),
                builtin: true,
            })
            .collect();
        Self::with_registries(knowledge_types, link_types)
    }

    /// A knowledge base with the given registries and no objects.
    pub fn with_registries(knowledge_types: Vec<KnowledgeType>, link_types: Vec<LinkType>) -> Self {
        Self {
            knowledge_types,
            link_types,
            objects: BTreeMap::new(),
            links: BTreeMap::new(),
            revision: 0,
            history: Vec::new(),
            history_floor: 0,
            history_limit: None,
            incident: HashMap::new(),
            by_type: HashMap::new(),
            subscribers: Subscribers::default(),
        }
    }

    /// Rebuild a knowledge base by applying `events` to a fresh one.
    pub fn replay<'a>(events: impl IntoIterator<Item = &'a ChangeEvent>) -> Result<Self, KbError> {
        let mut kb = Self::new();
        for e in events {
            kb.apply(e)?;
        }
        Ok(kb)
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn knowledge_types(&self) -> &[KnowledgeType] {
        &self.knowledge_types
    }

    pub fn link_types(&self) -> &[LinkType] {
        &self.link_types
    }

    pub fn knowledge_type(&self, id: &str) -> Option<&KnowledgeType> {
        self.knowledge_types.iter().find(|t| t.id == id)
    }

    pub fn link_type(&self, id: &str) -> Option<&LinkType> {
        self.link_types.iter().find(|t| t.id == id)
    }

    pub fn has_builtins(&self) -> bool {
        BUILTIN_TYPES.iter().all(|t| self.knowledge_type(t).is_some())
            && BUILTIN_LINK_TYPES.iter().all(|t| self.link_type(t).is_some())
    }

    pub fn object(&self, id: &str) -> Option<&KnowledgeObject> {
        self.objects.get(id)
    }

    pub fn link(&self, id: &str) -> Option<&LinkObject> {
        self.links.get(id)
    }

    /// All objects in id order.
    pub fn objects(&self) -> impl Iterator<Item = &KnowledgeObject> {
        self.objects.values()
    }

    /// All links in id order.
    pub fn links(&self) -> impl Iterator<Item = &LinkObject> {
        self.links.values()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Objects of one type in id order.
    pub fn objects_of_type<'a>(&'a self, type_id: &str) -> impl Iterator<Item = &'a KnowledgeObject> + 'a {
        self.by_type
            .get(type_id)
            .into_iter()
            .flatten()
            .filter_map(|id| self.objects.get(id))
    }

    /// Links having `object_id` as parent or child, in id order.
    pub fn incident_links<'a>(&'a self, object_id: &str) -> impl Iterator<Item = &'a LinkObject> + 'a {
        self.incident
            .get(object_id)
            .into_iter()
            .flatten()
            .filter_map(|id| self.links.get(id))
    }

    // ------------------------------------------------------------ mutation

    pub fn add_type(&mut self, name: &str, color_key: ColorKey) -> Result<KnowledgeType, KbError> {
        if self.knowledge_types.iter().any(|t| t.name == name || t.id == name) {
            return Err(KbError::DuplicateName(name.to_string()));
        }
        let t = KnowledgeType {
            id: name.to_string(),
            name: name.to_string(),
            color_key,
            builtin: false,
        };
        self.commit(Change::TypeAdded {
            definition: TypeDefinition::Knowledge(t.clone()),
        });
        Ok(t)
    }

    pub fn add_link_type(&mut self, name: &str) -> Result<LinkType, KbError> {
        if self.link_types.iter().any(|t| t.name == name || t.id == name) {
            return Err(KbError::DuplicateName(name.to_string()));
        }
        let t = LinkType {
            id: name.to_string(),
            name: name.to_string(),
            builtin: false,
        };
        self.commit(Change::TypeAdded {
            definition: TypeDefinition::Link(t.clone()),
        });
        Ok(t)
    }

    /// Insert an object; an object with the same id is returned unchanged
    /// without an event.
    pub fn add_object(
        &mut self,
        type_id: &str,
        qualified_name: &str,
        display_name: &str,
        access: Access,
        kind_tag: Option<&str>,
    ) -> Result<KnowledgeObject, KbError> {
        if self.knowledge_type(type_id).is_none() {
            return Err(KbError::UnknownType(type_id.to_string()));
        }
        let id = object_id(type_id, qualified_name);
        if let Some(existing) = self.objects.get(&id) {
            return Ok(existing.clone());
        }
        let object = KnowledgeObject {
            id,
            type_id: type_id.to_string(),
            display_name: display_name.to_string(),
            qualified_name: qualified_name.to_string(),
            access,
            kind_tag: kind_tag.map(str::to_string),
            annotations: Vec::new(),
        };
        self.commit(Change::ObjectAdded { object: object.clone() });
        Ok(object)
    }

    /// Insert a link; an identical (type, parent, child) link is returned
    /// unchanged without an event.
    pub fn add_link(&mut self, link_type_id: &str, parent_id: &str, child_id: &str) -> Result<LinkObject, KbError> {
        if self.link_type(link_type_id).is_none() {
            return Err(KbError::UnknownType(link_type_id.to_string()));
        }
        for id in [parent_id, child_id] {
            if !self.objects.contains_key(id) {
                return Err(KbError::UnknownId(id.to_string()));
            }
        }
        if link_type_id == CONTAINS && parent_id == child_id {
            return Err(KbError::SelfContainment(parent_id.to_string()));
        }
        let id = link_id(link_type_id, parent_id, child_id);
        if let Some(existing) = self.links.get(&id) {
            return Ok(existing.clone());
        }
        let link = LinkObject {
            id,
            link_type_id: link_type_id.to_string(),
            parent_id: parent_id.to_string(),
            child_id: child_id.to_string(),
        };
        self.commit(Change::LinkAdded { link: link.clone() });
        Ok(link)
    }

    pub fn remove_link(&mut self, link_id: &str) -> Result<LinkObject, KbError> {
        let link = self
            .links
            .get(link_id)
            .cloned()
            .ok_or_else(|| KbError::UnknownId(link_id.to_string()))?;
        self.commit(Change::LinkRemoved {
            link_id: link_id.to_string(),
        });
        Ok(link)
    }

    /// Remove an object together with its incident links. Emits one
    /// `LinkRemoved` per link (in link id order) and then `ObjectRemoved`.
    pub fn remove_object(&mut self, object_id: &str) -> Result<KnowledgeObject, KbError> {
        let object = self
            .objects
            .get(object_id)
            .cloned()
            .ok_or_else(|| KbError::UnknownId(object_id.to_string()))?;
        let incident: Vec<String> = self.incident.get(object_id).into_iter().flatten().cloned().collect();
        for link_id in incident {
            self.commit(Change::LinkRemoved { link_id });
        }
        self.commit(Change::ObjectRemoved {
            object_id: object_id.to_string(),
        });
        Ok(object)
    }

    pub fn annotate(&mut self, object_id: &str, annotation: Annotation) -> Result<(), KbError> {
        if !self.objects.contains_key(object_id) {
            return Err(KbError::UnknownId(object_id.to_string()));
        }
        validate_annotation(&annotation)?;
        self.commit(Change::AnnotationChanged {
            object_id: object_id.to_string(),
            annotation,
        });
        Ok(())
    }

    // -------------------------------------------------------------- events

    pub fn subscribe(&mut self) -> Subscription {
        let (tx, rx) = mpsc::channel();
        self.subscribers.0.push(tx);
        Subscription { rx }
    }

    /// Events with revision greater than `revision`, in order.
    pub fn events_since(&self, revision: u64) -> Result<Vec<ChangeEvent>, KbError> {
        if revision < self.history_floor {
            return Err(KbError::RevisionTooOld {
                requested: revision,
                floor: self.history_floor,
            });
        }
        let start = self.history.partition_point(|e| e.revision <= revision);
        Ok(self.history[start..].to_vec())
    }

    /// Retain at most `limit` events; `None` (the default) keeps everything.
    pub fn set_history_limit(&mut self, limit: Option<usize>) {
        self.history_limit = limit;
        self.trim_history();
    }

    /// Drop retained events up to and including `revision`.
    pub fn compact_history(&mut self, revision: u64) {
        let revision = revision.min(self.revision);
        self.history.retain(|e| e.revision > revision);
        self.history_floor = self.history_floor.max(revision);
    }

    fn trim_history(&mut self) {
        if let Some(limit) = self.history_limit {
            if self.history.len() > limit {
                let drop = self.history.len() - limit;
                let floor = self.history[drop - 1].revision;
                self.history.drain(..drop);
                self.history_floor = floor;
            }
        }
    }

    /// Apply an event produced by another knowledge base (replay). The event
    /// must carry the next revision and be consistent with current state.
    pub fn apply(&mut self, event: &ChangeEvent) -> Result<(), KbError> {
        if event.revision != self.revision + 1 {
            return Err(KbError::RevisionGap {
                current: self.revision,
                found: event.revision,
            });
        }
        self.validate(&event.change)?;
        self.commit(event.change.clone());
        Ok(())
    }

    fn validate(&self, change: &Change) -> Result<(), KbError> {
        let inconsistent = |msg: String| Err(KbError::InconsistentEvent(msg));
        match change {
            Change::TypeAdded {
                definition: TypeDefinition::Knowledge(t),
            } => {
                if self.knowledge_types.iter().any(|k| k.id == t.id || k.name == t.name) {
                    return inconsistent(format!("type {} exists", t.id));
                }
            }
            Change::TypeAdded {
                definition: TypeDefinition::Link(t),
            } => {
                if self.link_types.iter().any(|k| k.id == t.id || k.name == t.name) {
                    return inconsistent(format!("link type {} exists", t.id));
                }
            }
            Change::ObjectAdded { object } => {
                if self.knowledge_type(&object.type_id).is_none() {
                    return Err(KbError::UnknownType(object.type_id.clone()));
                }
                if self.objects.contains_key(&object.id) || object.id != object_id(&object.type_id, &object.qualified_name) {
                    return inconsistent(format!("object {} exists or has a foreign id", object.id));
                }
                if !object.annotations.is_empty() {
                    return inconsistent("annotations arrive as separate events".into());
                }
            }
            Change::ObjectRemoved { object_id } => {
                if !self.objects.contains_key(object_id) {
                    return Err(KbError::UnknownId(object_id.clone()));
                }
                if self.incident.get(object_id).is_some_and(|s| !s.is_empty()) {
                    return inconsistent(format!("object {object_id} still has links"));
                }
            }
            Change::LinkAdded { link } => {
                if self.link_type(&link.link_type_id).is_none() {
                    return Err(KbError::UnknownType(link.link_type_id.clone()));
                }
                for id in [&link.parent_id, &link.child_id] {
                    if !self.objects.contains_key(id) {
                        return Err(KbError::UnknownId(id.clone()));
                    }
                }
                if link.link_type_id == CONTAINS && link.parent_id == link.child_id {
                    return Err(KbError::SelfContainment(link.parent_id.clone()));
                }
                if self.links.contains_key(&link.id) || link.id != link_id(&link.link_type_id, &link.parent_id, &link.child_id) {
                    return inconsistent(format!("link {} exists or has a foreign id", link.id));
                }
            }
            Change::LinkRemoved { link_id } => {
                if !self.links.contains_key(link_id) {
                    return Err(KbError::UnknownId(link_id.clone()));
                }
            }
            Change::AnnotationChanged { object_id, annotation } => {
                if !self.objects.contains_key(object_id) {
                    return Err(KbError::UnknownId(object_id.clone()));
                }
                validate_annotation(annotation)?;
            }
        }
        Ok(())
    }

    /// Apply a validated change, record it and notify subscribers.
    fn commit(&mut self, change: Change) {
        match &change {
            Change::TypeAdded { definition } => match definition {
                TypeDefinition::Knowledge(t) => self.knowledge_types.push(t.clone()),
                TypeDefinition::Link(t) => self.link_types.push(t.clone()),
            },
            Change::ObjectAdded { object } => {
                self.by_type
                    .entry(object.type_id.clone())
                    .or_default()
                    .insert(object.id.clone());
                self.objects.insert(object.id.clone(), object.clone());
            }
            Change::ObjectRemoved { object_id } => {
                if let Some(o) = self.objects.remove(object_id) {
                    if let Some(set) = self.by_type.get_mut(&o.type_id) {
                        set.remove(object_id);
                    }
                }
                self.incident.remove(object_id);
            }
            Change::LinkAdded { link } => {
                for end in [&link.parent_id, &link.child_id] {
                    self.incident.entry(end.clone()).or_default().insert(link.id.clone());
                }
                self.links.insert(link.id.clone(), link.clone());
            }
            Change::LinkRemoved { link_id } => {
                if let Some(link) = self.links.remove(link_id) {
                    for end in [&link.parent_id, &link.child_id] {
                        if let Some(set) = self.incident.get_mut(end) {
                            set.remove(link_id);
                        }
                    }
                }
            }
            Change::AnnotationChanged { object_id, annotation } => {
                if let Some(o) = self.objects.get_mut(object_id) {
                    o.annotations.push(annotation.clone());
                }
            }
        }
        self.revision += 1;
        let event = ChangeEvent {
            revision: self.revision,
            change,
        };
        self.subscribers.0.retain(|tx| tx.send(event.clone()).is_ok());
        self.history.push(event);
        self.trim_history();
    }

    /// Referential integrity: every object's type, every link's type and
    /// endpoints exist, link ids are unique per triple and no object
    /// contains itself.
    pub fn check_integrity(&self) -> Result<(), String> {
        for o in self.objects.values() {
            if self.knowledge_type(&o.type_id).is_none() {
                return Err(format!("object {} has unknown type {}", o.id, o.type_id));
            }
        }
        let mut triples = std::collections::HashSet::new();
        for l in self.links.values() {
            if self.link_type(&l.link_type_id).is_none() {
                return Err(format!("link {} has unknown type", l.id));
            }
            if !self.objects.contains_key(&l.parent_id) || !self.objects.contains_key(&l.child_id) {
                return Err(format!("link {} dangles", l.id));
            }
            if l.link_type_id == CONTAINS && l.parent_id == l.child_id {
                return Err(format!("link {} is self-containment", l.id));
            }
            if !triples.insert((&l.link_type_id, &l.parent_id, &l.child_id)) {
                return Err(format!("duplicate link triple {}", l.id));
            }
        }
        Ok(())
    }
}

fn validate_annotation(annotation: &Annotation) -> Result<(), KbError> {
    if let AnnotationBody::DocumentLink { uri } = &annotation.body {
        url::Url::parse(uri).map_err(|e| KbError::InvalidUri {
            uri: uri.clone(),
            reason: e.to_string(),
        })?;
    }
    Ok(())
}
