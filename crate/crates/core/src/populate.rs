//! Code model → knowledge base.
//!
//! Every declaration becomes an object with a deterministic id, so populating
//! the same model twice changes nothing. References are bound by name in
//! three tiers: the referencing member's class, then its namespace, then the
//! whole model. All candidates of the first nonempty tier are linked.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{KbError, KnowledgeBase};
use crate::lexer::SourcePosition;
use crate::model::{parameter_qualified_name, Access, ClassDecl, CodeModel, ParamDecl, Reference, ReferenceKind};

pub const PARAMETER_TAG: &str = "parameter";
pub const FIELD_TAG: &str = "field";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PopulateError {
    #[error("knowledge base lacks the builtin type registry")]
    MissingBuiltins,
    #[error(transparent)]
    Kb(#[from] KbError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct KindCounts {
    pub calls: usize,
    pub uses: usize,
    pub instantiations: usize,
}

impl KindCounts {
    fn bump(&mut self, kind: ReferenceKind) {
        match kind {
            ReferenceKind::Call => self.calls += 1,
            ReferenceKind::Use => self.uses += 1,
            ReferenceKind::Instantiate => self.instantiations += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.calls + self.uses + self.instantiations
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnresolvedReference {
    pub member_id: String,
    pub kind: ReferenceKind,
    pub name: String,
    pub pos: SourcePosition,
}

/// Summary of a population pass. Object and link counts describe the whole
/// knowledge base afterwards, in registry order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PopulationReport {
    pub objects_per_type: Vec<(String, usize)>,
    pub links_per_type: Vec<(String, usize)>,
    pub unresolved: KindCounts,
    /// References bound to more than one declaration.
    pub ambiguous: KindCounts,
    pub unresolved_references: Vec<UnresolvedReference>,
}

impl PopulationReport {
    pub fn objects_of(&self, type_id: &str) -> usize {
        self.objects_per_type.iter().find(|(t, _)| t == type_id).map_or(0, |(_, n)| *n)
    }

    pub fn links_of(&self, link_type_id: &str) -> usize {
        self.links_per_type.iter().find(|(t, _)| t == link_type_id).map_or(0, |(_, n)| *n)
    }

    pub fn total_objects(&self) -> usize {
        self.objects_per_type.iter().map(|(_, n)| n).sum()
    }

    pub fn total_links(&self) -> usize {
        self.links_per_type.iter().map(|(_, n)| n).sum()
    }
}

/// Plain-text table: objects per type, links per link type, unresolved and
/// ambiguous reference counts.
impl fmt::Display for PopulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |f: &mut fmt::Formatter<'_>, label: &str, n: usize| writeln!(f, "  {label:<16}{n:>8}");
        writeln!(f, "Objects")?;
        for (t, n) in &self.objects_per_type {
            row(f, t, *n)?;
        }
        row(f, "total", self.total_objects())?;
        writeln!(f, "Links")?;
        for (t, n) in &self.links_per_type {
            row(f, t, *n)?;
        }
        row(f, "total", self.total_links())?;
        for (title, c) in [("Unresolved references", &self.unresolved), ("Ambiguous references", &self.ambiguous)] {
            writeln!(f, "{title}")?;
            row(f, "Call", c.calls)?;
            row(f, "Use", c.uses)?;
            row(f, "Instantiate", c.instantiations)?;
        }
        Ok(())
    }
}

/// A resolvable declaration.
struct Target {
    id: String,
    type_id: &'static str,
    /// Qualified name with any overload ordinal removed.
    key: String,
    namespace: String,
    /// Enclosing class; for classes this is the outer class, if nested.
    class: Option<String>,
    /// Constructor ids, classes only.
    constructors: Vec<String>,
}

#[derive(Default)]
struct Index {
    by_last_segment: HashMap<String, Vec<Target>>,
}

impl Index {
    fn insert(&mut self, t: Target) {
        let last = t.key.rsplit('.').next().unwrap_or(&t.key).to_string();
        self.by_last_segment.entry(last).or_default().push(t);
    }

    /// Candidates of the given types whose qualified name ends with `name`,
    /// restricted to the first nonempty tier.
    fn resolve(&self, name: &str, types: &[&str], class: &str, namespace: &str) -> Vec<&Target> {
        let last = name.rsplit('.').next().unwrap_or(name);
        let suffix = format!(".{name}");
        let all: Vec<&Target> = self
            .by_last_segment
            .get(last)
            .into_iter()
            .flatten()
            .filter(|t| types.contains(&t.type_id) && (t.key.ends_with(&suffix) || t.key == name))
            .collect();
        let tier1: Vec<_> = all.iter().copied().filter(|t| t.class.as_deref() == Some(class)).collect();
        if !tier1.is_empty() {
            return tier1;
        }
        let tier2: Vec<_> = all.iter().copied().filter(|t| t.namespace == namespace).collect();
        if !tier2.is_empty() {
            return tier2;
        }
        all
    }
}

fn strip_ordinal(q: &str) -> &str {
    match q.rfind('#') {
        Some(i) if q[i + 1..].bytes().all(|b| b.is_ascii_digit()) && i + 1 < q.len() => &q[..i],
        _ => q,
    }
}

fn id(type_id: &str, q: &str) -> String {
    crate::kb::object_id(type_id, q)
}

/// A member body waiting for reference resolution.
struct Body<'m> {
    member_id: String,
    class: String,
    namespace: String,
    params: &'m [ParamDecl],
    member_qname: &'m str,
    references: &'m [Reference],
}

/// Populate `kb` from `model`.
pub fn populate(model: &CodeModel, kb: &mut KnowledgeBase) -> Result<PopulationReport, PopulateError> {
    if !kb.has_builtins() {
        return Err(PopulateError::MissingBuiltins);
    }
    let mut index = Index::default();
    let mut bodies = Vec::new();
    for ns in &model.namespaces {
        let ns_id = kb.add_object("Namespace", &ns.qualified_name, &ns.qualified_name, Access::Other, None)?.id;
        for d in &ns.delegates {
            let o = kb.add_object("Delegate", &d.qualified_name, &d.name, d.access, None)?;
            kb.add_link("Contains", &ns_id, &o.id)?;
        }
        for c in &ns.classes {
            let cid = add_class(kb, &mut index, &mut bodies, c, &ns.qualified_name, None)?;
            kb.add_link("Contains", &ns_id, &cid)?;
        }
    }

    let mut unresolved = KindCounts::default();
    let mut ambiguous = KindCounts::default();
    let mut unresolved_references = Vec::new();
    for body in &bodies {
        for r in body.references {
            let linked = bind(kb, &index, body, r)?;
            if linked == 0 {
                unresolved.bump(r.kind);
                unresolved_references.push(UnresolvedReference {
                    member_id: body.member_id.clone(),
                    kind: r.kind,
                    name: r.name.clone(),
                    pos: r.pos.clone(),
                });
            } else if linked > 1 {
                ambiguous.bump(r.kind);
            }
        }
    }
    Ok(PopulationReport {
        objects_per_type: kb
            .knowledge_types()
            .iter()
            .map(|t| (t.id.clone(), kb.objects_of_type(&t.id).count()))
            .collect(),
        links_per_type: kb
            .link_types()
            .iter()
            .map(|t| (t.id.clone(), kb.links().filter(|l| l.link_type_id == t.id).count()))
            .collect(),
        unresolved,
        ambiguous,
        unresolved_references,
    })
}

/// Add a class, its members and nested classes; returns the class id.
fn add_class<'m>(
    kb: &mut KnowledgeBase,
    index: &mut Index,
    bodies: &mut Vec<Body<'m>>,
    c: &'m ClassDecl,
    namespace: &str,
    outer: Option<&str>,
) -> Result<String, PopulateError> {
    let cid = kb
        .add_object("Class", &c.qualified_name, &c.name, c.access, Some(&c.kind.as_str().to_ascii_lowercase()))?
        .id;
    let q = c.qualified_name.as_str();
    let target = |type_id: &'static str, qname: &str, class: Option<&str>| Target {
        id: id(type_id, qname),
        type_id,
        key: strip_ordinal(qname).to_string(),
        namespace: namespace.to_string(),
        class: class.map(str::to_string),
        constructors: Vec::new(),
    };
    let mut class_target = target("Class", q, outer);
    let mut members: Vec<Target> = Vec::new();
    let contain = |kb: &mut KnowledgeBase, child: &str| kb.add_link("Contains", &cid, child).map(|_| ());

    for m in &c.constructors {
        let mid = kb.add_object("Constructor", &m.qualified_name, &m.name, m.access, None)?.id;
        contain(kb, &mid)?;
        add_parameters(kb, &mid, &m.qualified_name, &m.parameters)?;
        class_target.constructors.push(mid.clone());
        bodies.push(Body {
            member_id: mid,
            class: q.to_string(),
            namespace: namespace.to_string(),
            params: &m.parameters,
            member_qname: &m.qualified_name,
            references: &m.references,
        });
    }
    for m in &c.methods {
        let mid = kb.add_object("Method", &m.qualified_name, &m.name, m.access, None)?.id;
        contain(kb, &mid)?;
        add_parameters(kb, &mid, &m.qualified_name, &m.parameters)?;
        members.push(target("Method", &m.qualified_name, Some(q)));
        bodies.push(Body {
            member_id: mid,
            class: q.to_string(),
            namespace: namespace.to_string(),
            params: &m.parameters,
            member_qname: &m.qualified_name,
            references: &m.references,
        });
    }
    for p in &c.properties {
        let pid = kb.add_object("Property", &p.qualified_name, &p.name, p.access, None)?.id;
        contain(kb, &pid)?;
        members.push(target("Property", &p.qualified_name, Some(q)));
        bodies.push(Body {
            member_id: pid,
            class: q.to_string(),
            namespace: namespace.to_string(),
            params: &[],
            member_qname: &p.qualified_name,
            references: &p.references,
        });
    }
    for f in &c.fields {
        let fid = kb.add_object("Variable", &f.qualified_name, &f.name, f.access, Some(FIELD_TAG))?.id;
        contain(kb, &fid)?;
        members.push(target("Variable", &f.qualified_name, Some(q)));
    }
    for e in &c.events {
        let eid = kb.add_object("Event", &e.qualified_name, &e.name, e.access, None)?.id;
        contain(kb, &eid)?;
        members.push(target("Event", &e.qualified_name, Some(q)));
    }
    for d in &c.delegates {
        let did = kb.add_object("Delegate", &d.qualified_name, &d.name, d.access, None)?.id;
        contain(kb, &did)?;
    }
    for n in &c.nested_classes {
        let nid = add_class(kb, index, bodies, n, namespace, Some(q))?;
        contain(kb, &nid)?;
    }
    index.insert(class_target);
    for t in members {
        index.insert(t);
    }
    Ok(cid)
}

fn add_parameters(kb: &mut KnowledgeBase, member_id: &str, member_q: &str, params: &[ParamDecl]) -> Result<(), PopulateError> {
    for p in params {
        let q = parameter_qualified_name(member_q, &p.name);
        let pid = kb.add_object("Variable", &q, &p.name, Access::Other, Some(PARAMETER_TAG))?.id;
        kb.add_link("ParameterOf", &pid, member_id)?;
    }
    Ok(())
}

/// Link one reference; returns the number of targets linked.
fn bind(kb: &mut KnowledgeBase, index: &Index, body: &Body, r: &Reference) -> Result<usize, PopulateError> {
    let mut links: BTreeMap<String, &'static str> = BTreeMap::new();
    match r.kind {
        ReferenceKind::Call => {
            for t in index.resolve(&r.name, &["Method"], &body.class, &body.namespace) {
                links.insert(t.id.clone(), "Calls");
            }
        }
        ReferenceKind::Instantiate => {
            for t in index.resolve(&r.name, &["Class"], &body.class, &body.namespace) {
                for ctor in &t.constructors {
                    links.insert(ctor.clone(), "Instantiates");
                }
            }
        }
        ReferenceKind::Use => {
            if body.params.iter().any(|p| p.name == r.name) {
                let q = parameter_qualified_name(body.member_qname, &r.name);
                links.insert(id("Variable", &q), "Uses");
            } else {
                for t in index.resolve(&r.name, &["Variable", "Property", "Event"], &body.class, &body.namespace) {
                    let link_type = if t.type_id == "Event" { "Handles" } else { "Uses" };
                    links.insert(t.id.clone(), link_type);
                }
            }
        }
    }
    for (child, link_type) in &links {
        kb.add_link(link_type, &body.member_id, child)?;
    }
    Ok(links.len())
}
