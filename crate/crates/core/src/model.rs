//! In-memory code model: the declaration tree of a C# project with flattened
//! per-body reference lists.
//!
//! Every declaration carries its fully qualified name. Qualified names follow
//! lexical nesting (`Ns.Outer.Inner.Member`); same-named members of a class
//! after the first receive an ordinal suffix `#k` (k = 1, 2, ...).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexer::SourcePosition;

/// Name of the synthetic namespace holding types declared outside any
/// `namespace` block.
pub const GLOBAL_NAMESPACE: &str = "global";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Access {
    Public,
    Private,
    Other,
}

impl Access {
    pub fn as_str(self) -> &'static str {
        match self {
            Access::Public => "Public",
            Access::Private => "Private",
            Access::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Public" => Some(Access::Public),
            "Private" => Some(Access::Private),
            "Other" => Some(Access::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    Class,
    Struct,
    Interface,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Class => "Class",
            ClassKind::Struct => "Struct",
            ClassKind::Interface => "Interface",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Class" => Some(ClassKind::Class),
            "Struct" => Some(ClassKind::Struct),
            "Interface" => Some(ClassKind::Interface),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReferenceKind {
    Call,
    Use,
    Instantiate,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Call => "Call",
            ReferenceKind::Use => "Use",
            ReferenceKind::Instantiate => "Instantiate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Call" => Some(ReferenceKind::Call),
            "Use" => Some(ReferenceKind::Use),
            "Instantiate" => Some(ReferenceKind::Instantiate),
            _ => None,
        }
    }
}

/// A name occurrence inside a member body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reference {
    pub kind: ReferenceKind,
    pub name: String,
    pub pos: SourcePosition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamDecl {
    pub name: String,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub return_type: String,
    pub parameters: Vec<ParamDecl>,
    pub references: Vec<Reference>,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructorDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub parameters: Vec<ParamDecl>,
    pub references: Vec<Reference>,
    pub is_static: bool,
}

/// Property; accessor bodies contribute `references`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub type_name: String,
    pub references: Vec<Reference>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelegateDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    /// `ReturnType(ParamType name, ...)`
    pub signature: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub name: String,
    pub qualified_name: String,
    pub access: Access,
    pub kind: ClassKind,
    pub base_types: Vec<String>,
    pub constructors: Vec<ConstructorDecl>,
    pub methods: Vec<MethodDecl>,
    pub properties: Vec<PropertyDecl>,
    pub fields: Vec<FieldDecl>,
    pub events: Vec<EventDecl>,
    pub nested_classes: Vec<ClassDecl>,
    pub delegates: Vec<DelegateDecl>,
}

impl ClassDecl {
    pub fn new(name: &str, qualified_name: &str, access: Access, kind: ClassKind) -> Self {
        Self {
            name: name.to_string(),
            qualified_name: qualified_name.to_string(),
            access,
            kind,
            base_types: Vec::new(),
            constructors: Vec::new(),
            methods: Vec::new(),
            properties: Vec::new(),
            fields: Vec::new(),
            events: Vec::new(),
            nested_classes: Vec::new(),
            delegates: Vec::new(),
        }
    }

    /// Qualified names of the direct (non-class) members in this class.
    pub fn member_qualified_names(&self) -> impl Iterator<Item = &str> {
        self.constructors
            .iter()
            .map(|m| m.qualified_name.as_str())
            .chain(self.methods.iter().map(|m| m.qualified_name.as_str()))
            .chain(self.properties.iter().map(|m| m.qualified_name.as_str()))
            .chain(self.fields.iter().map(|m| m.qualified_name.as_str()))
            .chain(self.events.iter().map(|m| m.qualified_name.as_str()))
            .chain(self.delegates.iter().map(|m| m.qualified_name.as_str()))
    }

    fn canonicalize(&mut self) {
        self.constructors.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        self.methods.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        self.properties.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        self.fields.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        self.events.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        self.delegates.sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        for c in &mut self.constructors {
            sort_references(&mut c.references);
        }
        for m in &mut self.methods {
            sort_references(&mut m.references);
        }
        for p in &mut self.properties {
            sort_references(&mut p.references);
        }
        for n in &mut self.nested_classes {
            n.canonicalize();
        }
        self.nested_classes
            .sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
    }

    pub fn walk_classes<'a>(&'a self, out: &mut Vec<&'a ClassDecl>) {
        out.push(self);
        for n in &self.nested_classes {
            n.walk_classes(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamespaceDecl {
    pub qualified_name: String,
    pub usings: Vec<String>,
    pub classes: Vec<ClassDecl>,
    pub delegates: Vec<DelegateDecl>,
}

impl NamespaceDecl {
    pub fn new(qualified_name: &str) -> Self {
        Self {
            qualified_name: qualified_name.to_string(),
            usings: Vec::new(),
            classes: Vec::new(),
            delegates: Vec::new(),
        }
    }

    /// All classes in this namespace, outer classes before their nested ones.
    pub fn all_classes(&self) -> Vec<&ClassDecl> {
        let mut out = Vec::new();
        for c in &self.classes {
            c.walk_classes(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeModel {
    pub namespaces: Vec<NamespaceDecl>,
    /// References the population pass could not bind to any declaration.
    /// Filled by project extraction; not part of the XML form.
    #[serde(default)]
    pub unresolved_report: Vec<(String, SourcePosition)>,
}

impl CodeModel {
    pub fn is_empty(&self) -> bool {
        self.namespaces.is_empty()
    }

    /// Sort every child list into canonical order: declarations by
    /// (name, qualified name), references by (name, kind, position), usings
    /// lexicographically. Parameter and base-type order is significant and
    /// kept as declared.
    pub fn canonicalize(&mut self) {
        for ns in &mut self.namespaces {
            ns.usings.sort();
            ns.usings.dedup();
            for c in &mut ns.classes {
                c.canonicalize();
            }
            ns.classes
                .sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
            ns.delegates
                .sort_by(|a, b| by_name(&a.name, &a.qualified_name, &b.name, &b.qualified_name));
        }
        self.namespaces
            .sort_by(|a, b| a.qualified_name.cmp(&b.qualified_name));
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn namespace(&self, qualified_name: &str) -> Option<&NamespaceDecl> {
        self.namespaces.iter().find(|n| n.qualified_name == qualified_name)
    }

    /// Depth-first lookup of a class by qualified name.
    pub fn class(&self, qualified_name: &str) -> Option<&ClassDecl> {
        self.namespaces
            .iter()
            .flat_map(|n| n.all_classes())
            .find(|c| c.qualified_name == qualified_name)
    }

    pub fn parameter_count(&self) -> usize {
        self.namespaces
            .iter()
            .flat_map(|n| n.all_classes())
            .map(|c| {
                c.methods.iter().map(|m| m.parameters.len()).sum::<usize>()
                    + c.constructors.iter().map(|m| m.parameters.len()).sum::<usize>()
            })
            .sum()
    }
}

fn by_name(a_name: &str, a_q: &str, b_name: &str, b_q: &str) -> Ordering {
    a_name.cmp(b_name).then_with(|| a_q.cmp(b_q))
}

pub(crate) fn reference_order(a: &Reference, b: &Reference) -> Ordering {
    a.name
        .cmp(&b.name)
        .then_with(|| a.kind.cmp(&b.kind))
        .then_with(|| a.pos.line.cmp(&b.pos.line))
        .then_with(|| a.pos.column.cmp(&b.pos.column))
        .then_with(|| a.pos.file.cmp(&b.pos.file))
}

fn sort_references(refs: &mut [Reference]) {
    refs.sort_by(reference_order);
}

/// Qualified name of a member declared in `class_qname`, disambiguated against
/// names already taken in that class.
pub(crate) fn member_qualified_name(
    class_qname: &str,
    name: &str,
    taken: &std::collections::HashSet<String>,
) -> String {
    let base = format!("{class_qname}.{name}");
    if !taken.contains(&base) {
        return base;
    }
    (1..)
        .map(|k| format!("{base}#{k}"))
        .find(|q| !taken.contains(q))
        .expect("unbounded ordinal search")
}

/// Qualified name of a parameter: the owning member's qualified name plus the
/// parameter name.
pub fn parameter_qualified_name(member_qname: &str, param: &str) -> String {
    format!("{member_qname}.{param}")
}
