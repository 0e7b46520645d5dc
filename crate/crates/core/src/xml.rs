//! Canonical XML form of a [`CodeModel`] (`*.codemodel.xml`, schema 1.0).
//!
//! Layout rules: no XML declaration, root `<CodeModel version="1.0">`, two
//! spaces of indentation per level, LF line endings and a trailing newline.
//! Childless elements self-close. Attributes appear in the fixed order
//! `name qualifiedName access kind type returnType signature refKind line
//! column file`, each only on the elements that carry it. Children are grouped
//! by element name in lexicographic order and, within a group, sorted by
//! `name` (then `qualifiedName`). `Parameter` and `BaseType` children keep
//! declaration order because their position is meaningful.
//!
//! | element     | attributes                                   | children |
//! |-------------|----------------------------------------------|----------|
//! | CodeModel   | version                                      | Namespace |
//! | Namespace   | name qualifiedName                           | Class Delegate Using |
//! | Using       | name                                         | |
//! | Class       | name qualifiedName access kind               | BaseType Class Constructor Delegate Event Method Property Variable |
//! | BaseType    | name                                         | |
//! | Constructor | name qualifiedName access kind               | Parameter Reference |
//! | Method      | name qualifiedName access kind returnType    | Parameter Reference |
//! | Property    | name qualifiedName access type               | Reference |
//! | Variable    | name qualifiedName access type               | |
//! | Event       | name qualifiedName access type               | |
//! | Delegate    | name qualifiedName access signature          | |
//! | Parameter   | name type                                    | |
//! | Reference   | name refKind line column file                | |
//!
//! `kind` is `Class|Struct|Interface` on classes and `Static|Instance` on
//! constructors and methods; `access` is `Public|Private|Other`; `refKind` is
//! `Call|Use|Instantiate`.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use crate::lexer::SourcePosition;
use crate::model::{
    Access, ClassDecl, ClassKind, CodeModel, ConstructorDecl, DelegateDecl, EventDecl, FieldDecl,
    MethodDecl, NamespaceDecl, ParamDecl, PropertyDecl, Reference, ReferenceKind,
};

pub const SCHEMA_VERSION: &str = "1.0";

/// Conventional file suffix for serialized code models.
pub const FILE_SUFFIX: &str = ".codemodel.xml";

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmlError {
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("unsupported schema version {found:?} (expected {SCHEMA_VERSION})")]
    VersionMismatch { found: String },
}

fn violation(msg: impl Into<String>) -> XmlError {
    XmlError::SchemaViolation(msg.into())
}

// ---------------------------------------------------------------- emission

struct Writer {
    out: String,
}

/// One element about to be written: its attributes in final order and its
/// already-ordered children.
struct Node {
    name: &'static str,
    attrs: Vec<(&'static str, String)>,
    children: Vec<Node>,
}

impl Node {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    fn attr(mut self, key: &'static str, value: impl Into<String>) -> Self {
        self.attrs.push((key, value.into()));
        self
    }
}

impl Writer {
    fn node(&mut self, node: &Node, depth: usize) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push('<');
        self.out.push_str(node.name);
        for (k, v) in &node.attrs {
            let _ = write!(self.out, " {k}=\"");
            escape_attr(&mut self.out, v);
            self.out.push('"');
        }
        if node.children.is_empty() {
            self.out.push_str("/>\n");
            return;
        }
        self.out.push_str(">\n");
        for c in &node.children {
            self.node(c, depth + 1);
        }
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        let _ = writeln!(self.out, "</{}>", node.name);
    }
}

fn escape_attr(out: &mut String, v: &str) {
    for c in v.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

/// Serialize a model to canonical XML text.
pub fn emit_xml(model: &CodeModel) -> String {
    let model = model.clone().canonicalized();
    let mut root = Node::new("CodeModel").attr("version", SCHEMA_VERSION);
    root.children = model.namespaces.iter().map(namespace_node).collect();
    let mut w = Writer { out: String::new() };
    w.node(&root, 0);
    w.out
}

fn decl(name: &'static str, short: &str, qualified: &str, access: Access) -> Node {
    Node::new(name)
        .attr("name", short)
        .attr("qualifiedName", qualified)
        .attr("access", access.as_str())
}

fn namespace_node(ns: &NamespaceDecl) -> Node {
    let mut n = Node::new("Namespace")
        .attr("name", ns.qualified_name.as_str())
        .attr("qualifiedName", ns.qualified_name.as_str());
    n.children.extend(ns.classes.iter().map(class_node));
    n.children.extend(ns.delegates.iter().map(delegate_node));
    n.children
        .extend(ns.usings.iter().map(|u| Node::new("Using").attr("name", u.as_str())));
    n
}

fn class_node(c: &ClassDecl) -> Node {
    let mut n = decl("Class", &c.name, &c.qualified_name, c.access).attr("kind", c.kind.as_str());
    n.children
        .extend(c.base_types.iter().map(|b| Node::new("BaseType").attr("name", b.as_str())));
    n.children.extend(c.nested_classes.iter().map(class_node));
    n.children.extend(c.constructors.iter().map(constructor_node));
    n.children.extend(c.delegates.iter().map(delegate_node));
    n.children.extend(c.events.iter().map(event_node));
    n.children.extend(c.methods.iter().map(method_node));
    n.children.extend(c.properties.iter().map(property_node));
    n.children.extend(c.fields.iter().map(field_node));
    n
}

fn static_kind(is_static: bool) -> &'static str {
    if is_static {
        "Static"
    } else {
        "Instance"
    }
}

fn body_children(n: &mut Node, params: &[ParamDecl], refs: &[Reference]) {
    n.children.extend(params.iter().map(|p| {
        Node::new("Parameter")
            .attr("name", p.name.as_str())
            .attr("type", p.type_name.as_str())
    }));
    n.children.extend(refs.iter().map(reference_node));
}

fn constructor_node(c: &ConstructorDecl) -> Node {
    let mut n = decl("Constructor", &c.name, &c.qualified_name, c.access).attr("kind", static_kind(c.is_static));
    body_children(&mut n, &c.parameters, &c.references);
    n
}

fn method_node(m: &MethodDecl) -> Node {
    let mut n = decl("Method", &m.name, &m.qualified_name, m.access)
        .attr("kind", static_kind(m.is_static))
        .attr("returnType", m.return_type.as_str());
    body_children(&mut n, &m.parameters, &m.references);
    n
}

fn property_node(p: &PropertyDecl) -> Node {
    let mut n = decl("Property", &p.name, &p.qualified_name, p.access).attr("type", p.type_name.as_str());
    body_children(&mut n, &[], &p.references);
    n
}

fn field_node(f: &FieldDecl) -> Node {
    decl("Variable", &f.name, &f.qualified_name, f.access).attr("type", f.type_name.as_str())
}

fn event_node(e: &EventDecl) -> Node {
    decl("Event", &e.name, &e.qualified_name, e.access).attr("type", e.type_name.as_str())
}

fn delegate_node(d: &DelegateDecl) -> Node {
    decl("Delegate", &d.name, &d.qualified_name, d.access).attr("signature", d.signature.as_str())
}

fn reference_node(r: &Reference) -> Node {
    Node::new("Reference")
        .attr("name", r.name.as_str())
        .attr("refKind", r.kind.as_str())
        .attr("line", r.pos.line.to_string())
        .attr("column", r.pos.column.to_string())
        .attr("file", r.pos.file.as_str())
}

// ----------------------------------------------------------------- parsing

/// Element as read from the document, before schema mapping.
#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
}

impl Element {
    fn expect_attrs(&self, allowed: &[&str]) -> Result<(), XmlError> {
        for (k, _) in &self.attrs {
            if !allowed.contains(&k.as_str()) {
                return Err(violation(format!("unknown attribute {k:?} on <{}>", self.name)));
            }
        }
        for a in allowed {
            if !self.attrs.iter().any(|(k, _)| k == a) {
                return Err(violation(format!("<{}> is missing required attribute {a:?}", self.name)));
            }
        }
        Ok(())
    }

    fn attr(&self, key: &str) -> &str {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_default()
    }

    fn access(&self) -> Result<Access, XmlError> {
        Access::parse(self.attr("access")).ok_or_else(|| violation(format!("bad access {:?}", self.attr("access"))))
    }

    fn is_static(&self) -> Result<bool, XmlError> {
        match self.attr("kind") {
            "Static" => Ok(true),
            "Instance" => Ok(false),
            other => Err(violation(format!("bad member kind {other:?}"))),
        }
    }

    fn leaf(&self) -> Result<(), XmlError> {
        match self.children.first() {
            Some(c) => Err(violation(format!("<{}> may not contain <{}>", self.name, c.name))),
            None => Ok(()),
        }
    }

    fn unexpected(&self, child: &Element) -> XmlError {
        violation(format!("unexpected <{}> inside <{}>", child.name, self.name))
    }
}

fn read_start(e: &BytesStart<'_>) -> Result<Element, XmlError> {
    let name = std::str::from_utf8(e.name().as_ref())
        .map_err(|_| violation("element name is not UTF-8"))?
        .to_string();
    let mut attrs: Vec<(String, String)> = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(|err| violation(format!("malformed attribute: {err}")))?;
        let key = std::str::from_utf8(a.key.as_ref())
            .map_err(|_| violation("attribute name is not UTF-8"))?
            .to_string();
        let value = a
            .unescape_value()
            .map_err(|err| violation(format!("bad attribute value: {err}")))?
            .into_owned();
        if attrs.iter().any(|(k, _)| *k == key) {
            return Err(violation(format!("duplicate attribute {key:?}")));
        }
        attrs.push((key, value));
    }
    Ok(Element {
        name,
        attrs,
        children: Vec::new(),
    })
}

fn read_tree(doc: &str) -> Result<Element, XmlError> {
    let mut reader = Reader::from_str(doc);
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    loop {
        let event = reader
            .read_event()
            .map_err(|e| violation(format!("malformed XML: {e}")))?;
        match event {
            Event::Start(e) | Event::Empty(e) if root.is_some() => {
                let _ = e;
                return Err(violation("content after the root element"));
            }
            Event::Start(e) => {
                if stack.len() >= MAX_DEPTH {
                    return Err(violation("element nesting too deep"));
                }
                stack.push(read_start(&e)?);
            }
            Event::Empty(e) => {
                let el = read_start(&e)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| violation("unbalanced end tag"))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::Text(t) => {
                if !t.iter().all(|b| b.is_ascii_whitespace()) {
                    return Err(violation("unexpected text content"));
                }
            }
            Event::CData(_) => return Err(violation("unexpected CDATA")),
            Event::Decl(_) | Event::Comment(_) => {}
            Event::PI(_) | Event::DocType(_) => return Err(violation("unexpected markup")),
            Event::Eof => break,
        }
    }
    if !stack.is_empty() {
        return Err(violation("unclosed element"));
    }
    root.ok_or_else(|| violation("empty document"))
}

/// Read a canonical code-model document back into a [`CodeModel`].
pub fn parse_xml(doc: &str) -> Result<CodeModel, XmlError> {
    let root = read_tree(doc)?;
    if root.name != "CodeModel" {
        return Err(violation(format!("root element is <{}>, expected <CodeModel>", root.name)));
    }
    root.expect_attrs(&["version"])?;
    let version = root.attr("version");
    if version != SCHEMA_VERSION {
        return Err(XmlError::VersionMismatch {
            found: version.to_string(),
        });
    }
    let mut model = CodeModel::default();
    for child in &root.children {
        if child.name != "Namespace" {
            return Err(root.unexpected(child));
        }
        model.namespaces.push(namespace_from(child)?);
    }
    Ok(model.canonicalized())
}

fn namespace_from(el: &Element) -> Result<NamespaceDecl, XmlError> {
    el.expect_attrs(&["name", "qualifiedName"])?;
    let mut ns = NamespaceDecl::new(el.attr("qualifiedName"));
    for c in &el.children {
        match c.name.as_str() {
            "Class" => ns.classes.push(class_from(c)?),
            "Delegate" => ns.delegates.push(delegate_from(c)?),
            "Using" => {
                c.expect_attrs(&["name"])?;
                c.leaf()?;
                ns.usings.push(c.attr("name").to_string());
            }
            _ => return Err(el.unexpected(c)),
        }
    }
    Ok(ns)
}

fn class_from(el: &Element) -> Result<ClassDecl, XmlError> {
    el.expect_attrs(&["name", "qualifiedName", "access", "kind"])?;
    let kind = ClassKind::parse(el.attr("kind")).ok_or_else(|| violation(format!("bad class kind {:?}", el.attr("kind"))))?;
    let mut c = ClassDecl::new(el.attr("name"), el.attr("qualifiedName"), el.access()?, kind);
    for child in &el.children {
        match child.name.as_str() {
            "BaseType" => {
                child.expect_attrs(&["name"])?;
                child.leaf()?;
                c.base_types.push(child.attr("name").to_string());
            }
            "Class" => c.nested_classes.push(class_from(child)?),
            "Constructor" => {
                child.expect_attrs(&["name", "qualifiedName", "access", "kind"])?;
                let (parameters, references) = body_from(child, true)?;
                c.constructors.push(ConstructorDecl {
                    name: child.attr("name").to_string(),
                    qualified_name: child.attr("qualifiedName").to_string(),
                    access: child.access()?,
                    parameters,
                    references,
                    is_static: child.is_static()?,
                });
            }
            "Method" => {
                child.expect_attrs(&["name", "qualifiedName", "access", "kind", "returnType"])?;
                let (parameters, references) = body_from(child, true)?;
                c.methods.push(MethodDecl {
                    name: child.attr("name").to_string(),
                    qualified_name: child.attr("qualifiedName").to_string(),
                    access: child.access()?,
                    return_type: child.attr("returnType").to_string(),
                    parameters,
                    references,
                    is_static: child.is_static()?,
                });
            }
            "Property" => {
                child.expect_attrs(&["name", "qualifiedName", "access", "type"])?;
                let (_, references) = body_from(child, false)?;
                c.properties.push(PropertyDecl {
                    name: child.attr("name").to_string(),
                    qualified_name: child.attr("qualifiedName").to_string(),
                    access: child.access()?,
                    type_name: child.attr("type").to_string(),
                    references,
                });
            }
            "Variable" => {
                child.expect_attrs(&["name", "qualifiedName", "access", "type"])?;
                child.leaf()?;
                c.fields.push(FieldDecl {
                    name: child.attr("name").to_string(),
                    qualified_name: child.attr("qualifiedName").to_string(),
                    access: child.access()?,
                    type_name: child.attr("type").to_string(),
                });
            }
            "Event" => {
                child.expect_attrs(&["name", "qualifiedName", "access", "type"])?;
                child.leaf()?;
                c.events.push(EventDecl {
                    name: child.attr("name").to_string(),
                    qualified_name: child.attr("qualifiedName").to_string(),
                    access: child.access()?,
                    type_name: child.attr("type").to_string(),
                });
            }
            "Delegate" => c.delegates.push(delegate_from(child)?),
            _ => return Err(el.unexpected(child)),
        }
    }
    Ok(c)
}

fn delegate_from(el: &Element) -> Result<DelegateDecl, XmlError> {
    el.expect_attrs(&["name", "qualifiedName", "access", "signature"])?;
    el.leaf()?;
    Ok(DelegateDecl {
        name: el.attr("name").to_string(),
        qualified_name: el.attr("qualifiedName").to_string(),
        access: el.access()?,
        signature: el.attr("signature").to_string(),
    })
}

fn body_from(el: &Element, with_params: bool) -> Result<(Vec<ParamDecl>, Vec<Reference>), XmlError> {
    let mut params = Vec::new();
    let mut refs = Vec::new();
    for c in &el.children {
        match c.name.as_str() {
            "Parameter" if with_params => {
                c.expect_attrs(&["name", "type"])?;
                c.leaf()?;
                if c.attr("name").is_empty() {
                    return Err(violation("empty parameter name"));
                }
                params.push(ParamDecl {
                    name: c.attr("name").to_string(),
                    type_name: c.attr("type").to_string(),
                });
            }
            "Reference" => {
                c.expect_attrs(&["name", "refKind", "line", "column", "file"])?;
                c.leaf()?;
                let kind = ReferenceKind::parse(c.attr("refKind"))
                    .ok_or_else(|| violation(format!("bad refKind {:?}", c.attr("refKind"))))?;
                let number = |key: &str| -> Result<u32, XmlError> {
                    c.attr(key)
                        .parse::<u32>()
                        .ok()
                        .filter(|n| *n >= 1)
                        .ok_or_else(|| violation(format!("bad {key} {:?}", c.attr(key))))
                };
                refs.push(Reference {
                    kind,
                    name: c.attr("name").to_string(),
                    pos: SourcePosition::new(c.attr("file"), number("line")?, number("column")?),
                });
            }
            _ => return Err(el.unexpected(c)),
        }
    }
    Ok((params, refs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model() {
        assert_eq!(emit_xml(&CodeModel::default()), "<CodeModel version=\"1.0\"/>\n");
        assert_eq!(parse_xml("<CodeModel version=\"1.0\"/>").unwrap(), CodeModel::default());
    }

    #[test]
    fn single_empty_namespace() {
        let mut m = CodeModel::default();
        m.namespaces.push(NamespaceDecl::new("A"));
        let xml = emit_xml(&m);
        assert_eq!(
            xml,
            "<CodeModel version=\"1.0\">\n  <Namespace name=\"A\" qualifiedName=\"A\"/>\n</CodeModel>\n"
        );
        assert_eq!(parse_xml(&xml).unwrap(), m);
    }

    #[test]
    fn wrong_root_is_a_schema_violation() {
        assert!(matches!(parse_xml("<Other/>"), Err(XmlError::SchemaViolation(_))));
    }

    #[test]
    fn version_mismatch() {
        assert_eq!(
            parse_xml("<CodeModel version=\"2.0\"/>"),
            Err(XmlError::VersionMismatch { found: "2.0".into() })
        );
    }

    #[test]
    fn schema_violations() {
        let bad = [
            "",
            "<CodeModel/>",
            "<CodeModel version=\"1.0\"><Bogus/></CodeModel>",
            "<CodeModel version=\"1.0\"><Namespace qualifiedName=\"A\"/></CodeModel>",
            "<CodeModel version=\"1.0\"><Namespace name=\"A\" qualifiedName=\"A\" extra=\"1\"/></CodeModel>",
            "<CodeModel version=\"1.0\">text</CodeModel>",
            "<CodeModel version=\"1.0\"><Namespace name=\"A\" qualifiedName=\"A\">",
            "<CodeModel version=\"1.0\"/><CodeModel version=\"1.0\"/>",
            "<CodeModel version=\"1.0\"><Namespace name=\"A\" qualifiedName=\"A\"><Class name=\"B\" qualifiedName=\"A.B\" access=\"Secret\" kind=\"Class\"/></Namespace></CodeModel>",
            "<CodeModel version=\"1.0\"><Namespace name=\"A\" qualifiedName=\"A\"><Using name=\"S\"><Using name=\"T\"/></Using></Namespace></CodeModel>",
        ];
        for doc in bad {
            assert!(matches!(parse_xml(doc), Err(XmlError::SchemaViolation(_))), "{doc:?}");
        }
    }

    #[test]
    fn escapes_survive() {
        let mut m = CodeModel::default();
        let mut ns = NamespaceDecl::new("A");
        let mut c = ClassDecl::new("B", "A.B", Access::Public, ClassKind::Class);
        c.fields.push(FieldDecl {
            name: "map".into(),
            qualified_name: "A.B.map".into(),
            access: Access::Private,
            type_name: "Dictionary<string,List<int>>".into(),
        });
        c.base_types.push("I<\"&'\t\n>".into());
        ns.classes.push(c);
        m.namespaces.push(ns);
        let xml = emit_xml(&m);
        assert!(xml.contains("type=\"Dictionary&lt;string,List&lt;int&gt;&gt;\""));
        assert_eq!(parse_xml(&xml).unwrap(), m);
    }

    #[test]
    fn nesting_limit() {
        let mut doc = String::from("<CodeModel version=\"1.0\"><Namespace name=\"A\" qualifiedName=\"A\">");
        for _ in 0..300 {
            doc.push_str("<Class name=\"C\" qualifiedName=\"A.C\" access=\"Public\" kind=\"Class\">");
        }
        assert!(matches!(parse_xml(&doc), Err(XmlError::SchemaViolation(_))));
    }
}
