//! Declaration parser for C# token streams.
//!
//! Recognizes namespaces, using directives, classes, structs, interfaces,
//! constructors, methods, properties, fields, events and delegates. Member
//! bodies are not parsed as statements; they are reduced to reference lists.
//! Enums, operators, indexers and finalizers are skipped with a diagnostic.

mod merge;
mod refs;
mod types;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexer::{SourcePosition, Token, TokenKind};
use crate::model::{
    member_qualified_name, Access, ClassDecl, ClassKind, CodeModel, ConstructorDecl, DelegateDecl,
    EventDecl, FieldDecl, MethodDecl, NamespaceDecl, ParamDecl, PropertyDecl, Reference,
    GLOBAL_NAMESPACE,
};

pub use merge::{merge_models, MergeError};
pub(crate) use merge::merge_lenient;
pub use refs::{collect_locals, extract_references};

use refs::merge_reference_lists;
use types::scan_type;

/// Deepest namespace/class nesting the parser descends into.
const MAX_NESTING: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub pos: Option<SourcePosition>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pos {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}: unbalanced braces")]
    UnbalancedBraces(SourcePosition),
}

/// Declarations of one file plus the non-fatal diagnostics raised while
/// reading them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedFile {
    pub model: CodeModel,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn parse_file(tokens: &[Token]) -> Result<ParsedFile, ParseError> {
    let closers = match_braces(tokens)?;
    let mut p = Parser {
        toks: tokens,
        closers,
        i: 0,
        diagnostics: Vec::new(),
        namespaces: Vec::new(),
        depth: 0,
    };
    p.namespace_body(None, false);
    let mut spaces: Vec<NamespaceDecl> = Vec::new();
    for ns in p.namespaces {
        if ns.classes.is_empty() && ns.delegates.is_empty() && ns.usings.is_empty() && ns.qualified_name == GLOBAL_NAMESPACE {
            continue;
        }
        spaces.push(ns);
    }
    // Same-named namespace blocks and partial classes within one file combine
    // the same way separate files do.
    let partials = spaces
        .into_iter()
        .map(|ns| CodeModel {
            namespaces: vec![ns],
            unresolved_report: Vec::new(),
        })
        .collect::<Vec<_>>();
    let mut diagnostics = p.diagnostics;
    let (model, conflicts) = merge::merge_lenient(partials);
    diagnostics.extend(conflicts.into_iter().map(|e| Diagnostic {
        pos: None,
        message: e.to_string(),
    }));
    Ok(ParsedFile { model, diagnostics })
}

/// For every `{`, the index of its matching `}`.
fn match_braces(tokens: &[Token]) -> Result<HashMap<usize, usize>, ParseError> {
    let mut open: Vec<usize> = Vec::new();
    let mut closers = HashMap::new();
    for (k, t) in tokens.iter().enumerate() {
        if t.is_punct("{") {
            open.push(k);
        } else if t.is_punct("}") {
            let Some(o) = open.pop() else {
                return Err(ParseError::UnbalancedBraces(t.pos.clone()));
            };
            closers.insert(o, k);
        }
    }
    match open.pop() {
        Some(o) => Err(ParseError::UnbalancedBraces(tokens[o].pos.clone())),
        None => Ok(closers),
    }
}

#[derive(Debug, Default)]
struct Modifiers {
    public: bool,
    private: bool,
    protected: bool,
    internal: bool,
    is_static: bool,
}

impl Modifiers {
    fn access(&self, default: Access) -> Access {
        if self.public {
            Access::Public
        } else if self.private && !self.protected {
            Access::Private
        } else if self.protected || self.internal {
            Access::Other
        } else {
            default
        }
    }
}

/// Marker for a declaration that could not be read; the caller skips ahead.
struct Failed;

type PResult<T> = Result<T, Failed>;

/// Member body awaiting reference extraction once all field names of the
/// class are known.
enum PendingBody {
    Constructor(usize, Vec<Token>),
    Method(usize, Vec<Token>),
    Property(usize, Vec<Vec<Token>>),
}

struct Parser<'t> {
    toks: &'t [Token],
    closers: HashMap<usize, usize>,
    i: usize,
    diagnostics: Vec<Diagnostic>,
    namespaces: Vec<NamespaceDecl>,
    depth: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.i)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.toks.get(self.i + n)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(Failed)
        }
    }

    fn ident(&mut self) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.is_ident() => {
                self.i += 1;
                Ok(t)
            }
            _ => Err(Failed),
        }
    }

    fn qualified_ident(&mut self) -> PResult<String> {
        let mut name = self.ident()?.text.clone();
        while self.at_punct(".") && self.peek_at(1).is_some_and(|t| t.is_ident()) {
            self.i += 1;
            name.push('.');
            name.push_str(&self.ident()?.text);
        }
        Ok(name)
    }

    fn type_name(&mut self) -> PResult<String> {
        let (end, text) = scan_type(self.toks, self.i).ok_or(Failed)?;
        self.i = end;
        Ok(text)
    }

    fn diag(&mut self, at: usize, message: impl Into<String>) {
        let pos = self
            .toks
            .get(at)
            .or_else(|| self.toks.last())
            .map(|t| t.pos.clone());
        self.diagnostics.push(Diagnostic {
            pos,
            message: message.into(),
        });
    }

    /// Index of the `}` matching the `{` at `open`.
    fn matching_brace(&self, open: usize) -> usize {
        self.closers[&open]
    }

    /// Consume a `{ ... }` group and return its tokens, braces included.
    fn brace_group(&mut self) -> PResult<&'t [Token]> {
        if !self.at_punct("{") {
            return Err(Failed);
        }
        let open = self.i;
        let close = self.matching_brace(open);
        self.i = close + 1;
        Ok(&self.toks[open..=close])
    }

    /// Skip the remainder of a declaration: through a `;` or a balanced brace
    /// group, never past the `}` closing the enclosing block. Always makes
    /// progress.
    fn skip_declaration(&mut self) {
        let start = self.i;
        let mut parens = 0i32;
        while let Some(t) = self.peek() {
            if t.is_punct("}") {
                break;
            }
            if t.is_punct("{") {
                let close = self.matching_brace(self.i);
                self.i = close + 1;
                break;
            }
            if t.is_punct("(") || t.is_punct("[") {
                parens += 1;
            } else if t.is_punct(")") || t.is_punct("]") {
                parens -= 1;
            }
            self.i += 1;
            if t.is_punct(";") && parens <= 0 {
                break;
            }
        }
        if self.i == start && self.i < self.toks.len() {
            self.i += 1;
        }
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut m = Modifiers::default();
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword {
                match t.text.as_str() {
                    "public" => m.public = true,
                    "private" => m.private = true,
                    "protected" => m.protected = true,
                    "internal" => m.internal = true,
                    "static" => m.is_static = true,
                    "abstract" | "sealed" | "virtual" | "override" | "readonly" | "volatile"
                    | "extern" | "unsafe" | "new" => {}
                    _ => break,
                }
                self.i += 1;
            } else if t.is_ident_named("partial")
                && self.peek_at(1).is_some_and(|n| {
                    n.is_keyword("class") || n.is_keyword("struct") || n.is_keyword("interface") || n.is_keyword("void")
                })
            {
                self.i += 1;
            } else {
                break;
            }
        }
        m
    }

    fn namespace_slot(&mut self, qname: &str) -> usize {
        if let Some(k) = self.namespaces.iter().position(|n| n.qualified_name == qname) {
            return k;
        }
        self.namespaces.push(NamespaceDecl::new(qname));
        self.namespaces.len() - 1
    }

    /// Read namespace members until EOF (top level) or the closing `}`.
    fn namespace_body(&mut self, prefix: Option<&str>, closed: bool) {
        let ns_name = prefix.unwrap_or(GLOBAL_NAMESPACE).to_string();
        loop {
            let Some(t) = self.peek() else { return };
            if t.is_punct("}") {
                if closed {
                    return;
                }
                // Unreachable with balanced braces; keep moving regardless.
                self.i += 1;
                continue;
            }
            if t.is_punct(";") {
                self.i += 1;
                continue;
            }
            let result = if t.is_keyword("using") {
                self.using_directive(&ns_name)
            } else if t.is_keyword("namespace") {
                self.namespace_decl(prefix)
            } else {
                self.type_declaration(&ns_name)
            };
            if result.is_err() {
                self.diag(self.i.min(self.toks.len().saturating_sub(1)), "unrecognized declaration skipped");
                self.skip_declaration();
            }
        }
    }

    fn using_directive(&mut self, ns_name: &str) -> PResult<()> {
        self.i += 1;
        if self.at_punct("(") {
            return Err(Failed);
        }
        let mut target = self.qualified_ident()?;
        if self.peek().is_some_and(|t| t.is_op("=")) {
            self.i += 1;
            target = self.type_name()?;
        }
        self.expect_punct(";")?;
        let slot = self.namespace_slot(ns_name);
        self.namespaces[slot].usings.push(target);
        Ok(())
    }

    fn namespace_decl(&mut self, prefix: Option<&str>) -> PResult<()> {
        self.i += 1;
        let name = self.qualified_ident()?;
        if !self.at_punct("{") {
            return Err(Failed);
        }
        let qname = match prefix {
            Some(p) => format!("{p}.{name}"),
            None => name,
        };
        if self.depth >= MAX_NESTING {
            self.diag(self.i, "nesting too deep; block skipped");
            self.brace_group()?;
            return Ok(());
        }
        self.i += 1;
        self.namespace_slot(&qname);
        self.depth += 1;
        self.namespace_body(Some(&qname), true);
        self.depth -= 1;
        self.expect_punct("}")?;
        self.eat_punct(";");
        Ok(())
    }

    fn type_declaration(&mut self, ns_name: &str) -> PResult<()> {
        let mods = self.modifiers();
        let t = self.peek().ok_or(Failed)?;
        if let Some(kind) = class_kind(t) {
            let class = self.class_decl(&mods, kind, ns_name, Access::Other, false)?;
            let slot = self.namespace_slot(ns_name);
            self.namespaces[slot].classes.push(class);
            Ok(())
        } else if t.is_keyword("enum") {
            self.skip_enum()
        } else if t.is_keyword("delegate") {
            let taken = self.namespaces.iter().find(|n| n.qualified_name == ns_name).map(|n| {
                n.delegates.iter().map(|d| d.qualified_name.clone()).collect::<HashSet<_>>()
            });
            let d = self.delegate_decl(&mods, ns_name, Access::Other, &taken.unwrap_or_default())?;
            let slot = self.namespace_slot(ns_name);
            self.namespaces[slot].delegates.push(d);
            Ok(())
        } else {
            Err(Failed)
        }
    }

    fn skip_enum(&mut self) -> PResult<()> {
        let at = self.i;
        self.i += 1;
        let name = self.ident()?.text.clone();
        while !self.at_punct("{") {
            if self.peek().is_none() || self.at_punct(";") || self.at_punct("}") {
                return Err(Failed);
            }
            self.i += 1;
        }
        self.brace_group()?;
        self.eat_punct(";");
        self.diag(at, format!("enum {name} skipped"));
        Ok(())
    }

    fn skip_angle_group(&mut self) -> PResult<()> {
        if !self.peek().is_some_and(|t| t.is_op("<")) {
            return Ok(());
        }
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is_op("<") {
                depth += 1;
            } else if t.is_op(">") {
                depth -= 1;
                if depth == 0 {
                    self.i += 1;
                    return Ok(());
                }
            } else if t.kind == TokenKind::Punctuator && matches!(t.text.as_str(), "{" | "}" | ";" | "(" | ")") {
                return Err(Failed);
            }
            self.i += 1;
        }
        Err(Failed)
    }

    /// Skip `where` constraint clauses up to (not including) `{` or `;`.
    fn skip_constraints(&mut self) {
        if !self.peek().is_some_and(|t| t.is_ident_named("where")) {
            return;
        }
        while let Some(t) = self.peek() {
            if t.is_punct("{") || t.is_punct(";") || t.is_punct("}") {
                break;
            }
            self.i += 1;
        }
    }

    fn class_decl(
        &mut self,
        mods: &Modifiers,
        kind: ClassKind,
        container: &str,
        default_access: Access,
        _nested: bool,
    ) -> PResult<ClassDecl> {
        self.i += 1;
        let name = self.ident()?.text.clone();
        self.skip_angle_group()?;
        let qname = format!("{container}.{name}");
        let mut class = ClassDecl::new(&name, &qname, mods.access(default_access), kind);
        if self.eat_punct(":") {
            loop {
                class.base_types.push(self.type_name()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.skip_constraints();
        if !self.at_punct("{") {
            return Err(Failed);
        }
        if self.depth >= MAX_NESTING {
            self.diag(self.i, "nesting too deep; class body skipped");
            self.brace_group()?;
            self.eat_punct(";");
            return Ok(class);
        }
        self.i += 1;
        self.depth += 1;
        let member_default = if kind == ClassKind::Interface {
            Access::Public
        } else {
            Access::Private
        };
        let mut taken: HashSet<String> = HashSet::new();
        let mut pending: Vec<PendingBody> = Vec::new();
        while let Some(t) = self.peek() {
            if t.is_punct("}") {
                break;
            }
            if t.is_punct(";") {
                self.i += 1;
                continue;
            }
            let start = self.i;
            if self
                .member(&mut class, member_default, &mut taken, &mut pending)
                .is_err()
            {
                self.diag(self.i.min(self.toks.len().saturating_sub(1)), "unrecognized member skipped");
                if self.i > start && self.toks.get(self.i - 1).is_some_and(|t| t.is_punct(";")) {
                    // the failed member already ended
                } else {
                    self.skip_declaration();
                }
            }
        }
        self.depth -= 1;
        self.expect_punct("}")?;
        self.eat_punct(";");
        resolve_bodies(&mut class, pending);
        Ok(class)
    }

    fn member(
        &mut self,
        class: &mut ClassDecl,
        default_access: Access,
        taken: &mut HashSet<String>,
        pending: &mut Vec<PendingBody>,
    ) -> PResult<()> {
        let start = self.i;
        let mods = self.modifiers();
        let access = mods.access(default_access);
        let t = self.peek().ok_or(Failed)?;
        if let Some(kind) = class_kind(t) {
            let nested = self.class_decl(&mods, kind, &class.qualified_name.clone(), Access::Private, true)?;
            class.nested_classes.push(nested);
            return Ok(());
        }
        if t.is_keyword("enum") {
            return self.skip_enum();
        }
        if t.is_keyword("delegate") {
            let d = self.delegate_decl(&mods, &class.qualified_name.clone(), default_access, taken)?;
            taken.insert(d.qualified_name.clone());
            class.delegates.push(d);
            return Ok(());
        }
        if t.is_keyword("event") {
            self.i += 1;
            let ty = self.type_name()?;
            loop {
                let name = self.qualified_ident()?;
                let q = member_qualified_name(&class.qualified_name, &name, taken);
                taken.insert(q.clone());
                class.events.push(EventDecl {
                    name,
                    qualified_name: q,
                    access,
                    type_name: ty.clone(),
                });
                if self.at_punct("{") {
                    self.brace_group()?;
                    return Ok(());
                }
                if self.eat_punct(";") {
                    return Ok(());
                }
                self.expect_punct(",")?;
            }
        }
        if t.is_keyword("const") {
            self.i += 1;
            let ty = self.type_name()?;
            return self.fields(class, access, ty, taken);
        }
        if t.is_op("~") {
            self.diag(start, "finalizer skipped");
            self.skip_declaration();
            return Ok(());
        }
        if t.is_keyword("implicit") || t.is_keyword("explicit") {
            self.diag(start, "conversion operator skipped");
            self.skip_declaration();
            return Ok(());
        }
        if t.is_ident_named(&class.name) && self.peek_at(1).is_some_and(|n| n.is_punct("(")) {
            self.i += 1;
            let params = self.parameters()?;
            let mut body = Vec::new();
            if self.eat_punct(":") {
                // `: base(...)` / `: this(...)` arguments count as body tokens.
                let init_start = self.i;
                if !(self.at_keyword("base") || self.at_keyword("this")) {
                    return Err(Failed);
                }
                self.i += 1;
                self.balanced_parens()?;
                body.extend_from_slice(&self.toks[init_start..self.i]);
            }
            body.extend_from_slice(self.body_or_semicolon()?);
            let q = member_qualified_name(&class.qualified_name, &class.name, taken);
            taken.insert(q.clone());
            class.constructors.push(ConstructorDecl {
                name: class.name.clone(),
                qualified_name: q,
                access,
                parameters: params,
                references: Vec::new(),
                is_static: mods.is_static,
            });
            pending.push(PendingBody::Constructor(class.constructors.len() - 1, body));
            return Ok(());
        }
        let ty = self.type_name()?;
        let next = self.peek().ok_or(Failed)?;
        if next.is_keyword("operator") {
            self.diag(start, "operator skipped");
            self.skip_declaration();
            return Ok(());
        }
        if next.is_keyword("this") {
            self.diag(start, "indexer skipped");
            self.skip_declaration();
            return Ok(());
        }
        let name_at = self.i;
        let mut name = self.ident()?.text.clone();
        // Explicit interface implementation: `IFoo.Bar`.
        while self.at_punct(".") {
            self.i += 1;
            if self.at_keyword("this") {
                self.diag(start, "indexer skipped");
                self.skip_declaration();
                return Ok(());
            }
            name.push('.');
            name.push_str(&self.ident()?.text);
        }
        self.skip_angle_group()?;
        let next = self.peek().ok_or(Failed)?;
        if next.is_punct("(") {
            let params = self.parameters()?;
            self.skip_constraints();
            let body = self.body_or_semicolon()?.to_vec();
            let q = member_qualified_name(&class.qualified_name, &name, taken);
            taken.insert(q.clone());
            class.methods.push(MethodDecl {
                name,
                qualified_name: q,
                access,
                return_type: ty,
                parameters: params,
                references: Vec::new(),
                is_static: mods.is_static,
            });
            pending.push(PendingBody::Method(class.methods.len() - 1, body));
            Ok(())
        } else if next.is_punct("{") {
            let bodies = self.accessors()?;
            let q = member_qualified_name(&class.qualified_name, &name, taken);
            taken.insert(q.clone());
            class.properties.push(PropertyDecl {
                name,
                qualified_name: q,
                access,
                type_name: ty,
                references: Vec::new(),
            });
            pending.push(PendingBody::Property(class.properties.len() - 1, bodies));
            Ok(())
        } else if name.contains('.') {
            Err(Failed)
        } else {
            self.i = name_at;
            self.fields(class, access, ty, taken)
        }
    }

    fn fields(&mut self, class: &mut ClassDecl, access: Access, ty: String, taken: &mut HashSet<String>) -> PResult<()> {
        loop {
            let name = self.ident()?.text.clone();
            let q = member_qualified_name(&class.qualified_name, &name, taken);
            taken.insert(q.clone());
            class.fields.push(FieldDecl {
                name,
                qualified_name: q,
                access,
                type_name: ty.clone(),
            });
            if self.peek().is_some_and(|t| t.is_op("=")) {
                self.i += 1;
                self.skip_initializer()?;
            }
            if self.eat_punct(";") {
                return Ok(());
            }
            self.expect_punct(",")?;
        }
    }

    /// Skip a variable initializer up to the `,` or `;` that ends it.
    fn skip_initializer(&mut self) -> PResult<()> {
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.is_keyword("new") {
                self.i += 1;
                if let Some((end, _)) = scan_type(self.toks, self.i) {
                    self.i = end;
                }
                continue;
            }
            if t.kind == TokenKind::Punctuator {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth -= 1;
                        if depth < 0 {
                            return Err(Failed);
                        }
                    }
                    "," | ";" if depth == 0 => return Ok(()),
                    _ => {}
                }
            }
            self.i += 1;
        }
        Err(Failed)
    }

    fn balanced_parens(&mut self) -> PResult<()> {
        if !self.at_punct("(") {
            return Err(Failed);
        }
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is_punct("(") {
                depth += 1;
            } else if t.is_punct(")") {
                depth -= 1;
                if depth == 0 {
                    self.i += 1;
                    return Ok(());
                }
            } else if t.is_punct("{") || t.is_punct("}") || t.is_punct(";") {
                return Err(Failed);
            }
            self.i += 1;
        }
        Err(Failed)
    }

    fn parameters(&mut self) -> PResult<Vec<ParamDecl>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            let mut prefix = String::new();
            while let Some(t) = self.peek() {
                if t.is_keyword("ref") || t.is_keyword("out") || t.is_keyword("params") || t.is_keyword("this") {
                    prefix.push_str(&t.text);
                    prefix.push(' ');
                    self.i += 1;
                } else {
                    break;
                }
            }
            let ty = self.type_name()?;
            let name = self.ident()?.text.clone();
            if params.iter().any(|p: &ParamDecl| p.name == name) {
                return Err(Failed);
            }
            if self.peek().is_some_and(|t| t.is_op("=")) {
                self.i += 1;
                while let Some(t) = self.peek() {
                    if t.is_punct(",") || t.is_punct(")") || t.is_punct("{") || t.is_punct(";") {
                        break;
                    }
                    self.i += 1;
                }
            }
            params.push(ParamDecl {
                name,
                type_name: format!("{prefix}{ty}"),
            });
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    /// A member body: `{ ... }`, `;`, or an expression body `=> expr;`.
    fn body_or_semicolon(&mut self) -> PResult<&'t [Token]> {
        if self.at_punct("{") {
            return self.brace_group();
        }
        if self.eat_punct(";") {
            return Ok(&[]);
        }
        if self.peek().is_some_and(|t| t.is_op("=")) && self.peek_at(1).is_some_and(|t| t.is_op(">")) {
            self.i += 2;
            let start = self.i;
            while let Some(t) = self.peek() {
                if t.is_punct(";") {
                    let body = &self.toks[start..self.i];
                    self.i += 1;
                    return Ok(body);
                }
                if t.is_punct("{") {
                    self.brace_group()?;
                    continue;
                }
                if t.is_punct("}") {
                    return Err(Failed);
                }
                self.i += 1;
            }
        }
        Err(Failed)
    }

    /// Property accessor block; returns accessor bodies, with `value`
    /// marked for setters by a leading synthetic declaration.
    fn accessors(&mut self) -> PResult<Vec<Vec<Token>>> {
        self.expect_punct("{")?;
        let mut bodies = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            self.modifiers();
            let acc = self.ident()?;
            let writes = acc.text == "set" || acc.text == "add" || acc.text == "remove";
            if !(writes || acc.text == "get") {
                return Err(Failed);
            }
            let body = self.body_or_semicolon()?;
            if !body.is_empty() {
                let mut b = Vec::with_capacity(body.len() + 3);
                if writes {
                    b.extend(implicit_value_local(acc));
                }
                b.extend_from_slice(body);
                bodies.push(b);
            }
        }
        // Expression-bodied or initialized auto-property tails.
        if self.peek().is_some_and(|t| t.is_op("=")) {
            self.i += 1;
            self.skip_initializer()?;
            self.expect_punct(";")?;
        }
        Ok(bodies)
    }

    fn delegate_decl(
        &mut self,
        mods: &Modifiers,
        container: &str,
        default_access: Access,
        taken: &HashSet<String>,
    ) -> PResult<DelegateDecl> {
        self.i += 1;
        let ret = self.type_name()?;
        let name = self.ident()?.text.clone();
        self.skip_angle_group()?;
        let params = self.parameters()?;
        self.skip_constraints();
        self.expect_punct(";")?;
        let args = params
            .iter()
            .map(|p| format!("{} {}", p.type_name, p.name))
            .collect::<Vec<_>>()
            .join(", ");
        Ok(DelegateDecl {
            qualified_name: member_qualified_name(container, &name, taken),
            name,
            access: mods.access(default_access),
            signature: format!("{ret}({args})"),
        })
    }
}

fn class_kind(t: &Token) -> Option<ClassKind> {
    match t.text.as_str() {
        "class" if t.kind == TokenKind::Keyword => Some(ClassKind::Class),
        "struct" if t.kind == TokenKind::Keyword => Some(ClassKind::Struct),
        "interface" if t.kind == TokenKind::Keyword => Some(ClassKind::Interface),
        _ => None,
    }
}

/// Tokens `object value ;` positioned at the accessor keyword, so the local
/// scan treats the setter's implicit parameter as a local.
fn implicit_value_local(at: &Token) -> [Token; 3] {
    let mk = |kind, text: &str| Token {
        kind,
        text: text.to_string(),
        pos: at.pos.clone(),
    };
    [
        mk(TokenKind::Keyword, "object"),
        mk(TokenKind::Identifier, "value"),
        mk(TokenKind::Punctuator, ";"),
    ]
}

fn resolve_bodies(class: &mut ClassDecl, pending: Vec<PendingBody>) {
    let fields: BTreeSet<String> = class.fields.iter().map(|f| f.name.clone()).collect();
    let refs_of = |body: &[Token], params: &BTreeSet<String>| -> Vec<Reference> {
        let locals = collect_locals(body);
        extract_references(body, &locals, params, &fields)
    };
    for p in pending {
        match p {
            PendingBody::Constructor(k, body) => {
                let params = param_names(&class.constructors[k].parameters);
                class.constructors[k].references = refs_of(&body, &params);
            }
            PendingBody::Method(k, body) => {
                let params = param_names(&class.methods[k].parameters);
                class.methods[k].references = refs_of(&body, &params);
            }
            PendingBody::Property(k, bodies) => {
                let lists = bodies.iter().map(|b| refs_of(b, &BTreeSet::new()));
                class.properties[k].references = merge_reference_lists(lists);
            }
        }
    }
}

fn param_names(params: &[ParamDecl]) -> BTreeSet<String> {
    params.iter().map(|p| p.name.clone()).collect()
}
