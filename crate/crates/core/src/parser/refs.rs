//! Reference extraction from member bodies.
//!
//! Statement structure is discarded: a body reduces to the set of names it
//! calls, instantiates or otherwise uses. Locals are collected in one
//! left-to-right pass and shadow the whole body regardless of where they are
//! declared.

use std::collections::{BTreeSet, HashSet};

use crate::lexer::{Token, TokenKind};
use crate::model::{Reference, ReferenceKind};

use super::types::scan_type;

/// Local declarations found in a body: declared names plus the token indices
/// that belong to declaration type spans or name sites.
#[derive(Debug, Default)]
pub(crate) struct LocalScan {
    pub names: BTreeSet<String>,
    pub excluded: HashSet<usize>,
}

fn starts_statement(prev: Option<&Token>) -> bool {
    match prev {
        None => true,
        Some(t) if t.kind == TokenKind::Punctuator => {
            matches!(t.text.as_str(), "{" | "}" | ";" | "(" | ":")
        }
        Some(t) => t.is_keyword("const"),
    }
}

fn ends_declarator(t: Option<&Token>) -> bool {
    match t {
        Some(t) => t.is_op("=") || t.is_punct(";") || t.is_punct(",") || t.is_punct(")") || t.is_keyword("in"),
        None => false,
    }
}

pub(crate) fn scan_locals(body: &[Token]) -> LocalScan {
    let mut scan = LocalScan::default();
    let mut i = 0;
    while i < body.len() {
        let prev = i.checked_sub(1).map(|p| &body[p]);
        if !starts_statement(prev) {
            i += 1;
            continue;
        }
        let Some((type_end, _)) = scan_type(body, i) else {
            i += 1;
            continue;
        };
        let is_decl = body.get(type_end).is_some_and(|t| t.is_ident()) && ends_declarator(body.get(type_end + 1));
        if !is_decl {
            i += 1;
            continue;
        }
        scan.excluded.extend(i..=type_end);
        scan.names.insert(body[type_end].text.clone());
        i = scan_more_declarators(body, type_end + 1, &mut scan);
    }
    scan
}

/// Continue after the first declarator name, picking up `, name` declarators
/// at nesting depth zero. Stops at `;`, or at a closer that leaves the
/// declaration (the `)` of a `for`/`using` header).
fn scan_more_declarators(body: &[Token], mut i: usize, scan: &mut LocalScan) -> usize {
    let mut depth: i32 = 0;
    while let Some(t) = body.get(i) {
        if t.kind == TokenKind::Punctuator {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth < 0 {
                        return i;
                    }
                }
                ";" if depth == 0 => return i,
                "," if depth == 0
                    && body.get(i + 1).is_some_and(|n| n.is_ident())
                    && ends_declarator(body.get(i + 2)) =>
                {
                    scan.excluded.insert(i + 1);
                    scan.names.insert(body[i + 1].text.clone());
                    i += 2;
                    continue;
                }
                _ => {}
            }
        } else if t.is_keyword("in") && depth == 0 {
            return i;
        }
        i += 1;
    }
    i
}

/// Names declared as locals anywhere in `body` (`Type name ...;`,
/// `foreach (Type name in ...)`, `catch (Type name)` and `for`/`using` headers).
pub fn collect_locals(body: &[Token]) -> BTreeSet<String> {
    scan_locals(body).names
}

/// Reduce a member body to its references.
///
/// Identifiers followed by `(` are calls, identifiers after `new` are
/// instantiations, and every other identifier is a use. For a dotted chain
/// `a.b.c(...)` only `c` is the call and `a` is recorded as a use. Names in
/// `locals` are dropped unless reached through `this.`/`base.` or also present
/// in `params`. Each (kind, name) pair is reported once, at its first position.
pub fn extract_references(
    body: &[Token],
    locals: &BTreeSet<String>,
    params: &BTreeSet<String>,
    fields: &BTreeSet<String>,
) -> Vec<Reference> {
    let scan = scan_locals(body);
    let mut out = Collector::default();
    let shadowed = |name: &str| locals.contains(name) && !params.contains(name);
    let known_member = |name: &str| params.contains(name) || (fields.contains(name) && !shadowed(name));
    let mut k = 0;
    while k < body.len() {
        if scan.excluded.contains(&k) {
            k += 1;
            continue;
        }
        let t = &body[k];
        let member_access = (t.is_keyword("this") || t.is_keyword("base"))
            && body.get(k + 1).is_some_and(|d| d.is_punct("."))
            && body.get(k + 2).is_some_and(|n| n.is_ident());
        if member_access {
            let end = chain_end(body, k + 2, &scan.excluded);
            let segments = &body[k + 2..end];
            classify(body, k, segments, end, true, &known_member, &shadowed, &mut out);
            k = end;
            continue;
        }
        if !t.is_ident() {
            k += 1;
            continue;
        }
        let end = chain_end(body, k, &scan.excluded);
        let segments = &body[k..end];
        let after_dot = k > 0 && body[k - 1].is_punct(".");
        if k > 0 && body[k - 1].is_keyword("new") {
            // Object creation: the whole type, generic arguments included, is
            // one instantiation. Array creation mentions a type only.
            let type_end = scan_type(body, k).map_or(end, |(e, _)| e.max(end));
            if !body.get(type_end).is_some_and(|n| n.is_punct("[")) {
                out.push(ReferenceKind::Instantiate, &dotted(segments), &segments[0]);
            }
            k = type_end;
            continue;
        }
        if after_dot {
            // Member of an arbitrary expression: only a trailing call is kept.
            if body.get(end).is_some_and(|n| n.is_punct("(")) {
                let last = segments.last().expect("chain is nonempty");
                out.push(ReferenceKind::Call, &last.text, last);
            }
        } else {
            classify(body, k, segments, end, false, &known_member, &shadowed, &mut out);
        }
        k = end;
    }
    out.refs
}

#[allow(clippy::too_many_arguments)]
fn classify(
    body: &[Token],
    start: usize,
    segments: &[Token],
    end: usize,
    explicit_member: bool,
    known_member: &dyn Fn(&str) -> bool,
    shadowed: &dyn Fn(&str) -> bool,
    out: &mut Collector,
) {
    let before = start.checked_sub(1).map(|p| &body[p]);
    let after = body.get(end);
    let first = &segments[0];
    let last = segments.last().expect("chain is nonempty");
    if before.is_some_and(|b| b.is_keyword("is") || b.is_keyword("as")) {
        return;
    }
    if start >= 2 && body[start - 1].is_punct("(") && body[start - 2].is_keyword("typeof") {
        return;
    }
    let receiver_kept = explicit_member || !shadowed(&first.text);
    if after.is_some_and(|a| a.is_punct("(")) {
        out.push(ReferenceKind::Call, &last.text, last);
        if segments.len() > 1 && receiver_kept {
            out.push(ReferenceKind::Use, &first.text, first);
        }
    } else if receiver_kept {
        // A chain rooted at a parameter or field is a use of that root.
        if explicit_member || known_member(&first.text) {
            out.push(ReferenceKind::Use, &first.text, first);
        } else {
            out.push(ReferenceKind::Use, &dotted(segments), first);
        }
    }
}

fn chain_end(body: &[Token], start: usize, excluded: &HashSet<usize>) -> usize {
    let mut e = start + 1;
    while body.get(e).is_some_and(|t| t.is_punct("."))
        && body.get(e + 1).is_some_and(|t| t.is_ident())
        && !excluded.contains(&(e + 1))
    {
        e += 2;
    }
    e
}

fn dotted(segments: &[Token]) -> String {
    segments
        .iter()
        .filter(|t| t.is_ident())
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(".")
}

#[derive(Default)]
struct Collector {
    seen: HashSet<(ReferenceKind, String)>,
    refs: Vec<Reference>,
}

impl Collector {
    fn push(&mut self, kind: ReferenceKind, name: &str, at: &Token) {
        if self.seen.insert((kind, name.to_string())) {
            self.refs.push(Reference {
                kind,
                name: name.to_string(),
                pos: at.pos.clone(),
            });
        }
    }
}

/// Union of reference lists, keeping the first occurrence of each (kind, name).
pub(crate) fn merge_reference_lists(lists: impl IntoIterator<Item = Vec<Reference>>) -> Vec<Reference> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for list in lists {
        for r in list {
            if seen.insert((r.kind, r.name.clone())) {
                out.push(r);
            }
        }
    }
    out
}
