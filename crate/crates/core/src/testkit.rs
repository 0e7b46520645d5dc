//! Random generators for property tests and the acceptance suite.
//!
//! Everything is driven by a caller-supplied RNG so runs are reproducible
//! from a seed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kb::{Access, Annotation, ColorKey, KnowledgeBase, BUILTIN_LINK_TYPES, BUILTIN_TYPES, CONTAINS};
use crate::lexer::SourcePosition;
use crate::model::{
    ClassDecl, ClassKind, CodeModel, ConstructorDecl, DelegateDecl, EventDecl, FieldDecl, MethodDecl, NamespaceDecl,
    ParamDecl, PropertyDecl, Reference, ReferenceKind,
};

const NAME_CHARS: &[char] = &['a', 'b', 'c', 'X', 'Y', '_', '1', 'é', 'λ'];
const TEXT_CHARS: &[char] = &[
    'a', 'Z', ' ', '<', '>', '&', '"', '\'', '[', ']', ',', '.', '\t', '\n', '\r', '#', 'ß', '中', '😀',
];

fn word<R: Rng>(rng: &mut R, alphabet: &[char], max: usize) -> String {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| *alphabet.choose(rng).expect("nonempty")).collect()
}

fn name<R: Rng>(rng: &mut R) -> String {
    word(rng, NAME_CHARS, 6)
}

fn text<R: Rng>(rng: &mut R) -> String {
    word(rng, TEXT_CHARS, 10)
}

fn access<R: Rng>(rng: &mut R) -> Access {
    *[Access::Public, Access::Private, Access::Other].choose(rng).expect("nonempty")
}

fn params<R: Rng>(rng: &mut R) -> Vec<ParamDecl> {
    (0..rng.gen_range(0..4))
        .map(|_| ParamDecl {
            name: name(rng),
            type_name: text(rng),
        })
        .collect()
}

fn references<R: Rng>(rng: &mut R) -> Vec<Reference> {
    (0..rng.gen_range(0..5))
        .map(|_| Reference {
            kind: *[ReferenceKind::Call, ReferenceKind::Use, ReferenceKind::Instantiate]
                .choose(rng)
                .expect("nonempty"),
            name: name(rng),
            pos: SourcePosition::new(text(rng), rng.gen_range(1..10_000), rng.gen_range(1..500)),
        })
        .collect()
}

fn class<R: Rng>(rng: &mut R, outer: &str, depth: u32) -> ClassDecl {
    let n = name(rng);
    let q = format!("{outer}.{n}");
    let kind = *[ClassKind::Class, ClassKind::Struct, ClassKind::Interface].choose(rng).expect("nonempty");
    let mut c = ClassDecl::new(&n, &q, access(rng), kind);
    let member = |rng: &mut R| {
        let n = name(rng);
        let q = format!("{q}.{n}");
        (n, q)
    };
    c.base_types = (0..rng.gen_range(0..3)).map(|_| text(rng)).collect();
    for _ in 0..rng.gen_range(0..3) {
        let (name, qualified_name) = member(rng);
        c.constructors.push(ConstructorDecl {
            name,
            qualified_name,
            access: access(rng),
            parameters: params(rng),
            references: references(rng),
            is_static: rng.gen_bool(0.2),
        });
    }
    for _ in 0..rng.gen_range(0..4) {
        let (name, qualified_name) = member(rng);
        c.methods.push(MethodDecl {
            name,
            qualified_name,
            access: access(rng),
            return_type: text(rng),
            parameters: params(rng),
            references: references(rng),
            is_static: rng.gen_bool(0.3),
        });
    }
    for _ in 0..rng.gen_range(0..3) {
        let (name, qualified_name) = member(rng);
        c.properties.push(PropertyDecl {
            name,
            qualified_name,
            access: access(rng),
            type_name: text(rng),
            references: references(rng),
        });
    }
    for _ in 0..rng.gen_range(0..3) {
        let (name, qualified_name) = member(rng);
        c.fields.push(FieldDecl {
            name,
            qualified_name,
            access: access(rng),
            type_name: text(rng),
        });
    }
    for _ in 0..rng.gen_range(0..2) {
        let (name, qualified_name) = member(rng);
        c.events.push(EventDecl {
            name,
            qualified_name,
            access: access(rng),
            type_name: text(rng),
        });
    }
    for _ in 0..rng.gen_range(0..2) {
        let (name, qualified_name) = member(rng);
        c.delegates.push(DelegateDecl {
            name,
            qualified_name,
            access: access(rng),
            signature: text(rng),
        });
    }
    if depth < 2 {
        for _ in 0..rng.gen_range(0..2) {
            c.nested_classes.push(class(rng, &q, depth + 1));
        }
    }
    c
}

/// A structurally arbitrary code model. Names and type strings include XML
/// metacharacters, whitespace controls and non-ASCII text.
pub fn random_code_model<R: Rng>(rng: &mut R) -> CodeModel {
    let mut model = CodeModel::default();
    for _ in 0..rng.gen_range(0..4) {
        let q = (0..rng.gen_range(1..3)).map(|_| name(rng)).collect::<Vec<_>>().join(".");
        let mut ns = NamespaceDecl::new(&q);
        ns.usings = (0..rng.gen_range(0..3)).map(|_| name(rng)).collect();
        for _ in 0..rng.gen_range(0..4) {
            ns.classes.push(class(rng, &q, 0));
        }
        for _ in 0..rng.gen_range(0..2) {
            let n = name(rng);
            ns.delegates.push(DelegateDecl {
                qualified_name: format!("{q}.{n}"),
                name: n,
                access: access(rng),
                signature: text(rng),
            });
        }
        model.namespaces.push(ns);
    }
    model
}

/// A knowledge base with up to `max_objects` objects spread over the builtin
/// types and up to `max_links` links of random builtin link types.
pub fn random_kb<R: Rng>(rng: &mut R, max_objects: usize, max_links: usize) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new();
    let n = rng.gen_range(0..=max_objects);
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let t = BUILTIN_TYPES.choose(rng).expect("nonempty");
        let q = format!("N.o{i}");
        ids.push(kb.add_object(t, &q, &q, access(rng), None).expect("builtin type").id);
    }
    if ids.is_empty() {
        return kb;
    }
    let m = rng.gen_range(0..=max_links);
    for _ in 0..m {
        let lt = BUILTIN_LINK_TYPES.choose(rng).expect("nonempty");
        let p = ids.choose(rng).expect("nonempty");
        let c = ids.choose(rng).expect("nonempty");
        if *lt == CONTAINS && p == c {
            continue;
        }
        kb.add_link(lt, p, c).expect("endpoints exist");
    }
    kb
}

/// Apply `steps` random operations to `kb`, including ones that fail
/// (duplicates, unknown ids, self-containment, invalid URIs).
pub fn random_mutations<R: Rng>(rng: &mut R, kb: &mut KnowledgeBase, steps: usize) {
    for step in 0..steps {
        let objects: Vec<String> = kb.objects().map(|o| o.id.clone()).collect();
        let links: Vec<String> = kb.links().map(|l| l.id.clone()).collect();
        let pick = |rng: &mut R, v: &[String]| v.choose(rng).cloned().unwrap_or_else(|| "missing".into());
        match rng.gen_range(0..100) {
            0..=2 => {
                let _ = kb.add_type(&format!("T{}", rng.gen_range(0..5)), ColorKey::Neutral);
            }
            3..=4 => {
                let _ = kb.add_link_type(&format!("L{}", rng.gen_range(0..4)));
            }
            5..=39 => {
                let types: Vec<String> = kb.knowledge_types().iter().map(|t| t.id.clone()).collect();
                let t = if rng.gen_bool(0.95) { pick(rng, &types) } else { "Bogus".into() };
                let q = format!("N.C.m{}", rng.gen_range(0..40));
                let tag = rng.gen_bool(0.3).then_some("parameter");
                let _ = kb.add_object(&t, &q, &q, access(rng), tag);
            }
            40..=74 => {
                let lts: Vec<String> = kb.link_types().iter().map(|t| t.id.clone()).collect();
                let lt = pick(rng, &lts);
                let p = pick(rng, &objects);
                let c = if rng.gen_bool(0.05) { p.clone() } else { pick(rng, &objects) };
                let _ = kb.add_link(&lt, &p, &c);
            }
            75..=82 => {
                let l = if rng.gen_bool(0.9) { pick(rng, &links) } else { "missing".into() };
                let _ = kb.remove_link(&l);
            }
            83..=89 => {
                let o = pick(rng, &objects);
                let _ = kb.remove_object(&o);
            }
            _ => {
                let o = pick(rng, &objects);
                let a = match rng.gen_range(0..3) {
                    0 => Annotation::note(format!("note {step}")),
                    1 => Annotation::document_link(format!("https://example.org/doc/{step}")),
                    _ => Annotation::document_link("notauri^^"),
                };
                let _ = kb.annotate(&o, a);
            }
        }
    }
}

/// Reference implementation of column visibility: iterate "a visible node
/// reveals its active neighbours" over every enabled link until nothing
/// changes. Quadratic, and deliberately shares no code with the query module.
pub fn brute_force_visibility(
    kb: &KnowledgeBase,
    q: &crate::query::SelectionQuery,
) -> std::collections::BTreeMap<String, std::collections::BTreeSet<String>> {
    use std::collections::{BTreeMap, BTreeSet};
    let any_checked = q.checked.values().any(|s| !s.is_empty());
    let is_active = |id: &str| -> bool {
        let Some(o) = kb.object(id) else { return false };
        if !q.displayed_type_ids.contains(&o.type_id) {
            return false;
        }
        match q.checked.get(&o.type_id) {
            Some(s) if !s.is_empty() => s.contains(id),
            _ => true,
        }
    };
    let mut visible: BTreeSet<String> = if any_checked {
        q.checked.values().flatten().cloned().collect()
    } else {
        kb.objects().filter(|o| q.displayed_type_ids.contains(&o.type_id)).map(|o| o.id.clone()).collect()
    };
    if any_checked {
        loop {
            let mut grew = false;
            for l in kb.links() {
                if !q.enabled_link_type_ids.contains(&l.link_type_id) || !is_active(&l.parent_id) || !is_active(&l.child_id) {
                    continue;
                }
                let (p, c) = (visible.contains(&l.parent_id), visible.contains(&l.child_id));
                if p && !c {
                    visible.insert(l.child_id.clone());
                    grew = true;
                } else if c && !p {
                    visible.insert(l.parent_id.clone());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
    }
    let mut out: BTreeMap<String, BTreeSet<String>> =
        q.displayed_type_ids.iter().map(|t| (t.clone(), BTreeSet::new())).collect();
    for id in visible {
        let t = &kb.object(&id).expect("visible objects exist").type_id;
        out.get_mut(t).expect("displayed type").insert(id);
    }
    out
}

/// A random well-formed query: a random nonempty set of displayed columns
/// (in random order), a random subset of link types, and up to `max_candidates`
/// checkable objects from displayed columns. Every subset of the candidates
/// is a valid checked selection.
pub fn random_query_frame<R: Rng>(
    rng: &mut R,
    kb: &KnowledgeBase,
    max_candidates: usize,
) -> (crate::query::SelectionQuery, Vec<(String, String)>) {
    let mut types: Vec<String> = kb.knowledge_types().iter().map(|t| t.id.clone()).collect();
    types.shuffle(rng);
    let shown = rng.gen_range(1..=types.len());
    types.truncate(shown);
    let links: std::collections::BTreeSet<String> =
        kb.link_types().iter().filter(|_| rng.gen_bool(0.5)).map(|t| t.id.clone()).collect();
    let mut pool: Vec<(String, String)> = kb
        .objects()
        .filter(|o| types.contains(&o.type_id))
        .map(|o| (o.type_id.clone(), o.id.clone()))
        .collect();
    pool.shuffle(rng);
    pool.truncate(max_candidates);
    let q = crate::query::SelectionQuery {
        displayed_type_ids: types,
        checked: Default::default(),
        enabled_link_type_ids: links,
    };
    (q, pool)
}

/// `frame` with the candidates selected by the bits of `mask` checked.
pub fn with_selection(
    frame: &crate::query::SelectionQuery,
    candidates: &[(String, String)],
    mask: u64,
) -> crate::query::SelectionQuery {
    let mut q = frame.clone();
    for (i, (t, id)) in candidates.iter().enumerate() {
        if mask & (1 << i) != 0 {
            q.checked.entry(t.clone()).or_default().insert(id.clone());
        }
    }
    q
}

/// The quantified query properties, checked for one (kb, query) pair:
/// seeds are visible and every visible object is active; with no enabled
/// link types exactly the seeds are visible; equal inputs give equal
/// results; disabling any one enabled link type never enlarges the result.
pub fn check_query_properties(kb: &KnowledgeBase, q: &crate::query::SelectionQuery) -> Result<(), String> {
    use crate::query::compute_visibility;
    use std::collections::BTreeSet;
    let r = compute_visibility(kb, q).map_err(|e| e.to_string())?;
    let visible: BTreeSet<&String> = r.visible.values().flatten().collect();
    let seeds: BTreeSet<&String> = q.checked.values().flatten().collect();
    if !seeds.is_subset(&visible) {
        return Err("a seed is not visible".into());
    }
    for (t, ids) in &r.visible {
        let checked = q.checked.get(t).filter(|s| !s.is_empty());
        for id in ids {
            let o = kb.object(id).ok_or("visible id does not exist")?;
            if &o.type_id != t || checked.is_some_and(|c| !c.contains(id)) {
                return Err(format!("{id} visible in {t} but not active there"));
            }
        }
    }
    if !seeds.is_empty() {
        let mut bare = q.clone();
        bare.enabled_link_type_ids.clear();
        let rb = compute_visibility(kb, &bare).map_err(|e| e.to_string())?;
        let vb: BTreeSet<&String> = rb.visible.values().flatten().collect();
        if vb != seeds {
            return Err("with no link types enabled the result differs from the seeds".into());
        }
    }
    if compute_visibility(kb, q).map_err(|e| e.to_string())? != r {
        return Err("two evaluations differ".into());
    }
    for drop in &q.enabled_link_type_ids {
        let mut narrower = q.clone();
        narrower.enabled_link_type_ids.remove(drop);
        let rn = compute_visibility(kb, &narrower).map_err(|e| e.to_string())?;
        if !seeds.is_empty() {
            for (t, ids) in &rn.visible {
                if !ids.is_subset(&r.visible[t]) {
                    return Err(format!("disabling {drop} enlarged column {t}"));
                }
            }
        }
    }
    Ok(())
}
