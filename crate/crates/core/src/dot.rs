//! Graphviz export: containment as nested clusters, every other link as a
//! labelled edge.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::kb::{KnowledgeBase, CONTAINS};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Render the knowledge base as a `digraph`. Contains links that would give
/// an object a second parent or close a cycle are drawn as ordinary edges.
pub fn to_dot(kb: &KnowledgeBase) -> String {
    let mut parent: HashMap<&str, &str> = HashMap::new();
    let mut edges = Vec::new();
    for l in kb.links() {
        if l.link_type_id == CONTAINS && !parent.contains_key(l.child_id.as_str()) && !is_ancestor(&parent, &l.child_id, &l.parent_id) {
            parent.insert(&l.child_id, &l.parent_id);
        } else {
            edges.push(l);
        }
    }
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (c, p) in &parent {
        children.entry(p).or_default().push(c);
    }
    for list in children.values_mut() {
        list.sort_unstable();
    }

    let mut out = String::from("digraph tracegraph {\n  node [shape=box];\n");
    let mut cluster = 0usize;
    // Explicit stack: Some(id) enters an object, None closes a cluster.
    let mut stack: Vec<Option<&str>> = kb
        .objects()
        .filter(|o| !parent.contains_key(o.id.as_str()))
        .map(|o| Some(o.id.as_str()))
        .collect();
    stack.reverse();
    let mut depth = 1usize;
    while let Some(item) = stack.pop() {
        let Some(id) = item else {
            depth -= 1;
            let _ = writeln!(out, "{}}}", "  ".repeat(depth));
            continue;
        };
        let o = kb.object(id).expect("object exists");
        let pad = "  ".repeat(depth);
        let node = format!("{pad}{} [label={}];", quote(&o.id), quote(&o.display_name));
        match children.get(id) {
            Some(kids) => {
                let _ = writeln!(out, "{pad}subgraph cluster_{cluster} {{");
                let _ = writeln!(out, "{pad}  label={};", quote(&format!("{} {}", o.type_id, o.display_name)));
                let _ = writeln!(out, "  {node}");
                cluster += 1;
                depth += 1;
                stack.push(None);
                stack.extend(kids.iter().rev().map(|k| Some(*k)));
            }
            None => {
                let _ = writeln!(out, "{node}");
            }
        }
    }
    for l in edges {
        let label = kb.link_type(&l.link_type_id).map_or(l.link_type_id.as_str(), |t| t.name.as_str());
        let _ = writeln!(out, "  {} -> {} [label={}];", quote(&l.parent_id), quote(&l.child_id), quote(label));
    }
    out.push_str("}\n");
    out
}

/// Whether `a` is `b` or an ancestor of `b` in the accepted containment map.
fn is_ancestor(parent: &HashMap<&str, &str>, a: &str, b: &str) -> bool {
    let mut cur = Some(b);
    let mut steps = 0usize;
    while let Some(x) = cur {
        if x == a {
            return true;
        }
        steps += 1;
        if steps > parent.len() + 1 {
            return true;
        }
        cur = parent.get(x).copied();
    }
    false
}
