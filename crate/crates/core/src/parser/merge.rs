use std::collections::HashSet;

use thiserror::Error;

use crate::model::{member_qualified_name, ClassDecl, ClassKind, CodeModel, NamespaceDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("{qualified_name} declared as both {first:?} and {second:?}")]
    ConflictingDeclaration {
        qualified_name: String,
        first: ClassKind,
        second: ClassKind,
    },
}

/// Combine per-file models into one project model.
///
/// Equal namespaces merge, classes with equal qualified names merge member-wise
/// (`partial` types), and members whose qualified name is already taken in the
/// merged class are renumbered with the next free ordinal.
pub fn merge_models(models: Vec<CodeModel>) -> Result<CodeModel, MergeError> {
    let mut acc = Vec::new();
    for m in models {
        for ns in m.namespaces {
            merge_namespace(&mut acc, ns, &mut |e| Err(e))?;
        }
    }
    Ok(CodeModel {
        namespaces: acc,
        unresolved_report: Vec::new(),
    }
    .canonicalized())
}

/// Like [`merge_models`] but drops conflicting classes (keeping the first
/// declaration) and reports them instead of failing.
pub(crate) fn merge_lenient(models: Vec<CodeModel>) -> (CodeModel, Vec<MergeError>) {
    let mut acc = Vec::new();
    let mut errors = Vec::new();
    for m in models {
        for ns in m.namespaces {
            merge_namespace(&mut acc, ns, &mut |e| {
                errors.push(e);
                Ok(())
            })
            .expect("lenient merge never fails");
        }
    }
    let model = CodeModel {
        namespaces: acc,
        unresolved_report: Vec::new(),
    }
    .canonicalized();
    (model, errors)
}

type ConflictHandler<'a> = dyn FnMut(MergeError) -> Result<(), MergeError> + 'a;

fn merge_namespace(acc: &mut Vec<NamespaceDecl>, ns: NamespaceDecl, on_conflict: &mut ConflictHandler) -> Result<(), MergeError> {
    let Some(target) = acc.iter_mut().find(|n| n.qualified_name == ns.qualified_name) else {
        // Still run classes through the merge so duplicates inside `ns` combine.
        let mut fresh = NamespaceDecl::new(&ns.qualified_name);
        fresh.usings = Vec::new();
        acc.push(fresh);
        return merge_namespace(acc, ns, on_conflict);
    };
    for u in ns.usings {
        if !target.usings.contains(&u) {
            target.usings.push(u);
        }
    }
    let mut taken: HashSet<String> = target.delegates.iter().map(|d| d.qualified_name.clone()).collect();
    for mut d in ns.delegates {
        if taken.contains(&d.qualified_name) {
            d.qualified_name = member_qualified_name(&ns.qualified_name, &d.name, &taken);
        }
        taken.insert(d.qualified_name.clone());
        target.delegates.push(d);
    }
    for class in ns.classes {
        merge_class(&mut target.classes, class, on_conflict)?;
    }
    Ok(())
}

fn merge_class(list: &mut Vec<ClassDecl>, class: ClassDecl, on_conflict: &mut ConflictHandler) -> Result<(), MergeError> {
    let Some(target) = list.iter_mut().find(|c| c.qualified_name == class.qualified_name) else {
        let mut shell = ClassDecl::new(&class.name, &class.qualified_name, class.access, class.kind);
        shell.base_types = Vec::new();
        list.push(shell);
        return merge_class(list, class, on_conflict);
    };
    if target.kind != class.kind {
        return on_conflict(MergeError::ConflictingDeclaration {
            qualified_name: class.qualified_name,
            first: target.kind,
            second: class.kind,
        });
    }
    // A partial declaration with an explicit modifier refines a default one.
    if target.access == crate::model::Access::Other && class.access != crate::model::Access::Other {
        target.access = class.access;
    }
    for b in class.base_types {
        if !target.base_types.contains(&b) {
            target.base_types.push(b);
        }
    }
    let mut taken: HashSet<String> = target.member_qualified_names().map(str::to_string).collect();
    let class_q = target.qualified_name.clone();
    let mut rename = |name: &str, q: &mut String| {
        if taken.contains(q.as_str()) {
            *q = member_qualified_name(&class_q, name, &taken);
        }
        taken.insert(q.clone());
    };
    for mut m in class.constructors {
        rename(&m.name, &mut m.qualified_name);
        target.constructors.push(m);
    }
    for mut m in class.methods {
        rename(&m.name, &mut m.qualified_name);
        target.methods.push(m);
    }
    for mut m in class.properties {
        rename(&m.name, &mut m.qualified_name);
        target.properties.push(m);
    }
    for mut m in class.fields {
        rename(&m.name, &mut m.qualified_name);
        target.fields.push(m);
    }
    for mut m in class.events {
        rename(&m.name, &mut m.qualified_name);
        target.events.push(m);
    }
    for mut m in class.delegates {
        rename(&m.name, &mut m.qualified_name);
        target.delegates.push(m);
    }
    for nested in class.nested_classes {
        merge_class(&mut target.nested_classes, nested, on_conflict)?;
    }
    Ok(())
}
