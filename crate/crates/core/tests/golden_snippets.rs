//! Snippet fixtures under `fixtures/snippets`: each `NN_name.cs` has a
//! hand-checked `.tokens` listing (`line:col Kind text`) and a
//! `.codemodel.xml` golden.

use std::fs;
use std::path::PathBuf;

use tracegraph_core::{emit_xml, parse_file, parse_xml, tokenize};

fn snippet_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/snippets")
}

fn snippets() -> Vec<String> {
    let mut stems: Vec<String> = fs::read_dir(snippet_dir())
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.strip_suffix(".cs").map(str::to_string)
        })
        .collect();
    stems.sort();
    stems
}

fn read(stem: &str, ext: &str) -> String {
    fs::read_to_string(snippet_dir().join(format!("{stem}{ext}"))).unwrap()
}

#[test]
fn at_least_twenty_snippets_with_both_goldens() {
    let stems = snippets();
    assert!(stems.len() >= 20, "{} snippets", stems.len());
    for s in &stems {
        assert!(snippet_dir().join(format!("{s}.tokens")).exists(), "{s}.tokens");
        assert!(snippet_dir().join(format!("{s}.codemodel.xml")).exists(), "{s}.codemodel.xml");
    }
}

#[test]
fn token_goldens() {
    let mut failures = Vec::new();
    for stem in snippets() {
        let file = format!("{stem}.cs");
        let toks = tokenize(&read(&stem, ".cs"), &file).unwrap();
        let got: String = toks
            .iter()
            .map(|t| format!("{}:{} {} {}\n", t.pos.line, t.pos.column, t.kind, t.text))
            .collect();
        if got != read(&stem, ".tokens") {
            failures.push(format!("{stem}:\n{got}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn code_model_goldens() {
    let mut failures = Vec::new();
    for stem in snippets() {
        let file = format!("{stem}.cs");
        let toks = tokenize(&read(&stem, ".cs"), &file).unwrap();
        let parsed = parse_file(&toks).unwrap();
        let golden = read(&stem, ".codemodel.xml");
        let got = emit_xml(&parsed.model);
        if got != golden {
            failures.push(format!("{stem}:\n{got}"));
            continue;
        }
        // The golden document reads back to the parsed model.
        assert_eq!(parse_xml(&golden).unwrap(), parsed.model.clone().canonicalized(), "{stem}");
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn unsupported_members_leave_diagnostics() {
    let stem = "19_unsupported_members";
    let toks = tokenize(&read(stem, ".cs"), "x.cs").unwrap();
    let parsed = parse_file(&toks).unwrap();
    let messages: Vec<_> = parsed.diagnostics.iter().map(|d| d.message.as_str()).collect();
    assert_eq!(messages, ["enum Color skipped", "operator skipped", "indexer skipped", "finalizer skipped"]);
}
