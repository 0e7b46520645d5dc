#![no_main]

use libfuzzer_sys::fuzz_target;
use tracegraph_core::kb::KnowledgeBase;
use tracegraph_core::{emit_xml, parse_file, parse_xml, populate, tokenize};

// Only lexable text reaches the parser.
fuzz_target!(|src: &str| {
    let Ok(tokens) = tokenize(src, "fuzz.cs") else { return };
    if let Ok(parsed) = parse_file(&tokens) {
        let xml = emit_xml(&parsed.model);
        assert_eq!(parse_xml(&xml).expect("emitted XML parses"), parsed.model.clone().canonicalized());
        let _ = populate(&parsed.model, &mut KnowledgeBase::new());
    }
});
