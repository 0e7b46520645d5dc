#![no_main]

use libfuzzer_sys::fuzz_target;
use tracegraph_core::{emit_xml, parse_xml};

fuzz_target!(|doc: &str| {
    if let Ok(model) = parse_xml(doc) {
        // Anything accepted must survive a round trip.
        let again = parse_xml(&emit_xml(&model)).expect("re-emitted XML parses");
        assert_eq!(again, model);
    }
});
