#![no_main]

use libfuzzer_sys::fuzz_target;
use tracegraph_core::kb::{load, save};

fuzz_target!(|bytes: &[u8]| {
    if let Ok(kb) = load(bytes) {
        assert_eq!(load(&save(&kb)).expect("saved KB loads"), kb);
    }
});
