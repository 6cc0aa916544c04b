#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::{parse_emotion, Label};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(label) = parse_emotion(s) {
        // the canonical name must parse back to the same label
        let name = match label {
            Label::Fine(e) => e.name(),
            Label::Group(g) => g.name(),
        };
        assert_eq!(parse_emotion(name).unwrap(), label);
    }
});
