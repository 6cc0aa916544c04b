#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::analytics::SubwordVocab;

fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else { return };
    let (vocab, text) = data.split_at(split);
    let Ok(vocab) = SubwordVocab::read(vocab) else { return };
    let Ok(text) = std::str::from_utf8(&text[1..]) else { return };
    for word in text.split_whitespace() {
        let pieces = vocab.segment(word);
        assert!(!pieces.is_empty());
    }
});
