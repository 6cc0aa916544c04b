#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::corpus::Lexicon;

fuzz_target!(|data: &[u8]| {
    if let Ok(lex) = Lexicon::read_tsv(data) {
        let _ = lex.is_emotive("fear");
    }
});
