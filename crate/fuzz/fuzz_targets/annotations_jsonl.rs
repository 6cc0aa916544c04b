#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::agreement::{corpus_pea, AnnotationTable, PeaOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(table) = AnnotationTable::read_jsonl(data) else { return };
    let mut buf = Vec::new();
    table.write_jsonl(&mut buf).unwrap();
    assert_eq!(AnnotationTable::read_jsonl(&buf[..]).unwrap(), table);
    if let Ok(report) = corpus_pea(&table, PeaOptions::default()) {
        assert!(report.per_worker.values().all(|s| (0.0..=1.0).contains(s)));
    }
});
