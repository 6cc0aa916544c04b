#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::tasks::{read_partition, verify_split, write_partition};

fuzz_target!(|data: &[u8]| {
    let Ok(examples) = read_partition(data) else { return };
    let mut buf = Vec::new();
    write_partition(&examples, &mut buf).unwrap();
    assert_eq!(read_partition(&buf[..]).unwrap(), examples);
    assert!(examples.iter().all(|e| e.label <= 1));
    let _ = verify_split("fuzz", &examples, &[], &[], None);
});
