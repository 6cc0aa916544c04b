#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::corpus::normalize_tweet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let once = normalize_tweet(s);
    assert_eq!(normalize_tweet(&once), once);
});
