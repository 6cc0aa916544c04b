#![no_main]

use libfuzzer_sys::fuzz_target;
use pea_core::corpus::{corpus_stats, read_tweets_jsonl, write_tweets_jsonl};

fuzz_target!(|data: &[u8]| {
    let Ok(tweets) = read_tweets_jsonl(data) else { return };
    let mut buf = Vec::new();
    write_tweets_jsonl(&tweets, &mut buf).unwrap();
    assert_eq!(read_tweets_jsonl(&buf[..]).unwrap(), tweets);
    let stats = corpus_stats(&tweets);
    assert!(stats.vocab_filtered <= stats.vocab_original);
});
