//! Tweet ingestion and preprocessing: entity masking, deduplication,
//! lexicon filtering and descriptive statistics.
//!
//! Masking rules, applied URLs first:
//!
//! * URL: `(?i)https?://\S*` or a bare `t.co/\S*` shortlink → `<URL>`
//! * mention: `@\w+` → `<USER>`
//!
//! Everything else is left byte-for-byte untouched.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::agreement::EmotionSet;
use crate::error::{Error, Result};
use crate::wheel::Emotion24;

pub const USER_TOKEN: &str = "<USER>";
pub const URL_TOKEN: &str = "<URL>";

/// EmoLex categories that express polarity rather than an emotion.
pub const SENTIMENT_CATEGORIES: [&str; 2] = ["positive", "negative"];

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i:https?://)\S*|\bt\.co/\S*").unwrap())
}

fn mention_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").unwrap())
}

/// Replaces links with `<URL>` and user mentions with `<USER>`. Idempotent.
pub fn normalize_tweet(text: &str) -> String {
    let without_urls = url_pattern().replace_all(text, URL_TOKEN);
    mention_pattern()
        .replace_all(&without_urls, USER_TOKEN)
        .into_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    /// Normalized text.
    pub text: String,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<EmotionSet>,
}

impl TweetRecord {
    /// Builds a record from raw text, normalizing it.
    pub fn new(id: &str, raw_text: &str) -> Self {
        TweetRecord {
            id: id.to_string(),
            text: normalize_tweet(raw_text),
            raw_text: raw_text.to_string(),
            source: None,
            labels: None,
        }
    }

    pub fn with_source(mut self, source: &str) -> Self {
        self.source = Some(source.to_string());
        self
    }

    pub fn with_labels(mut self, labels: impl IntoIterator<Item = Emotion24>) -> Self {
        self.labels = Some(labels.into_iter().collect());
        self
    }
}

#[derive(Deserialize)]
struct RawTweet {
    id: String,
    text: String,
    #[serde(default)]
    raw_text: Option<String>,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Reads `{id, text, source?}` lines. Lines that already carry `raw_text`
/// (our own output) keep it; otherwise `text` is taken as raw and normalized.
pub fn read_tweets_jsonl<R: BufRead>(reader: R) -> Result<Vec<TweetRecord>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let at = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let line = line.map_err(|e| at(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawTweet = serde_json::from_str(&line).map_err(|e| at(e.to_string()))?;
        if !seen.insert(raw.id.clone()) {
            return Err(at(Error::DuplicateId(raw.id).to_string()));
        }
        let labels = raw
            .labels
            .map(|ls| {
                ls.iter()
                    .map(|l| l.parse::<Emotion24>())
                    .collect::<Result<EmotionSet>>()
            })
            .transpose()
            .map_err(|e| at(e.to_string()))?;
        let (text, raw_text) = match raw.raw_text {
            Some(r) => (raw.text, r),
            None => (normalize_tweet(&raw.text), raw.text),
        };
        out.push(TweetRecord {
            id: raw.id,
            text,
            raw_text,
            source: raw.source,
            labels,
        });
    }
    Ok(out)
}

pub fn write_tweets_jsonl<W: Write>(tweets: &[TweetRecord], mut w: W) -> Result<()> {
    for t in tweets {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum DedupKey {
    #[default]
    Normalized,
    Raw,
}

/// Keeps the first tweet for each distinct text, in input order.
pub fn dedup(corpus: Vec<TweetRecord>, key: DedupKey) -> Vec<TweetRecord> {
    let mut seen = HashSet::new();
    corpus
        .into_iter()
        .filter(|t| {
            let k = match key {
                DedupKey::Normalized => t.text.clone(),
                DedupKey::Raw => t.raw_text.clone(),
            };
            seen.insert(k)
        })
        .collect()
}

/// Word → associated categories (only rows flagged 1 are kept).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
    ignored: BTreeSet<String>,
}

impl Lexicon {
    /// Parses the EmoLex word-level layout: `word<TAB>category<TAB>0|1`.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lex = Lexicon {
            ignored: SENTIMENT_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let at = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let line = line.map_err(|e| at(e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [word, category, flag] = cols[..] else {
                return Err(at(format!(
                    "expected 3 tab-separated columns, found {}",
                    cols.len()
                )));
            };
            let associated = match flag.trim() {
                "1" => true,
                "0" => false,
                other => return Err(at(format!("flag must be 0 or 1, found `{other}`"))),
            };
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(at("empty word".into()));
            }
            if associated {
                lex.entries
                    .entry(word)
                    .or_default()
                    .insert(category.trim().to_lowercase());
            }
        }
        Ok(lex)
    }

    pub fn insert(&mut self, word: &str, category: &str) {
        self.entries
            .entry(word.to_lowercase())
            .or_default()
            .insert(category.to_lowercase());
    }

    /// Categories that do not make a word emotive (defaults to the polarity
    /// categories).
    pub fn set_ignored_categories(&mut self, categories: impl IntoIterator<Item = String>) {
        self.ignored = categories.into_iter().collect();
    }

    pub fn categories(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(word)
    }

    /// True if the (already case-folded) word has at least one emotion.
    pub fn is_emotive(&self, word: &str) -> bool {
        self.entries
            .get(word)
            .is_some_and(|cats| cats.iter().any(|c| !self.ignored.contains(c)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_edge_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '…' | '«' | '»' | '¡' | '¿')
}

/// Case-folded whitespace tokens with edge punctuation trimmed.
pub fn lexical_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace()
        .map(|t| t.trim_matches(is_edge_punctuation).to_lowercase())
        .filter(|t| !t.is_empty())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Filtered {
    pub kept: Vec<TweetRecord>,
    pub warnings: Vec<String>,
}

/// Keeps tweets containing at least one emotive lexicon word.
pub fn lexicon_filter(corpus: Vec<TweetRecord>, lexicon: &Lexicon) -> Filtered {
    let mut warnings = Vec::new();
    if lexicon.is_empty() {
        warnings.push("lexicon is empty; every tweet is dropped".to_string());
    }
    let kept = corpus
        .into_iter()
        .filter(|t| lexical_tokens(&t.text).any(|tok| lexicon.is_emotive(&tok)))
        .collect();
    Filtered { kept, warnings }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub tweet_count: usize,
    pub vocab_original: usize,
    pub vocab_filtered: usize,
    pub pct_hashtag: f64,
    pub pct_mention: f64,
    pub pct_link: f64,
}

fn has_hashtag(raw: &str) -> bool {
    raw.split_whitespace().any(|tok| {
        let mut chars = tok.chars();
        chars.next() == Some('#')
            && chars
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
    })
}

pub fn corpus_stats(corpus: &[TweetRecord]) -> CorpusStats {
    if corpus.is_empty() {
        return CorpusStats::default();
    }
    let mut original = HashSet::new();
    let mut filtered = HashSet::new();
    let (mut hashtags, mut mentions, mut links) = (0usize, 0usize, 0usize);
    for t in corpus {
        original.extend(t.raw_text.split_whitespace());
        filtered.extend(
            t.text
                .split_whitespace()
                .filter(|tok| *tok != USER_TOKEN && *tok != URL_TOKEN),
        );
        hashtags += usize::from(has_hashtag(&t.raw_text));
        mentions += usize::from(mention_pattern().is_match(&t.raw_text));
        links += usize::from(url_pattern().is_match(&t.raw_text));
    }
    let pct = |n: usize| 100.0 * n as f64 / corpus.len() as f64;
    CorpusStats {
        tweet_count: corpus.len(),
        vocab_original: original.len(),
        vocab_filtered: filtered.len(),
        pct_hashtag: pct(hashtags),
        pct_mention: pct(mentions),
        pct_link: pct(links),
    }
}

/// Stats per `source` tag (untagged tweets under `"-"`), plus `"all"`.
pub fn stats_by_source(corpus: &[TweetRecord]) -> BTreeMap<String, CorpusStats> {
    let mut groups: BTreeMap<String, Vec<TweetRecord>> = BTreeMap::new();
    for t in corpus {
        let key = t.source.clone().unwrap_or_else(|| "-".to_string());
        groups.entry(key).or_default().push(t.clone());
    }
    let mut out: BTreeMap<String, CorpusStats> = groups
        .iter()
        .map(|(k, ts)| (k.clone(), corpus_stats(ts)))
        .collect();
    out.insert("all".to_string(), corpus_stats(corpus));
    out
}

/// Aligned text table with vocabulary (in thousands) and feature columns.
pub fn render_stats_table(rows: &BTreeMap<String, CorpusStats>) -> String {
    let width = rows.keys().map(String::len).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>8}  {:>6}  {:>6}  {:>6}",
        "source", "orig", "filt", "#", "@", "//"
    );
    for (name, s) in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.1} K  {:>6.1} K  {:>6.1}  {:>6.1}  {:>6.1}",
            name,
            s.vocab_original as f64 / 1000.0,
            s.vocab_filtered as f64 / 1000.0,
            s.pct_hashtag,
            s.pct_mention,
            s.pct_link
        );
    }
    out
}
