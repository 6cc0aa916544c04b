use std::collections::HashSet;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Marker prefixed to subword pieces that continue a word.
pub const CONTINUATION: &str = "##";
pub const UNKNOWN: &str = "[UNK]";

/// Subword vocabulary in the one-token-per-line layout used by WordPiece
/// models. Continuation pieces carry a `##` prefix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubwordVocab {
    pieces: HashSet<String>,
    max_piece_chars: usize,
}

impl SubwordVocab {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut vocab = SubwordVocab::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let piece = line.trim_end_matches(['\r', '\n']);
            if piece.is_empty() {
                continue;
            }
            vocab.insert(piece);
        }
        if vocab.pieces.is_empty() {
            return Err(Error::InvalidParameter(
                "subword vocabulary is empty".into(),
            ));
        }
        Ok(vocab)
    }

    pub fn insert(&mut self, piece: &str) {
        let chars = piece.trim_start_matches(CONTINUATION).chars().count();
        self.max_piece_chars = self.max_piece_chars.max(chars);
        self.pieces.insert(piece.to_string());
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.pieces.contains(piece)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Greedy longest-match-first segmentation of one word. A word with any
    /// unmatched remainder becomes a single `[UNK]`.
    pub fn segment(&self, word: &str) -> Vec<String> {
        let chars: Vec<char> = word.chars().collect();
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let longest = (start + self.max_piece_chars).min(chars.len());
            let found = (start + 1..=longest).rev().find_map(|end| {
                let body: String = chars[start..end].iter().collect();
                let piece = if start == 0 {
                    body
                } else {
                    format!("{CONTINUATION}{body}")
                };
                self.pieces.contains(&piece).then_some((end, piece))
            });
            match found {
                Some((end, piece)) => {
                    pieces.push(piece);
                    start = end;
                }
                None => return vec![UNKNOWN.to_string()],
            }
        }
        pieces
    }
}

#[derive(Debug, Clone, Default)]
pub enum Tokenizer {
    #[default]
    Whitespace,
    Subword {
        vocab: SubwordVocab,
        lowercase: bool,
    },
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_string).collect(),
            Tokenizer::Subword { vocab, lowercase } => text
                .split_whitespace()
                .flat_map(|w| {
                    if *lowercase {
                        vocab.segment(&w.to_lowercase())
                    } else {
                        vocab.segment(w)
                    }
                })
                .collect(),
        }
    }
}
