//! Token counting and separator-based recursive text splitting.
//!
//! The default tokenizer counts maximal non-whitespace runs. Splitting walks
//! a separator hierarchy (paragraph, line, sentence, word by default) and
//! keeps each separator attached to the piece it terminates, so the
//! concatenation of the returned pieces reproduces the input byte-for-byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts tokens in a piece of text. Implement this to substitute a
/// model-specific counter for the default whitespace tokenizer.
pub trait TokenCounter {
    fn count(&self, text: &str) -> usize;
}

/// Default tokenizer: a token is a maximal run of non-whitespace characters.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl TokenCounter for WhitespaceTokenizer {
    fn count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}

/// Token count of `text` under the default tokenizer; 0 for empty or
/// whitespace-only text.
pub fn count_tokens(text: &str) -> usize {
    WhitespaceTokenizer.count(text)
}

/// Ordered separator strings, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SeparatorHierarchy {
    separators: Vec<String>,
}

impl SeparatorHierarchy {
    pub fn new(separators: Vec<String>) -> Result<Self> {
        if separators.is_empty() {
            return Err(Error::Validation(
                "separator hierarchy must not be empty".into(),
            ));
        }
        if separators.iter().any(|s| s.is_empty()) {
            return Err(Error::Validation(
                "separator hierarchy must not contain the empty string".into(),
            ));
        }
        Ok(SeparatorHierarchy { separators })
    }

    pub fn separators(&self) -> &[String] {
        &self.separators
    }
}

impl Default for SeparatorHierarchy {
    fn default() -> Self {
        SeparatorHierarchy {
            separators: ["\n\n", "\n", ". ", " "]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl TryFrom<Vec<String>> for SeparatorHierarchy {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        SeparatorHierarchy::new(v)
    }
}

impl From<SeparatorHierarchy> for Vec<String> {
    fn from(h: SeparatorHierarchy) -> Self {
        h.separators
    }
}

/// One piece produced by [`split_text`]. `oversize` marks a piece that still
/// exceeds the token budget after every separator was exhausted.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPiece {
    pub text: String,
    pub token_count: usize,
    pub oversize: bool,
}

/// Recursively split `text` so that every piece stays within `max_tokens`
/// tokens, preferring the most significant separators.
///
/// Pieces concatenate back to `text` exactly. A piece that cannot be split
/// further (no separator occurs in it) is emitted whole with `oversize`
/// set when it exceeds the budget; under the default hierarchy and
/// tokenizer that only happens for text whose whitespace is not a plain
/// space.
pub fn split_text(
    text: &str,
    separators: &SeparatorHierarchy,
    max_tokens: usize,
) -> Vec<SplitPiece> {
    split_text_with(text, separators, max_tokens, &WhitespaceTokenizer)
}

/// [`split_text`] with a caller-supplied token counter.
pub fn split_text_with(
    text: &str,
    separators: &SeparatorHierarchy,
    max_tokens: usize,
    counter: &dyn TokenCounter,
) -> Vec<SplitPiece> {
    assert!(max_tokens >= 1, "max_tokens must be at least 1");
    if text.is_empty() {
        return Vec::new();
    }
    let mut pieces = Vec::new();
    split_rec(text, separators.separators(), max_tokens, counter, &mut pieces);
    coalesce_empty(pieces, max_tokens, counter)
}

fn split_rec(
    text: &str,
    separators: &[String],
    max_tokens: usize,
    counter: &dyn TokenCounter,
    out: &mut Vec<SplitPiece>,
) {
    let token_count = counter.count(text);
    if token_count <= max_tokens {
        out.push(SplitPiece { text: text.to_string(), token_count, oversize: false });
        return;
    }
    for (level, sep) in separators.iter().enumerate() {
        let segments = split_after(text, sep);
        if segments.len() > 1 {
            let rest = &separators[level + 1..];
            for segment in segments {
                split_rec(segment, rest, max_tokens, counter, out);
            }
            return;
        }
    }
    // No separator occurs in the text; emit it whole and flag it.
    out.push(SplitPiece { text: text.to_string(), token_count, oversize: true });
}

/// Split `text` at every non-overlapping occurrence of `sep`, keeping the
/// separator attached to the piece it ends.
fn split_after<'a>(text: &'a str, sep: &str) -> Vec<&'a str> {
    let mut parts = Vec::new();
    let mut start = 0;
    while let Some(pos) = text[start..].find(sep) {
        let end = start + pos + sep.len();
        parts.push(&text[start..end]);
        start = end;
    }
    if start < text.len() {
        parts.push(&text[start..]);
    }
    if parts.is_empty() {
        parts.push(text);
    }
    parts
}

/// Fold token-free pieces (pure separator runs) into a neighbor so the
/// output has no semantically empty chunks. Merging is skipped when it
/// would push the neighbor over budget, which cannot happen under the
/// default tokenizer.
fn coalesce_empty(
    pieces: Vec<SplitPiece>,
    max_tokens: usize,
    counter: &dyn TokenCounter,
) -> Vec<SplitPiece> {
    let mut out: Vec<SplitPiece> = Vec::with_capacity(pieces.len());
    for piece in pieces {
        if let Some(last) = out.last_mut() {
            if piece.token_count == 0 || last.token_count == 0 {
                let merged = format!("{}{}", last.text, piece.text);
                let merged_count = counter.count(&merged);
                let keeps_bound =
                    merged_count <= max_tokens || last.oversize || piece.oversize;
                if keeps_bound {
                    last.text = merged;
                    last.token_count = merged_count;
                    last.oversize = last.oversize || piece.oversize;
                    continue;
                }
            }
        }
        out.push(piece);
    }
    out
}
