//! Cleaning pipeline for short social-media texts.
//!
//! Rules are applied in a fixed order: URLs, emojis, mentions / hyphen tokens /
//! punctuation / spacing, then lowercasing. Records whose cleaned text is too
//! short or fails the English heuristic are rejected.

use std::fmt;
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub text: String,
}

impl RawRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub raw: String,
    pub clean: String,
}

impl Document {
    /// A document whose text is already clean (e.g. read back from a cleaned
    /// JSON-lines file).
    pub fn from_clean(id: impl Into<String>, clean: impl Into<String>) -> Self {
        let clean = clean.into();
        Self {
            id: id.into(),
            raw: clean.clone(),
            clean,
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.clean.split_whitespace()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleanConfig {
    /// Minimum cleaned length, counted in characters.
    pub min_chars: usize,
    pub english_filter: bool,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            min_chars: 15,
            english_filter: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    TooShort,
    NotEnglish,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::TooShort => "too_short",
            Rejection::NotEnglish => "not_english",
        })
    }
}

/// Fifty very common English function words.
pub const STOPWORDS: [&str; 50] = [
    "the", "be", "to", "of", "and", "a", "in", "that", "have", "i", "it", "for", "not", "on",
    "with", "he", "as", "you", "do", "at", "this", "but", "his", "by", "from", "they", "we", "is",
    "her", "she", "or", "an", "will", "my", "one", "all", "would", "there", "their", "what", "so",
    "up", "out", "if", "about", "who", "are", "which", "was", "me",
];

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").expect("valid url pattern"));

pub fn is_emoji(c: char) -> bool {
    matches!(
        c as u32,
        0x1F000..=0x1FAFF | 0x2600..=0x27BF | 0xFE0F | 0x200D
    )
}

pub fn strip_emojis(text: &str) -> String {
    text.chars().filter(|&c| !is_emoji(c)).collect()
}

/// Replaces every URL (up to the next whitespace) with a single space.
pub fn strip_urls(text: &str) -> String {
    URL_RE.replace_all(text, " ").into_owned()
}

/// Drops @-mentions and hyphen-prefixed tokens, strips ASCII punctuation and
/// collapses whitespace.
pub fn strip_noise(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for token in text.split_whitespace() {
        if token.starts_with('@') || token.starts_with('-') {
            continue;
        }
        let before = out.len();
        if !out.is_empty() {
            out.push(' ');
        }
        let body = out.len();
        out.extend(token.chars().filter(|c| !c.is_ascii_punctuation()));
        if out.len() == body {
            out.truncate(before);
        }
    }
    out
}

pub fn is_english(text: &str) -> bool {
    let total = text.chars().count();
    if total == 0 {
        return false;
    }
    let ascii = text.chars().filter(char::is_ascii).count();
    // ascii / total >= 0.9 without floating point
    if ascii * 10 < total * 9 {
        return false;
    }
    text.split_whitespace().any(|t| STOPWORDS.contains(&t))
}

/// Runs the cleaning rules only, without acceptance checks.
pub fn clean_text(text: &str) -> String {
    strip_noise(&strip_emojis(&strip_urls(text))).to_lowercase()
}

pub fn clean_document(rec: &RawRecord, cfg: &CleanConfig) -> Result<Document, Rejection> {
    let clean = clean_text(&rec.text);
    if clean.chars().count() < cfg.min_chars {
        return Err(Rejection::TooShort);
    }
    if cfg.english_filter && !is_english(&clean) {
        return Err(Rejection::NotEnglish);
    }
    Ok(Document {
        id: rec.id.clone(),
        raw: rec.text.clone(),
        clean,
    })
}

/// Cleans a batch in parallel; output order follows input order.
pub fn clean_all(recs: &[RawRecord], cfg: &CleanConfig) -> Vec<Result<Document, Rejection>> {
    recs.par_iter().map(|r| clean_document(r, cfg)).collect()
}
