//! Text analysis shared by indexing, training, thesaurus loading and query parsing.
//!
//! Tokens are maximal runs of Unicode letters or digits; everything else
//! separates tokens. Each surviving term keeps the ordinal of its token in the
//! original stream, so removed stopwords leave gaps that phrase matching sees.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word-boundary rule. Only one rule exists; it is recorded so persisted
/// artifacts describe how they were tokenized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenPattern {
    #[default]
    UnicodeAlphanumeric,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stemmer {
    #[default]
    None,
    LightSuffix,
}

/// Analysis chain configuration. Serialized into every index and model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzerConfig {
    pub lowercase: bool,
    pub stopwords: BTreeSet<String>,
    pub stemmer: Stemmer,
    pub token_pattern: TokenPattern,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            stopwords: BTreeSet::new(),
            stemmer: Stemmer::None,
            token_pattern: TokenPattern::UnicodeAlphanumeric,
        }
    }
}

impl AnalyzerConfig {
    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.stopwords.extend(words.into_iter().map(Into::into));
        self
    }

    pub fn with_stemmer(mut self, stemmer: Stemmer) -> Self {
        self.stemmer = stemmer;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::validation(format!("analyzer config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn is_stopword(&self, term: &str) -> bool {
        self.stopwords.contains(term)
    }

    /// Analyze `text` and return only the terms.
    pub fn terms(&self, text: &str) -> Vec<String> {
        analyze(text, self).terms
    }

    /// Analyzed form of a (possibly multi-word) label: its terms joined by a
    /// single space. Empty when nothing survives analysis.
    pub fn normalize(&self, text: &str) -> String {
        self.terms(text).join(" ")
    }
}

/// Analyzed text: normalized terms with their ordinal in the original token stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSequence {
    pub terms: Vec<String>,
    pub positions: Vec<u32>,
}

impl TermSequence {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.terms
            .iter()
            .map(String::as_str)
            .zip(self.positions.iter().copied())
    }
}

/// Splits `text` into maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

pub fn analyze(text: &str, config: &AnalyzerConfig) -> TermSequence {
    let mut out = TermSequence::default();
    for (position, token) in tokenize(text).enumerate() {
        let token = if config.lowercase {
            token.to_lowercase()
        } else {
            token.to_string()
        };
        if config.is_stopword(&token) {
            continue;
        }
        let term = match config.stemmer {
            Stemmer::None => token,
            Stemmer::LightSuffix => light_stem(&token),
        };
        // a stem may collide with a stopword
        if config.is_stopword(&term) {
            continue;
        }
        out.terms.push(term);
        out.positions.push(position as u32);
    }
    out
}

// (suffix, replacement), longest first within each family
const SUFFIXES: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("ization", "ize"),
    ("fulness", "ful"),
    ("iveness", "ive"),
    ("ingly", ""),
    ("ments", ""),
    ("ment", ""),
    ("ness", ""),
    ("ings", ""),
    ("ing", ""),
    ("ies", "y"),
    ("edly", ""),
    ("ed", ""),
    ("sses", "ss"),
    ("s", ""),
];

// `-s` is kept after these endings: class, census, analysis
const KEEP_S_AFTER: &[&str] = &["ss", "us", "is"];

const MIN_STEM_CHARS: usize = 3;

/// Strips the first matching suffix from a small fixed table, keeping at
/// least three characters of stem. A final `s` after `ss`, `us` or `is` stays.
pub fn light_stem(term: &str) -> String {
    for (suffix, replacement) in SUFFIXES {
        if *suffix == "s" && KEEP_S_AFTER.iter().any(|e| term.ends_with(e)) {
            continue;
        }
        if let Some(stem) = term.strip_suffix(suffix) {
            if stem.chars().count() >= MIN_STEM_CHARS {
                return format!("{stem}{replacement}");
            }
        }
    }
    term.to_string()
}

/// Reads a stopword list: one token per line, `#` comment lines and blank
/// lines ignored. Entries are trimmed, lowercased and deduplicated.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stopwords(&text)
}

pub fn parse_stopwords(text: &str) -> Result<BTreeSet<String>> {
    let mut words = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        if word.contains(char::is_whitespace) {
            return Err(Error::parse(
                idx + 1,
                format!("stopword entry {word:?} contains whitespace"),
            ));
        }
        words.insert(word.to_lowercase());
    }
    Ok(words)
}
