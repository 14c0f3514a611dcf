//! Co-occurrence statistics between free-text terms and controlled
//! vocabulary terms, and the similarity measures ranked over them.
//!
//! Both measures work on document frequencies: `df_x` for the free term,
//! `df_y` for the controlled term, `df_xy` for documents carrying both.
//!
//! ```text
//! log_jaccard(x, y) = ln(df_xy) / ln(df_x + df_y - df_xy)
//! cosine(x, y)      = df_xy / sqrt(df_x + df_y)
//! ```
//!
//! `cosine` keeps the sum under the radical, so it is not bounded by 1
//! (`(8, 8, 8)` gives 2). Both return 0 for `df_xy = 0`; `log_jaccard`
//! also returns 0 when the union has a single document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzerConfig;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SUGGESTIONS: usize = 20;

fn check_counts(df_x: u64, df_y: u64, df_xy: u64) -> Result<()> {
    if df_x == 0 || df_y == 0 {
        return Err(Error::validation(format!(
            "document frequencies must be >= 1 (df_x={df_x}, df_y={df_y})"
        )));
    }
    if df_xy > df_x.min(df_y) {
        return Err(Error::validation(format!(
            "joint frequency {df_xy} exceeds min(df_x={df_x}, df_y={df_y})"
        )));
    }
    Ok(())
}

pub fn log_jaccard(df_x: u64, df_y: u64, df_xy: u64) -> Result<f64> {
    check_counts(df_x, df_y, df_xy)?;
    let union = df_x + df_y - df_xy;
    if df_xy == 0 || union == 1 {
        return Ok(0.0);
    }
    Ok((df_xy as f64).ln() / (union as f64).ln())
}

pub fn cosine(df_x: u64, df_y: u64, df_xy: u64) -> Result<f64> {
    check_counts(df_x, df_y, df_xy)?;
    if df_xy == 0 {
        return Ok(0.0);
    }
    Ok(df_xy as f64 / ((df_x + df_y) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMeasure {
    #[default]
    LogJaccard,
    Cosine,
}

impl SimilarityMeasure {
    pub fn score(&self, df_x: u64, df_y: u64, df_xy: u64) -> Result<f64> {
        match self {
            SimilarityMeasure::LogJaccard => log_jaccard(df_x, df_y, df_xy),
            SimilarityMeasure::Cosine => cosine(df_x, df_y, df_xy),
        }
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityMeasure::LogJaccard => "log_jaccard",
            SimilarityMeasure::Cosine => "cosine",
        })
    }
}

impl FromStr for SimilarityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "log_jaccard" | "jaccard" | "jac" => Ok(SimilarityMeasure::LogJaccard),
            "cosine" | "cos" => Ok(SimilarityMeasure::Cosine),
            other => Err(Error::validation(format!("unknown similarity measure {other:?}"))),
        }
    }
}

/// One annotated training document: free text (title and abstract) plus the
/// controlled keywords assigned to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    #[serde(default)]
    pub doc_id: String,
    pub text: String,
    pub keywords: Vec<String>,
}

impl TrainingRecord {
    pub fn new<I, S>(doc_id: impl Into<String>, text: impl Into<String>, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
            keywords: keywords.into_iter().map(Into::into).collect(),
        }
    }
}

pub fn read_training_corpus(path: &Path) -> Result<Vec<TrainingRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    crate::index::parse_jsonl(std::io::BufReader::new(file), path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceModel {
    format_version: u32,
    analyzer: AnalyzerConfig,
    doc_count: u64,
    free_df: BTreeMap<String, u64>,
    controlled_df: BTreeMap<String, u64>,
    /// free term -> controlled term -> joint document frequency
    pair_df: BTreeMap<String, BTreeMap<String, u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    pub term: String,
    pub score: f64,
}

/// Counts document frequencies over an annotated corpus. The result does not
/// depend on record order. Controlled keywords are trimmed but otherwise kept
/// verbatim; free text goes through `analyzer`.
pub fn train_cooccurrence(records: &[TrainingRecord], analyzer: AnalyzerConfig) -> Result<CooccurrenceModel> {
    if records.is_empty() {
        return Err(Error::validation("training corpus is empty"));
    }
    let per_doc: Vec<(BTreeSet<String>, BTreeSet<String>)> = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let controlled: BTreeSet<String> = r
                .keywords
                .iter()
                .map(|k| k.trim())
                .filter(|k| !k.is_empty())
                .map(str::to_string)
                .collect();
            if controlled.is_empty() {
                let name = if r.doc_id.is_empty() {
                    format!("#{}", i + 1)
                } else {
                    r.doc_id.clone()
                };
                return Err(Error::validation(format!(
                    "training record {name} has no controlled keywords"
                )));
            }
            let free: BTreeSet<String> = analyzer.terms(&r.text).into_iter().collect();
            Ok((free, controlled))
        })
        .collect::<Result<_>>()?;

    let mut free_df: BTreeMap<String, u64> = BTreeMap::new();
    let mut controlled_df: BTreeMap<String, u64> = BTreeMap::new();
    let mut pair_df: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for (free, controlled) in &per_doc {
        for y in controlled {
            *controlled_df.entry(y.clone()).or_default() += 1;
        }
        for x in free {
            *free_df.entry(x.clone()).or_default() += 1;
            let row = pair_df.entry(x.clone()).or_default();
            for y in controlled {
                *row.entry(y.clone()).or_default() += 1;
            }
        }
    }
    Ok(CooccurrenceModel {
        format_version: MODEL_FORMAT_VERSION,
        analyzer,
        doc_count: records.len() as u64,
        free_df,
        controlled_df,
        pair_df,
    })
}

impl CooccurrenceModel {
    pub fn analyzer(&self) -> &AnalyzerConfig {
        &self.analyzer
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn free_df(&self, term: &str) -> u64 {
        self.free_df.get(term).copied().unwrap_or(0)
    }

    pub fn controlled_df(&self, term: &str) -> u64 {
        self.controlled_df.get(term).copied().unwrap_or(0)
    }

    pub fn pair_df(&self, free: &str, controlled: &str) -> u64 {
        self.pair_df
            .get(free)
            .and_then(|row| row.get(controlled))
            .copied()
            .unwrap_or(0)
    }

    pub fn free_terms(&self) -> impl Iterator<Item = (&str, u64)> {
        self.free_df.iter().map(|(t, &n)| (t.as_str(), n))
    }

    pub fn controlled_terms(&self) -> impl Iterator<Item = (&str, u64)> {
        self.controlled_df.iter().map(|(t, &n)| (t.as_str(), n))
    }

    /// Controlled terms co-occurring with `free`, with joint counts.
    pub fn cooccurring(&self, free: &str) -> impl Iterator<Item = (&str, u64)> {
        self.pair_df
            .get(free)
            .into_iter()
            .flat_map(|row| row.iter().map(|(t, &n)| (t.as_str(), n)))
    }

    /// Ranks every controlled term co-occurring with `query_term` by
    /// `measure`, best first, ties by term; at most `k` entries.
    pub fn suggest(&self, query_term: &str, measure: SimilarityMeasure, k: usize) -> Result<Vec<Suggestion>> {
        if k == 0 {
            return Err(Error::validation("suggestion count k must be positive"));
        }
        let df_x = self.free_df(query_term);
        if df_x == 0 {
            return Ok(Vec::new());
        }
        let mut out = self
            .cooccurring(query_term)
            .map(|(y, df_xy)| {
                Ok(Suggestion {
                    term: y.to_string(),
                    score: measure.score(df_x, self.controlled_df(y), df_xy)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        out.truncate(k);
        Ok(out)
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("model serialization cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let model: CooccurrenceModel =
            serde_json::from_slice(bytes).map_err(|e| Error::validation(format!("model file: {e}")))?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    fn check(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::validation(format!(
                "model format version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        let n = self.doc_count;
        if let Some((t, _)) = self
            .free_df
            .iter()
            .chain(&self.controlled_df)
            .find(|(_, &df)| df == 0 || df > n)
        {
            return Err(Error::validation(format!("document frequency of {t:?} out of range")));
        }
        for (x, row) in &self.pair_df {
            let df_x = self.free_df(x);
            for (y, &df_xy) in row {
                if df_xy == 0 || df_xy > df_x.min(self.controlled_df(y)) {
                    return Err(Error::validation(format!(
                        "joint frequency of ({x:?}, {y:?}) out of range"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn suggest_terms(
    model: &CooccurrenceModel,
    query_term: &str,
    measure: SimilarityMeasure,
    k: usize,
) -> Result<Vec<Suggestion>> {
    model.suggest(query_term, measure, k)
}
