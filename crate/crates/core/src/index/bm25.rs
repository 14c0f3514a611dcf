//! Okapi BM25.
//!
//! ```text
//! score(t, d) = idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
//! idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
//! ```

use serde::{Deserialize, Serialize};

use super::InvertedIndex;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self> {
        let params = Self { k1, b };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(Error::validation(format!("k1 must be >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::validation(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }

    /// Saturated, length-normalized term frequency component.
    pub fn tf_weight(&self, tf: u32, doc_len: u32, avg_doc_len: f64) -> f64 {
        if tf == 0 {
            return 0.0;
        }
        let tf = tf as f64;
        let norm = 1.0 - self.b + self.b * doc_len as f64 / avg_doc_len;
        tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
    }
}

pub fn idf(doc_count: usize, df: usize) -> f64 {
    let n = doc_count as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

impl InvertedIndex {
    pub(crate) fn score_term_in(&self, term: &str, doc: u32, params: &Bm25Params) -> f64 {
        match self.posting_of(term, doc) {
            None => 0.0,
            Some(p) => {
                idf(self.doc_count(), self.doc_freq(term))
                    * params.tf_weight(p.tf(), self.doc_len_of(doc), self.avg_doc_len())
            }
        }
    }

    pub fn bm25_term_score(&self, term: &str, doc_id: &str, params: &Bm25Params) -> Result<f64> {
        let doc = self
            .doc_number(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
        Ok(self.score_term_in(term, doc, params))
    }
}

pub fn bm25_term_score(index: &InvertedIndex, term: &str, doc_id: &str, params: &Bm25Params) -> Result<f64> {
    index.bm25_term_score(term, doc_id, params)
}
