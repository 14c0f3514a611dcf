use serde::Serialize;

use super::{Bm25Params, BooleanQuery, InvertedIndex, Operator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hit {
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub hits: Vec<Hit>,
    pub query: String,
    pub index_fingerprint: String,
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

impl InvertedIndex {
    fn phrase_at(&self, terms: &[String], doc: u32) -> bool {
        let lists: Option<Vec<&[u32]>> = terms
            .iter()
            .map(|t| self.posting_of(t, doc).map(|p| p.positions.as_slice()))
            .collect();
        let Some(lists) = lists else { return false };
        lists[0].iter().any(|&start| {
            lists[1..]
                .iter()
                .zip(1u32..)
                .all(|(positions, offset)| positions.binary_search(&(start + offset)).is_ok())
        })
    }

    /// Documents satisfying the boolean tree, ascending by internal number.
    pub fn matching_docs(&self, query: &BooleanQuery) -> Vec<u32> {
        match query {
            BooleanQuery::Term(t) => self.postings(t).iter().map(|p| p.doc).collect(),
            BooleanQuery::Phrase(ts) => {
                let mut docs: Vec<u32> = self.postings(&ts[0]).iter().map(|p| p.doc).collect();
                for t in &ts[1..] {
                    let other: Vec<u32> = self.postings(t).iter().map(|p| p.doc).collect();
                    docs = intersect(&docs, &other);
                }
                docs.retain(|&d| self.phrase_at(ts, d));
                docs
            }
            BooleanQuery::Group(op, children) => {
                let mut sets = children.iter().map(|c| self.matching_docs(c));
                let first = sets.next().unwrap_or_default();
                sets.fold(first, |acc, s| match op {
                    Operator::And => intersect(&acc, &s),
                    Operator::Or => union(&acc, &s),
                })
            }
        }
    }
}

/// Evaluates `query` and ranks its candidates.
///
/// A candidate's score is the sum of BM25 scores of every distinct query
/// term occurring in it, whichever branch of the tree matched. Results are
/// ordered by score descending, then doc_id ascending, and cut at `top_n`.
pub fn search(index: &InvertedIndex, query: &BooleanQuery, params: &Bm25Params, top_n: usize) -> Result<SearchResult> {
    query.validate()?;
    params.validate()?;
    if top_n == 0 {
        return Err(Error::validation("top_n must be positive"));
    }
    let terms = query.terms();
    let mut scored: Vec<(u32, f64)> = index
        .matching_docs(query)
        .into_iter()
        .map(|doc| {
            let score = terms.iter().map(|t| index.score_term_in(t, doc, params)).sum();
            (doc, score)
        })
        .collect();
    // doc numbers follow doc_id order, so this is the (score desc, doc_id asc) order
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(top_n);
    Ok(SearchResult {
        hits: scored
            .into_iter()
            .map(|(doc, score)| Hit {
                doc_id: index.doc_id(doc).to_string(),
                score,
            })
            .collect(),
        query: query.to_string(),
        index_fingerprint: index.fingerprint().to_string(),
    })
}
