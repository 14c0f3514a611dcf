//! Positional inverted index over short documents.

mod bm25;
mod query;
mod search;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::BufRead;
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{analyze, AnalyzerConfig};
use crate::error::{Error, Result};

pub use bm25::{bm25_term_score, idf, Bm25Params};
pub use query::{BooleanQuery, Operator};
pub use search::{search, Hit, SearchResult};

pub const INDEX_FORMAT_VERSION: u32 = 1;

/// One searchable question text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl DocumentRecord {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
            metadata: BTreeMap::new(),
        }
    }
}

/// Reads a JSON-lines corpus. Blank lines are skipped; a malformed line
/// fails with its 1-based line number.
pub fn read_corpus(path: &Path) -> Result<Vec<DocumentRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(std::io::BufReader::new(file), path)
}

pub(crate) fn parse_jsonl<T, R>(reader: R, path: &Path) -> Result<Vec<T>>
where
    T: serde::de::DeserializeOwned,
    R: BufRead,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Internal document number: rank of the doc_id in ascending order.
    pub doc: u32,
    /// Token-stream ordinals, strictly increasing.
    pub positions: Vec<u32>,
}

impl Posting {
    pub fn tf(&self) -> u32 {
        self.positions.len() as u32
    }
}

/// Immutable positional index. Documents are numbered by ascending doc_id,
/// and posting lists are sorted by that number, so the serialized form is
/// independent of ingestion order and build parallelism.
#[derive(Debug, Serialize, Deserialize)]
pub struct InvertedIndex {
    format_version: u32,
    analyzer: AnalyzerConfig,
    doc_ids: Vec<String>,
    doc_lens: Vec<u32>,
    avg_doc_len: f64,
    postings: BTreeMap<String, Vec<Posting>>,
    #[serde(skip)]
    fingerprint: OnceLock<String>,
}

impl PartialEq for InvertedIndex {
    fn eq(&self, other: &Self) -> bool {
        self.format_version == other.format_version
            && self.analyzer == other.analyzer
            && self.doc_ids == other.doc_ids
            && self.doc_lens == other.doc_lens
            && self.avg_doc_len.to_bits() == other.avg_doc_len.to_bits()
            && self.postings == other.postings
    }
}

#[derive(Default)]
struct Partial {
    docs: Vec<(String, u32)>,
    postings: HashMap<String, Vec<(usize, Vec<u32>)>>,
}

fn build_partial(docs: &[DocumentRecord], offset: usize, analyzer: &AnalyzerConfig) -> Partial {
    let mut partial = Partial::default();
    for (i, doc) in docs.iter().enumerate() {
        let seq = analyze(&doc.text, analyzer);
        let mut per_term: HashMap<&str, Vec<u32>> = HashMap::new();
        for (term, pos) in seq.iter() {
            per_term.entry(term).or_default().push(pos);
        }
        for (term, positions) in per_term {
            partial
                .postings
                .entry(term.to_string())
                .or_default()
                .push((offset + i, positions));
        }
        partial.docs.push((doc.doc_id.clone(), seq.len() as u32));
    }
    partial
}

/// Builds an index using the rayon thread pool.
pub fn build_index(docs: Vec<DocumentRecord>, analyzer: AnalyzerConfig) -> Result<InvertedIndex> {
    build_index_partitioned(docs, analyzer, rayon::current_num_threads())
}

/// Builds an index from `partitions` partial indexes merged in canonical
/// order. The result does not depend on `partitions`.
pub fn build_index_partitioned(
    docs: Vec<DocumentRecord>,
    analyzer: AnalyzerConfig,
    partitions: usize,
) -> Result<InvertedIndex> {
    for d in &docs {
        if d.doc_id.is_empty() {
            return Err(Error::validation("document with empty doc_id"));
        }
    }
    let chunk = docs.len().div_ceil(partitions.max(1)).max(1);
    let partials: Vec<Partial> = docs
        .par_chunks(chunk)
        .enumerate()
        .map(|(i, slice)| build_partial(slice, i * chunk, &analyzer))
        .collect();

    // input slot -> canonical doc number
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| docs[a].doc_id.cmp(&docs[b].doc_id));
    for w in order.windows(2) {
        if docs[w[0]].doc_id == docs[w[1]].doc_id {
            return Err(Error::DuplicateDocId(docs[w[0]].doc_id.clone()));
        }
    }
    let mut number = vec![0u32; docs.len()];
    for (n, &slot) in order.iter().enumerate() {
        number[slot] = n as u32;
    }

    let mut doc_lens = vec![0u32; docs.len()];
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut slot = 0;
    for partial in partials {
        for (_, len) in partial.docs {
            doc_lens[number[slot] as usize] = len;
            slot += 1;
        }
        for (term, list) in partial.postings {
            postings
                .entry(term)
                .or_default()
                .extend(list.into_iter().map(|(s, positions)| Posting {
                    doc: number[s],
                    positions,
                }));
        }
    }
    postings
        .par_iter_mut()
        .for_each(|(_, list)| list.sort_unstable_by_key(|p| p.doc));

    let doc_ids: Vec<String> = order.iter().map(|&s| docs[s].doc_id.clone()).collect();
    let avg_doc_len = mean_len(&doc_lens);
    Ok(InvertedIndex {
        format_version: INDEX_FORMAT_VERSION,
        analyzer,
        doc_ids,
        doc_lens,
        avg_doc_len,
        postings,
        fingerprint: OnceLock::new(),
    })
}

fn mean_len(lens: &[u32]) -> f64 {
    if lens.is_empty() {
        0.0
    } else {
        lens.iter().map(|&l| l as u64).sum::<u64>() as f64 / lens.len() as f64
    }
}

impl InvertedIndex {
    pub fn analyzer(&self) -> &AnalyzerConfig {
        &self.analyzer
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    /// Doc ids in ascending order; the position of an id is its internal number.
    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_id(&self, doc: u32) -> &str {
        &self.doc_ids[doc as usize]
    }

    pub fn doc_number(&self, doc_id: &str) -> Option<u32> {
        self.doc_ids
            .binary_search_by(|d| d.as_str().cmp(doc_id))
            .ok()
            .map(|n| n as u32)
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<u32> {
        self.doc_number(doc_id).map(|n| self.doc_lens[n as usize])
    }

    pub(crate) fn doc_len_of(&self, doc: u32) -> u32 {
        self.doc_lens[doc as usize]
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub(crate) fn posting_of(&self, term: &str, doc: u32) -> Option<&Posting> {
        let list = self.postings(term);
        list.binary_search_by_key(&doc, |p| p.doc).ok().map(|i| &list[i])
    }

    pub fn term_freq(&self, term: &str, doc_id: &str) -> Option<u32> {
        let doc = self.doc_number(doc_id)?;
        Some(self.posting_of(term, doc).map_or(0, Posting::tf))
    }

    /// Hex SHA-256 prefix of the serialized index.
    pub fn fingerprint(&self) -> &str {
        self.fingerprint.get_or_init(|| {
            let digest = Sha256::digest(self.to_json());
            digest[..8].iter().map(|b| format!("{b:02x}")).collect()
        })
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("index serialization cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let index: InvertedIndex =
            serde_json::from_slice(bytes).map_err(|e| Error::validation(format!("index file: {e}")))?;
        index.check()?;
        Ok(index)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    fn check(&self) -> Result<()> {
        if self.format_version != INDEX_FORMAT_VERSION {
            return Err(Error::validation(format!(
                "index format version {} (expected {INDEX_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.doc_lens.len() != self.doc_ids.len() {
            return Err(Error::validation("index doc table is inconsistent"));
        }
        if self.doc_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("index doc ids are not strictly ascending"));
        }
        let mut tf_sum = vec![0u32; self.doc_ids.len()];
        for (term, list) in &self.postings {
            if list.is_empty() || list.windows(2).any(|w| w[0].doc >= w[1].doc) {
                return Err(Error::validation(format!("posting list of {term:?} is malformed")));
            }
            for p in list {
                let slot = tf_sum
                    .get_mut(p.doc as usize)
                    .ok_or_else(|| Error::validation(format!("posting of {term:?} out of range")))?;
                *slot += p.tf();
            }
        }
        if tf_sum != self.doc_lens {
            return Err(Error::validation("document lengths disagree with postings"));
        }
        if self.avg_doc_len.to_bits() != mean_len(&self.doc_lens).to_bits() {
            return Err(Error::validation("avg_doc_len disagrees with document lengths"));
        }
        Ok(())
    }
}
