//! TREC qrels and run files.
//!
//! Qrels lines are `topic_id 0 doc_id grade`; run lines are
//! `topic_id Q0 doc_id rank score tag` with 1-based ranks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{Hit, SearchResult};

/// Relevance grade: 0 not relevant, 1 (partially) relevant, 2 very relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Grade(u8);

impl Grade {
    pub const NOT_RELEVANT: Grade = Grade(0);
    pub const RELEVANT: Grade = Grade(1);
    pub const VERY_RELEVANT: Grade = Grade(2);

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_relevant(self) -> bool {
        self.0 >= 1
    }

    /// `2^grade - 1`
    pub fn gain(self) -> f64 {
        ((1u32 << self.0) - 1) as f64
    }
}

impl TryFrom<u8> for Grade {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        if v <= 2 {
            Ok(Grade(v))
        } else {
            Err(Error::validation(format!("grade {v} outside 0..=2")))
        }
    }
}

impl From<Grade> for u8 {
    fn from(g: Grade) -> u8 {
        g.0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, Grade>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment. Re-judging a pair with a different grade is an error.
    pub fn insert(&mut self, topic_id: impl Into<String>, doc_id: impl Into<String>, grade: u8) -> Result<()> {
        let grade = Grade::try_from(grade)?;
        let topic_id = topic_id.into();
        let doc_id = doc_id.into();
        let topic = self.judgments.entry(topic_id.clone()).or_default();
        match topic.get(&doc_id) {
            Some(&g) if g != grade => Err(Error::validation(format!(
                "conflicting grades for ({topic_id}, {doc_id}): {} and {}",
                g.0, grade.0
            ))),
            _ => {
                topic.insert(doc_id, grade);
                Ok(())
            }
        }
    }

    pub fn grade(&self, topic_id: &str, doc_id: &str) -> Option<Grade> {
        self.judgments.get(topic_id)?.get(doc_id).copied()
    }

    pub fn topic(&self, topic_id: &str) -> Option<&BTreeMap<String, Grade>> {
        self.judgments.get(topic_id)
    }

    pub fn contains_topic(&self, topic_id: &str) -> bool {
        self.judgments.contains_key(topic_id)
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parse_trec(text: &str) -> Result<Self> {
        let mut qrels = Self::new();
        for (idx, line) in text.lines().enumerate() {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.is_empty() {
                continue;
            }
            if cols.len() != 4 {
                return Err(Error::parse(
                    idx + 1,
                    format!("qrels line needs 4 columns, got {}", cols.len()),
                ));
            }
            let grade: u8 = cols[3]
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("grade {:?} is not an integer in 0..=2", cols[3])))?;
            qrels
                .insert(cols[0], cols[2], grade)
                .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        }
        Ok(qrels)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_trec(&text)
    }

    pub fn to_trec(&self) -> String {
        let mut out = String::new();
        for (topic, docs) in &self.judgments {
            for (doc, grade) in docs {
                let _ = writeln!(out, "{topic} 0 {doc} {}", grade.0);
            }
        }
        out
    }
}

/// Ranked results per topic from one system.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedRun {
    tag: String,
    topics: BTreeMap<String, Vec<Hit>>,
}

impl RankedRun {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            topics: BTreeMap::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Sets the ranking of `topic_id`. Hits are reordered by score
    /// descending then doc_id ascending; duplicate doc ids and non-finite
    /// scores are rejected.
    pub fn insert_topic(&mut self, topic_id: impl Into<String>, mut hits: Vec<Hit>) -> Result<()> {
        let topic_id = topic_id.into();
        if let Some(h) = hits.iter().find(|h| !h.score.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite score for {} in topic {topic_id}",
                h.doc_id
            )));
        }
        hits.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc_id.cmp(&b.doc_id)));
        let mut ids: Vec<&str> = hits.iter().map(|h| h.doc_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::validation(format!(
                "doc {} ranked twice for topic {topic_id}",
                w[0]
            )));
        }
        self.topics.insert(topic_id, hits);
        Ok(())
    }

    pub fn insert_result(&mut self, topic_id: impl Into<String>, result: &SearchResult) -> Result<()> {
        self.insert_topic(topic_id, result.hits.clone())
    }

    pub fn topic(&self, topic_id: &str) -> Option<&[Hit]> {
        self.topics.get(topic_id).map(Vec::as_slice)
    }

    pub fn topics(&self) -> impl Iterator<Item = (&str, &[Hit])> {
        self.topics.iter().map(|(t, h)| (t.as_str(), h.as_slice()))
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &str> {
        self.topics.keys().map(String::as_str)
    }

    pub fn remove_topic(&mut self, topic_id: &str) -> Option<Vec<Hit>> {
        self.topics.remove(topic_id)
    }

    /// Parses a run file. The tag of the first line names the run; hits are
    /// re-sorted by score, so the rank column is informational.
    pub fn parse_trec(text: &str) -> Result<Self> {
        let mut tag: Option<String> = None;
        let mut topics: BTreeMap<String, Vec<Hit>> = BTreeMap::new();
        let mut first_line: BTreeMap<String, usize> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.is_empty() {
                continue;
            }
            if cols.len() != 6 {
                return Err(Error::parse(
                    idx + 1,
                    format!("run line needs 6 columns, got {}", cols.len()),
                ));
            }
            cols[3]
                .parse::<u64>()
                .map_err(|_| Error::parse(idx + 1, format!("rank {:?} is not an integer", cols[3])))?;
            let score: f64 = cols[4]
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("score {:?} is not a number", cols[4])))?;
            tag.get_or_insert_with(|| cols[5].to_string());
            first_line.entry(cols[0].to_string()).or_insert(idx + 1);
            topics.entry(cols[0].to_string()).or_default().push(Hit {
                doc_id: cols[2].to_string(),
                score,
            });
        }
        let mut run = RankedRun::new(tag.unwrap_or_default());
        for (topic, hits) in topics {
            let line = first_line[&topic];
            run.insert_topic(topic, hits)
                .map_err(|e| Error::parse(line, e.to_string()))?;
        }
        Ok(run)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_trec(&text)
    }

    /// TREC run text in topic-id order. Scores use the shortest decimal form
    /// that round-trips, so output is canonical and lossless.
    pub fn to_trec(&self) -> String {
        let tag = if self.tag.is_empty() { "run" } else { self.tag.as_str() };
        let mut out = String::new();
        for (topic, hits) in &self.topics {
            for (rank, hit) in hits.iter().enumerate() {
                let _ = writeln!(out, "{topic} Q0 {} {} {} {tag}", hit.doc_id, rank + 1, hit.score);
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_trec()).map_err(|e| Error::io(path, e))
    }
}
