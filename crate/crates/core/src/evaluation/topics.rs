//! Topics and stratified sampling of topics from a query log.
//!
//! Log entries fall into three frequency strata: `high` (more than 10 log
//! entries), `medium` (2 to 10) and `low` (exactly 1). Sampling is uniform
//! without replacement inside each stratum, driven by one seeded ChaCha8
//! generator consumed in the order high, medium, low.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    High,
    Medium,
    Low,
}

impl Stratum {
    pub const ALL: [Stratum; 3] = [Stratum::High, Stratum::Medium, Stratum::Low];

    /// Stratum of a query seen `frequency` times; `None` for 0.
    pub fn for_frequency(frequency: u64) -> Option<Self> {
        match frequency {
            0 => None,
            1 => Some(Stratum::Low),
            2..=10 => Some(Stratum::Medium),
            _ => Some(Stratum::High),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stratum::High => "high",
            Stratum::Medium => "medium",
            Stratum::Low => "low",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: String,
    pub query: String,
    pub stratum: Stratum,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub query: String,
    pub frequency: u64,
}

impl LogEntry {
    pub fn new(query: impl Into<String>, frequency: u64) -> Self {
        Self {
            query: query.into(),
            frequency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrataCounts {
    pub high: usize,
    pub medium: usize,
    pub low: usize,
}

impl StrataCounts {
    pub fn new(high: usize, medium: usize, low: usize) -> Self {
        Self { high, medium, low }
    }

    fn get(&self, s: Stratum) -> usize {
        match s {
            Stratum::High => self.high,
            Stratum::Medium => self.medium,
            Stratum::Low => self.low,
        }
    }

    pub fn total(&self) -> usize {
        self.high + self.medium + self.low
    }
}

impl std::str::FromStr for StrataCounts {
    type Err = Error;

    /// `high,medium,low`, e.g. `27,17,16`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::validation(format!("strata counts {s:?} must be three integers")))?;
        match parts.as_slice() {
            &[h, m, l] => Ok(Self::new(h, m, l)),
            _ => Err(Error::validation(format!("strata counts {s:?} must be three integers"))),
        }
    }
}

/// Counts identical (trimmed) queries in a raw log, one query per line.
pub fn aggregate_log<'a>(lines: impl IntoIterator<Item = &'a str>) -> Vec<LogEntry> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for line in lines {
        let q = line.trim();
        if !q.is_empty() {
            *counts.entry(q).or_default() += 1;
        }
    }
    counts.into_iter().map(|(q, n)| LogEntry::new(q, n)).collect()
}

/// Parses `query<TAB>frequency` lines.
pub fn parse_log_tsv(text: &str) -> Result<Vec<LogEntry>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (query, freq) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::parse(idx + 1, "expected query<TAB>frequency"))?;
        let frequency = freq
            .trim()
            .parse()
            .map_err(|_| Error::parse(idx + 1, format!("frequency {freq:?} is not an integer")))?;
        out.push(LogEntry::new(query.trim(), frequency));
    }
    Ok(out)
}

/// Samples `counts` topics per stratum from `entries`.
///
/// Entries are first put in canonical order (frequency descending, query
/// ascending), so the result depends only on the entry set and `seed`.
/// Topic ids are `T001`, `T002`, ... in output order.
pub fn sample_topics_from_log(entries: &[LogEntry], counts: StrataCounts, seed: u64) -> Result<Vec<Topic>> {
    let mut seen = BTreeSet::new();
    for e in entries {
        if e.query.trim().is_empty() {
            return Err(Error::validation("log entry with empty query"));
        }
        if e.frequency == 0 {
            return Err(Error::validation(format!("log entry {:?} has frequency 0", e.query)));
        }
        if !seen.insert(e.query.as_str()) {
            return Err(Error::validation(format!("log entry {:?} appears twice", e.query)));
        }
    }
    let mut sorted: Vec<&LogEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.query.cmp(&b.query)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = counts.total().to_string().len().max(3);
    let mut topics = Vec::with_capacity(counts.total());
    for stratum in Stratum::ALL {
        let mut pool: Vec<&LogEntry> = sorted
            .iter()
            .copied()
            .filter(|e| Stratum::for_frequency(e.frequency) == Some(stratum))
            .collect();
        let requested = counts.get(stratum);
        if pool.len() < requested {
            return Err(Error::InsufficientStratum {
                stratum: stratum.as_str(),
                available: pool.len(),
                requested,
            });
        }
        pool.shuffle(&mut rng);
        for e in pool.into_iter().take(requested) {
            topics.push(Topic {
                topic_id: format!("T{:0width$}", topics.len() + 1),
                query: e.query.clone(),
                stratum,
                frequency: e.frequency,
            });
        }
    }
    Ok(topics)
}

pub fn read_topics(path: &Path) -> Result<Vec<Topic>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let topics: Vec<Topic> = crate::index::parse_jsonl(std::io::BufReader::new(file), path)?;
    let mut ids = BTreeSet::new();
    for t in &topics {
        if t.query.trim().is_empty() {
            return Err(Error::validation(format!("topic {} has an empty query", t.topic_id)));
        }
        if !ids.insert(t.topic_id.as_str()) {
            return Err(Error::validation(format!("topic id {} appears twice", t.topic_id)));
        }
    }
    Ok(topics)
}

pub fn topics_to_jsonl(topics: &[Topic]) -> String {
    let mut out = Vec::new();
    for t in topics {
        serde_json::to_writer(&mut out, t).expect("topic serialization cannot fail");
        out.write_all(b"\n").expect("writing to a Vec cannot fail");
    }
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
