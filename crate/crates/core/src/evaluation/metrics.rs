//! R@n and nDCG@n, per topic and averaged over a run.
//!
//! ```text
//! nDCG@n = DCG@n / IDCG@n,   DCG@n = sum_{j=1..n} (2^r(j) - 1) / log2(1 + j)
//! R@n    = |relevant docs in top n| / n
//! ```
//!
//! `r(j)` is the qrels grade of the document at rank `j` (0 if unjudged);
//! IDCG ranks all judged documents of the topic by grade. Grades 1 and 2
//! both count as relevant for R@n.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{paired_t_test, TTest};
use super::trec::{Grade, Qrels, RankedRun};
use crate::error::{Error, Result};
use crate::index::Hit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Recall(usize),
    Ndcg(usize),
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Recall(n) => write!(f, "R@{n}"),
            Metric::Ndcg(n) => write!(f, "nDCG@{n}"),
        }
    }
}

impl Metric {
    /// Column order used in reports: every R@n, then every nDCG@n.
    pub fn columns(cutoffs: &[usize]) -> Vec<Metric> {
        cutoffs
            .iter()
            .map(|&n| Metric::Recall(n))
            .chain(cutoffs.iter().map(|&n| Metric::Ndcg(n)))
            .collect()
    }
}

fn discount(rank: usize) -> f64 {
    (1.0 + rank as f64).log2()
}

/// DCG of the first `n` grades.
pub fn dcg(grades: &[Grade], n: usize) -> f64 {
    grades
        .iter()
        .take(n)
        .enumerate()
        .map(|(i, g)| g.gain() / discount(i + 1))
        .sum()
}

/// nDCG@n for retrieved grades (rank order) against every judged grade.
pub fn ndcg_from_grades(retrieved: &[Grade], judged: &[Grade], n: usize) -> f64 {
    let mut ideal = judged.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(&ideal, n);
    if idcg == 0.0 {
        return 0.0;
    }
    dcg(retrieved, n) / idcg
}

fn check_cutoff(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::validation("cutoff n must be positive"))
    } else {
        Ok(())
    }
}

fn retrieved_grades(hits: &[Hit], judged: Option<&BTreeMap<String, Grade>>, n: usize) -> Vec<Grade> {
    hits.iter()
        .take(n)
        .map(|h| {
            judged
                .and_then(|j| j.get(&h.doc_id).copied())
                .unwrap_or(Grade::NOT_RELEVANT)
        })
        .collect()
}

fn ndcg_topic(hits: &[Hit], judged: Option<&BTreeMap<String, Grade>>, n: usize) -> f64 {
    let all: Vec<Grade> = judged.map(|j| j.values().copied().collect()).unwrap_or_default();
    ndcg_from_grades(&retrieved_grades(hits, judged, n), &all, n)
}

fn recall_topic(hits: &[Hit], judged: Option<&BTreeMap<String, Grade>>, n: usize) -> f64 {
    let relevant = retrieved_grades(hits, judged, n)
        .into_iter()
        .filter(|g| g.is_relevant())
        .count();
    relevant as f64 / n as f64
}

pub fn ndcg_at(run: &RankedRun, qrels: &Qrels, topic_id: &str, n: usize) -> Result<f64> {
    check_cutoff(n)?;
    let hits = run
        .topic(topic_id)
        .ok_or_else(|| Error::UnknownTopic(topic_id.to_string()))?;
    Ok(ndcg_topic(hits, qrels.topic(topic_id), n))
}

pub fn recall_at(run: &RankedRun, qrels: &Qrels, topic_id: &str, n: usize) -> Result<f64> {
    check_cutoff(n)?;
    let hits = run
        .topic(topic_id)
        .ok_or_else(|| Error::UnknownTopic(topic_id.to_string()))?;
    Ok(recall_topic(hits, qrels.topic(topic_id), n))
}

/// What to do with a run topic that has no qrels entry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingQrels {
    #[default]
    Skip,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub system: String,
    pub metrics: Vec<String>,
    /// topic id -> one value per metric column
    pub topics: BTreeMap<String, Vec<f64>>,
    pub mean: Vec<f64>,
    pub skipped: Vec<String>,
    #[serde(skip)]
    columns: Vec<Metric>,
}

impl MetricReport {
    pub fn columns(&self) -> &[Metric] {
        &self.columns
    }

    pub fn value(&self, topic_id: &str, metric: Metric) -> Option<f64> {
        let col = self.columns.iter().position(|&m| m == metric)?;
        self.topics.get(topic_id).map(|v| v[col])
    }

    pub fn mean_of(&self, metric: Metric) -> Option<f64> {
        let col = self.columns.iter().position(|&m| m == metric)?;
        Some(self.mean[col])
    }

    /// Per-topic values of `metric` in topic-id order.
    pub fn series(&self, metric: Metric) -> Option<Vec<f64>> {
        let col = self.columns.iter().position(|&m| m == metric)?;
        Some(self.topics.values().map(|v| v[col]).collect())
    }

    /// Tab-separated table: one row per topic, then an `all` row of means.
    /// Values use six decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("topic");
        for m in &self.metrics {
            out.push('\t');
            out.push_str(m);
        }
        out.push('\n');
        let rows = self
            .topics
            .iter()
            .map(|(t, v)| (t.as_str(), v))
            .chain(std::iter::once(("all", &self.mean)));
        for (topic, values) in rows {
            out.push_str(topic);
            for v in values {
                let _ = write!(out, "\t{v:.6}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Per-topic metrics at every cutoff plus arithmetic means over topics.
pub fn evaluate_run(run: &RankedRun, qrels: &Qrels, cutoffs: &[usize], policy: MissingQrels) -> Result<MetricReport> {
    if cutoffs.is_empty() {
        return Err(Error::validation("at least one cutoff is required"));
    }
    cutoffs.iter().try_for_each(|&n| check_cutoff(n))?;
    let columns = Metric::columns(cutoffs);

    let mut skipped = Vec::new();
    let mut evaluated: Vec<(&str, &[Hit])> = Vec::new();
    for (topic, hits) in run.topics() {
        if qrels.contains_topic(topic) {
            evaluated.push((topic, hits));
        } else if policy == MissingQrels::Error {
            return Err(Error::validation(format!(
                "run topic {topic} has no relevance judgments"
            )));
        } else {
            log::warn!("topic {topic} has no relevance judgments; skipped");
            skipped.push(topic.to_string());
        }
    }

    let rows: Vec<(String, Vec<f64>)> = evaluated
        .par_iter()
        .map(|&(topic, hits)| {
            let judged = qrels.topic(topic);
            let values = columns
                .iter()
                .map(|m| match *m {
                    Metric::Recall(n) => recall_topic(hits, judged, n),
                    Metric::Ndcg(n) => ndcg_topic(hits, judged, n),
                })
                .collect();
            (topic.to_string(), values)
        })
        .collect();

    let mut mean = vec![0.0; columns.len()];
    if !rows.is_empty() {
        for (c, slot) in mean.iter_mut().enumerate() {
            *slot = rows.iter().map(|(_, v)| v[c]).sum::<f64>() / rows.len() as f64;
        }
    }
    Ok(MetricReport {
        system: run.tag().to_string(),
        metrics: columns.iter().map(Metric::to_string).collect(),
        topics: rows.into_iter().collect(),
        mean,
        skipped,
        columns,
    })
}

/// One metric column of a two-system comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricComparison {
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub p: f64,
    pub significant_at_0_1: bool,
    pub significant_at_0_05: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub system_a: String,
    pub system_b: String,
    pub topics: usize,
    pub metrics: Vec<MetricComparison>,
}

fn stars(p: f64) -> &'static str {
    if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

impl Comparison {
    /// Table with one row per system, a t row and a p row. System B values
    /// are starred: `*` p < 0.1, `**` p < 0.05.
    pub fn to_table(&self) -> String {
        let mut out = String::from("system");
        for m in &self.metrics {
            let _ = write!(out, "\t{}", m.metric);
        }
        let _ = write!(out, "\n{}", self.system_a);
        for m in &self.metrics {
            let _ = write!(out, "\t{:.4}", m.mean_a);
        }
        let _ = write!(out, "\n{}", self.system_b);
        for m in &self.metrics {
            let _ = write!(out, "\t{:.4}{}", m.mean_b, stars(m.p));
        }
        out.push_str("\nt");
        for m in &self.metrics {
            let _ = write!(out, "\t{:.4}", m.t);
        }
        out.push_str("\np");
        for m in &self.metrics {
            let _ = write!(out, "\t{:.4}", m.p);
        }
        out.push('\n');
        out
    }
}

/// Paired comparison of two reports over the same topics and metrics.
/// The t statistic is for `b - a`.
pub fn compare_reports(a: &MetricReport, b: &MetricReport) -> Result<Comparison> {
    let topics_a: Vec<&String> = a.topics.keys().collect();
    let topics_b: Vec<&String> = b.topics.keys().collect();
    if topics_a != topics_b {
        let only_a: Vec<&str> = a
            .topics
            .keys()
            .filter(|t| !b.topics.contains_key(*t))
            .map(String::as_str)
            .collect();
        let only_b: Vec<&str> = b
            .topics
            .keys()
            .filter(|t| !a.topics.contains_key(*t))
            .map(String::as_str)
            .collect();
        return Err(Error::validation(format!(
            "topic sets differ: only in {}: [{}]; only in {}: [{}]",
            a.system,
            only_a.join(", "),
            b.system,
            only_b.join(", ")
        )));
    }
    if a.columns != b.columns {
        return Err(Error::validation("reports use different metric columns"));
    }
    let metrics = a
        .columns
        .iter()
        .map(|&m| {
            let sa = a.series(m).expect("column exists");
            let sb = b.series(m).expect("column exists");
            let TTest { t, p_two_sided: p, .. } = paired_t_test(&sb, &sa)?;
            Ok(MetricComparison {
                metric: m.to_string(),
                mean_a: a.mean_of(m).expect("column exists"),
                mean_b: b.mean_of(m).expect("column exists"),
                t,
                p,
                significant_at_0_1: p < 0.1,
                significant_at_0_05: p < 0.05,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison {
        system_a: a.system.clone(),
        system_b: b.system.clone(),
        topics: a.topics.len(),
        metrics,
    })
}
