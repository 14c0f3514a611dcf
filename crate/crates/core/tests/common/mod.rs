//! Shared fixtures and brute-force oracles. Oracles only look at
//! whitespace-separated lowercase text and never call into the index.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use surveyqe::evaluation::{Qrels, RankedRun};
use surveyqe::index::Hit;
use surveyqe::{BooleanQuery, DocumentRecord, Operator};

pub const VOCAB: [&str; 12] = [
    "labor", "market", "vote", "trust", "youth", "income", "church", "school", "health", "family", "work", "city",
];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}

/// Documents of 1..=max_len words drawn from `vocab`, ids `d0000`...
pub fn random_corpus(rng: &mut impl Rng, n_docs: usize, max_len: usize, vocab: &[&str]) -> Vec<DocumentRecord> {
    (0..n_docs)
        .map(|i| {
            let len = rng.gen_range(1..=max_len);
            let words: Vec<&str> = (0..len).map(|_| *vocab.choose(rng).unwrap()).collect();
            DocumentRecord::new(format!("d{i:04}"), words.join(" "))
        })
        .collect()
}

pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

pub fn random_leaf(rng: &mut impl Rng, vocab: &[&str]) -> BooleanQuery {
    if rng.gen_bool(0.25) {
        let a = vocab.choose(rng).unwrap();
        let b = vocab.choose(rng).unwrap();
        BooleanQuery::phrase([*a, *b])
    } else {
        BooleanQuery::term(*vocab.choose(rng).unwrap())
    }
}

pub fn random_query(rng: &mut impl Rng, vocab: &[&str], depth: usize) -> BooleanQuery {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_leaf(rng, vocab);
    }
    let n = rng.gen_range(2..=3);
    let children = (0..n).map(|_| random_query(rng, vocab, depth - 1)).collect();
    let op = if rng.gen_bool(0.5) { Operator::And } else { Operator::Or };
    BooleanQuery::Group(op, children)
}

/// Does the word list satisfy the tree?
pub fn brute_matches(doc: &[&str], query: &BooleanQuery) -> bool {
    match query {
        BooleanQuery::Term(t) => doc.iter().any(|w| w == t),
        BooleanQuery::Phrase(ts) => doc.windows(ts.len()).any(|win| win.iter().zip(ts).all(|(w, t)| w == t)),
        BooleanQuery::Group(Operator::And, cs) => cs.iter().all(|c| brute_matches(doc, c)),
        BooleanQuery::Group(Operator::Or, cs) => cs.iter().any(|c| brute_matches(doc, c)),
    }
}

pub fn query_terms(query: &BooleanQuery, out: &mut Vec<String>) {
    match query {
        BooleanQuery::Term(t) => out.push(t.clone()),
        BooleanQuery::Phrase(ts) => out.extend(ts.iter().cloned()),
        BooleanQuery::Group(_, cs) => cs.iter().for_each(|c| query_terms(c, out)),
    }
}

/// Okapi BM25 straight from the closed form over brute-force counts.
pub struct Bm25Oracle<'a> {
    docs: Vec<(&'a str, Vec<&'a str>)>,
    df: HashMap<&'a str, usize>,
    avgdl: f64,
    pub k1: f64,
    pub b: f64,
}

impl<'a> Bm25Oracle<'a> {
    pub fn new(corpus: &'a [DocumentRecord], k1: f64, b: f64) -> Self {
        let docs: Vec<(&str, Vec<&str>)> = corpus.iter().map(|d| (d.doc_id.as_str(), words(&d.text))).collect();
        let mut df = HashMap::new();
        for (_, ws) in &docs {
            let mut seen: Vec<&str> = ws.clone();
            seen.sort();
            seen.dedup();
            for w in seen {
                *df.entry(w).or_insert(0) += 1;
            }
        }
        let total: usize = docs.iter().map(|(_, ws)| ws.len()).sum();
        let avgdl = if docs.is_empty() {
            0.0
        } else {
            total as f64 / docs.len() as f64
        };
        Self { docs, df, avgdl, k1, b }
    }

    pub fn term_score(&self, term: &str, doc_idx: usize) -> f64 {
        let ws = &self.docs[doc_idx].1;
        let tf = ws.iter().filter(|w| **w == term).count() as f64;
        if tf == 0.0 {
            return 0.0;
        }
        let n = self.docs.len() as f64;
        let df = self.df[term] as f64;
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        let dl = ws.len() as f64;
        idf * tf * (self.k1 + 1.0) / (tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl))
    }

    /// (doc_id, score) for every matching document, sorted score desc then id asc.
    pub fn search(&self, query: &BooleanQuery) -> Vec<(String, f64)> {
        let mut terms = Vec::new();
        query_terms(query, &mut terms);
        terms.sort();
        terms.dedup();
        let mut hits: Vec<(String, f64)> = self
            .docs
            .iter()
            .enumerate()
            .filter(|(_, (_, ws))| brute_matches(ws, query))
            .map(|(i, (id, _))| (id.to_string(), terms.iter().map(|t| self.term_score(t, i)).sum()))
            .collect();
        hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        hits
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Library hits agree with oracle hits: same candidate set, per-document
/// scores within `tol`, and rank-wise scores within `tol` (near-ties may swap).
pub fn same_ranking(hits: &[Hit], oracle: &[(String, f64)], tol: f64) -> Result<(), String> {
    if hits.len() != oracle.len() {
        return Err(format!("{} hits vs {} oracle hits", hits.len(), oracle.len()));
    }
    let by_id: HashMap<&str, f64> = oracle.iter().map(|(id, s)| (id.as_str(), *s)).collect();
    for (rank, h) in hits.iter().enumerate() {
        let Some(&expected) = by_id.get(h.doc_id.as_str()) else {
            return Err(format!("{} is not a candidate", h.doc_id));
        };
        if !close(h.score, expected, tol) {
            return Err(format!("{}: score {} vs oracle {expected}", h.doc_id, h.score));
        }
        if !close(h.score, oracle[rank].1, tol) {
            return Err(format!(
                "rank {}: score {} vs oracle {}",
                rank + 1,
                h.score,
                oracle[rank].1
            ));
        }
        if rank > 0 {
            let prev = &hits[rank - 1];
            let ordered = prev.score > h.score || (prev.score == h.score && prev.doc_id < h.doc_id);
            if !ordered {
                return Err(format!("{} and {} out of order", prev.doc_id, h.doc_id));
            }
        }
    }
    Ok(())
}

/// Checks `query` against the expansion template: one OR group per distinct
/// query term (original first, then its expansions as Term or Phrase leaves,
/// at most `k + 1` leaves), groups joined by `op`; unexpanded terms are bare
/// leaves and a single group is not wrapped.
pub fn check_template(
    query: &BooleanQuery,
    terms: &[String],
    expansions: &dyn Fn(&str) -> Vec<String>,
    op: Operator,
    k: usize,
) -> Result<(), String> {
    let groups: Vec<&BooleanQuery> = match (terms.len(), query) {
        (0, _) => return Err("no query terms".into()),
        (1, q) => vec![q],
        (n, BooleanQuery::Group(o, cs)) if *o == op && cs.len() == n => cs.iter().collect(),
        (n, q) => return Err(format!("expected {op} group of {n} clauses, got {q}")),
    };
    for (term, group) in terms.iter().zip(groups) {
        let exp = expansions(term);
        let want_leaf = |e: &str| {
            let parts: Vec<&str> = e.split(' ').collect();
            if parts.len() == 1 {
                BooleanQuery::term(parts[0])
            } else {
                BooleanQuery::phrase(parts)
            }
        };
        if exp.is_empty() {
            if *group != BooleanQuery::term(term.as_str()) {
                return Err(format!("{term}: expected bare term, got {group}"));
            }
            continue;
        }
        let BooleanQuery::Group(Operator::Or, leaves) = group else {
            return Err(format!("{term}: expected OR group, got {group}"));
        };
        if leaves.len() > k + 1 {
            return Err(format!("{term}: {} leaves exceeds {}", leaves.len(), k + 1));
        }
        if leaves[0] != BooleanQuery::term(term.as_str()) {
            return Err(format!("{term}: first leaf is {}", leaves[0]));
        }
        let expected: Vec<BooleanQuery> = exp.iter().map(|e| want_leaf(e)).collect();
        if leaves[1..] != expected[..] {
            return Err(format!("{term}: expansion leaves differ in {group}"));
        }
    }
    Ok(())
}

pub fn hits(ids: &[&str]) -> Vec<Hit> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| Hit {
            doc_id: id.to_string(),
            score: 100.0 - i as f64,
        })
        .collect()
}

pub fn oracle_dcg(grades: &[u8], n: usize) -> f64 {
    grades
        .iter()
        .take(n)
        .enumerate()
        .map(|(j, &g)| (2f64.powi(g as i32) - 1.0) / ((j + 2) as f64).log2())
        .sum()
}

/// Max DCG@n over every ordering of `items` for each n in `cutoffs`
/// (Heap's algorithm, in place).
pub fn brute_idcg(items: &[u8], cutoffs: &[usize]) -> Vec<f64> {
    let mut a = items.to_vec();
    let mut best: Vec<f64> = cutoffs.iter().map(|&n| oracle_dcg(&a, n)).collect();
    let mut c = vec![0usize; a.len()];
    let mut i = 0;
    while i < a.len() {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            for (b, &n) in best.iter_mut().zip(cutoffs) {
                *b = b.max(oracle_dcg(&a, n));
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

pub struct Instance {
    pub run: RankedRun,
    pub qrels: Qrels,
    pub ranked: Vec<String>,
    pub judged: BTreeMap<String, u8>,
}

pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let pool: Vec<String> = (0..15).map(|i| format!("doc{i}")).collect();
    let n_judged = rng.gen_range(0..=8);
    let mut judged = BTreeMap::new();
    for d in pool.choose_multiple(rng, n_judged) {
        judged.insert(d.clone(), rng.gen_range(0..=2u8));
    }
    let n_ranked = rng.gen_range(0..=12);
    let ranked: Vec<String> = pool.choose_multiple(rng, n_ranked).cloned().collect();
    let mut qrels = Qrels::new();
    for (d, g) in &judged {
        qrels.insert("t", d.clone(), *g).unwrap();
    }
    qrels.insert("other", "doc0", 2).unwrap();
    let mut run = RankedRun::new("sys");
    let refs: Vec<&str> = ranked.iter().map(String::as_str).collect();
    run.insert_topic("t", hits(&refs)).unwrap();
    Instance {
        run,
        qrels,
        ranked,
        judged,
    }
}
