//! Query expansion.
//!
//! Every original query term becomes an OR group of itself and its expansion
//! terms; the groups are joined with the clause operator:
//!
//! ```text
//! (qt1 OR qt1_alt OR ...) AND/OR (qt2 OR qt2_alt OR ...)
//! ```
//!
//! Expansion terms come either from a [`Thesaurus`] (one relation hop,
//! filtered by type) or from a trained [`CooccurrenceModel`] (top-k
//! controlled terms by similarity).

mod cooccurrence;
mod thesaurus;

use crate::analysis::AnalyzerConfig;
use crate::error::{Error, Result};
use crate::index::{BooleanQuery, Operator};

pub use cooccurrence::{
    cosine, log_jaccard, read_training_corpus, suggest_terms, train_cooccurrence, CooccurrenceModel, SimilarityMeasure,
    Suggestion, TrainingRecord, DEFAULT_SUGGESTIONS, MODEL_FORMAT_VERSION,
};
pub use thesaurus::{expand_with_thesaurus, Concept, Relation, RelationFilter, RelationType, Thesaurus};

/// Source of expansion terms for a single normalized query term.
pub trait Expander {
    fn expansions(&self, term: &str) -> Result<Vec<String>>;
}

/// Leaves every term unexpanded.
pub struct NoExpansion;

impl Expander for NoExpansion {
    fn expansions(&self, _term: &str) -> Result<Vec<String>> {
        Ok(Vec::new())
    }
}

pub struct ThesaurusExpander<'a> {
    pub thesaurus: &'a Thesaurus,
    pub filter: RelationFilter,
}

impl Expander for ThesaurusExpander<'_> {
    fn expansions(&self, term: &str) -> Result<Vec<String>> {
        Ok(self.thesaurus.expand(term, &self.filter))
    }
}

pub struct CooccurrenceExpander<'a> {
    pub model: &'a CooccurrenceModel,
    pub measure: SimilarityMeasure,
    pub k: usize,
}

impl Expander for CooccurrenceExpander<'_> {
    fn expansions(&self, term: &str) -> Result<Vec<String>> {
        Ok(self
            .model
            .suggest(term, self.measure, self.k)?
            .into_iter()
            .map(|s| s.term)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub term: String,
    pub expansions: Vec<String>,
}

/// Expansion terms per original query term, in query order.
///
/// Expansions are stored in analyzed form (terms joined by one space), never
/// repeat, and never equal their original term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpansionPlan {
    entries: Vec<PlanEntry>,
}

impl ExpansionPlan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Plan for `raw_query`: one entry per distinct analyzed term.
    pub fn build(raw_query: &str, analyzer: &AnalyzerConfig, expander: &dyn Expander) -> Result<Self> {
        let terms = distinct_terms(raw_query, analyzer);
        if terms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let mut plan = Self::new();
        for term in terms {
            let expansions = expander.expansions(&term)?;
            plan.insert(term, expansions, analyzer);
        }
        Ok(plan)
    }

    /// Adds (or extends) the entry for `term`. Expansions are analyzed;
    /// empty, duplicate and self-referencing ones are dropped.
    pub fn insert<I, S>(&mut self, term: impl Into<String>, expansions: I, analyzer: &AnalyzerConfig)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let term = term.into();
        let idx = match self.entries.iter().position(|e| e.term == term) {
            Some(i) => i,
            None => {
                self.entries.push(PlanEntry {
                    term: term.clone(),
                    expansions: Vec::new(),
                });
                self.entries.len() - 1
            }
        };
        let entry = &mut self.entries[idx];
        for e in expansions {
            let normalized = analyzer.normalize(e.as_ref());
            if !normalized.is_empty() && normalized != term && !entry.expansions.contains(&normalized) {
                entry.expansions.push(normalized);
            }
        }
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn expansions(&self, term: &str) -> &[String] {
        self.entries
            .iter()
            .find(|e| e.term == term)
            .map(|e| e.expansions.as_slice())
            .unwrap_or(&[])
    }

    pub fn term_count(&self) -> usize {
        self.entries.len()
    }

    pub fn expansion_count(&self) -> usize {
        self.entries.iter().map(|e| e.expansions.len()).sum()
    }
}

fn distinct_terms(raw_query: &str, analyzer: &AnalyzerConfig) -> Vec<String> {
    let mut terms = analyzer.terms(raw_query);
    let mut seen = std::collections::HashSet::new();
    terms.retain(|t| seen.insert(t.clone()));
    terms
}

/// Builds the boolean query for `raw_query`: one OR group per distinct query
/// term holding the term and its planned expansions (multi-word expansions as
/// phrases), groups joined by `clause_operator`. A term without expansions is
/// a bare `Term` leaf, and a single group is returned without a wrapper.
pub fn build_expanded_query(
    raw_query: &str,
    plan: &ExpansionPlan,
    clause_operator: Operator,
    analyzer: &AnalyzerConfig,
) -> Result<BooleanQuery> {
    let terms = distinct_terms(raw_query, analyzer);
    if terms.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let mut groups: Vec<BooleanQuery> = terms
        .into_iter()
        .map(|term| {
            let expansions = plan.expansions(&term);
            let mut leaves = Vec::with_capacity(expansions.len() + 1);
            leaves.push(BooleanQuery::Term(term));
            leaves.extend(
                expansions
                    .iter()
                    .filter_map(|e| BooleanQuery::leaf(e.split(' ').map(str::to_string).collect())),
            );
            if leaves.len() == 1 {
                leaves.pop().expect("one leaf")
            } else {
                BooleanQuery::Group(Operator::Or, leaves)
            }
        })
        .collect();
    Ok(if groups.len() == 1 {
        groups.pop().expect("one group")
    } else {
        BooleanQuery::Group(clause_operator, groups)
    })
}

/// The unexpanded query for `raw_query`.
pub fn baseline_query(raw_query: &str, clause_operator: Operator, analyzer: &AnalyzerConfig) -> Result<BooleanQuery> {
    build_expanded_query(raw_query, &ExpansionPlan::new(), clause_operator, analyzer)
}

/// Mean number of expansion terms per original query term over all plans.
pub fn mean_expansion_count(plans: &[ExpansionPlan]) -> Result<f64> {
    if plans.is_empty() {
        return Err(Error::validation("mean expansion count needs at least one plan"));
    }
    let terms: usize = plans.iter().map(ExpansionPlan::term_count).sum();
    if terms == 0 {
        return Err(Error::validation("plans contain no query terms"));
    }
    let expansions: usize = plans.iter().map(ExpansionPlan::expansion_count).sum();
    Ok(expansions as f64 / terms as f64)
}
