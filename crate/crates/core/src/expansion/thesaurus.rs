//! Thesaurus loading and one-hop relation expansion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::AnalyzerConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationType {
    Synonym,
    Related,
    Association,
    Broader,
    Narrower,
    Preferred,
}

impl RelationType {
    pub const ALL: [RelationType; 6] = [
        RelationType::Synonym,
        RelationType::Related,
        RelationType::Association,
        RelationType::Broader,
        RelationType::Narrower,
        RelationType::Preferred,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RelationType::Synonym => "synonym",
            RelationType::Related => "related",
            RelationType::Association => "association",
            RelationType::Broader => "broader",
            RelationType::Narrower => "narrower",
            RelationType::Preferred => "preferred",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::validation(format!("unknown relation type {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    #[serde(rename = "type")]
    pub kind: RelationType,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub preferred: String,
    #[serde(default)]
    pub alternatives: Vec<String>,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

/// Relation types followed during expansion. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFilter {
    allowed: BTreeSet<RelationType>,
}

impl RelationFilter {
    pub fn new(allowed: impl IntoIterator<Item = RelationType>) -> Result<Self> {
        let allowed: BTreeSet<_> = allowed.into_iter().collect();
        if allowed.is_empty() {
            return Err(Error::validation("relation filter must allow at least one type"));
        }
        Ok(Self { allowed })
    }

    /// Profile for a general-language thesaurus: synonyms and associations.
    pub fn general() -> Self {
        Self::new([RelationType::Synonym, RelationType::Association]).expect("non-empty")
    }

    /// Profile for a domain thesaurus: synonyms, related and preferred terms.
    pub fn domain() -> Self {
        Self::new([RelationType::Synonym, RelationType::Related, RelationType::Preferred]).expect("non-empty")
    }

    pub fn allows(&self, kind: RelationType) -> bool {
        self.allowed.contains(&kind)
    }

    pub fn allowed(&self) -> impl Iterator<Item = RelationType> + '_ {
        self.allowed.iter().copied()
    }
}

impl FromStr for RelationFilter {
    type Err = Error;

    /// `general`, `domain`, or a comma-separated list of relation types.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "general" => Ok(Self::general()),
            "domain" => Ok(Self::domain()),
            list => Self::new(
                list.split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(RelationType::from_str)
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

/// A thesaurus with labels normalized by one analyzer.
#[derive(Debug, Clone)]
pub struct Thesaurus {
    concepts: Vec<Concept>,
    analyzer: AnalyzerConfig,
    by_label: HashMap<String, Vec<usize>>,
    targets: Vec<Vec<(RelationType, String)>>,
}

impl Thesaurus {
    pub fn new(concepts: Vec<Concept>, analyzer: AnalyzerConfig) -> Result<Self> {
        let mut by_label: HashMap<String, Vec<usize>> = HashMap::new();
        let mut targets = Vec::with_capacity(concepts.len());
        for (i, c) in concepts.iter().enumerate() {
            if c.preferred.trim().is_empty() {
                return Err(Error::validation(format!(
                    "concept #{} has an empty preferred label",
                    i + 1
                )));
            }
            if let Some(bad) = c.alternatives.iter().find(|a| a.trim().is_empty()) {
                return Err(Error::validation(format!(
                    "concept {:?} has an empty alternative label {bad:?}",
                    c.preferred
                )));
            }
            let mut labels: Vec<String> = std::iter::once(&c.preferred)
                .chain(&c.alternatives)
                .map(|l| analyzer.normalize(l))
                .filter(|l| !l.is_empty())
                .collect();
            labels.sort();
            labels.dedup();
            for label in labels {
                by_label.entry(label).or_default().push(i);
            }
            let mut normalized = Vec::with_capacity(c.relations.len());
            for r in &c.relations {
                if r.target.trim().is_empty() {
                    return Err(Error::validation(format!(
                        "concept {:?} has a {} relation with an empty target",
                        c.preferred, r.kind
                    )));
                }
                let target = analyzer.normalize(&r.target);
                if !target.is_empty() {
                    normalized.push((r.kind, target));
                }
            }
            targets.push(normalized);
        }
        Ok(Self {
            concepts,
            analyzer,
            by_label,
            targets,
        })
    }

    pub fn from_json(json: &str, analyzer: AnalyzerConfig) -> Result<Self> {
        let concepts: Vec<Concept> =
            serde_json::from_str(json).map_err(|e| Error::validation(format!("thesaurus: {e}")))?;
        Self::new(concepts, analyzer)
    }

    pub fn load(path: &Path, analyzer: AnalyzerConfig) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, analyzer)
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn analyzer(&self) -> &AnalyzerConfig {
        &self.analyzer
    }

    /// Targets one allowed relation away from every concept labelled `term`.
    ///
    /// `term` must already be normalized. Output follows concept order, then
    /// relation order, without duplicates and without `term` itself.
    pub fn expand(&self, term: &str, filter: &RelationFilter) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let Some(concepts) = self.by_label.get(term) else {
            return out;
        };
        for &c in concepts {
            for (kind, target) in &self.targets[c] {
                if filter.allows(*kind) && target != term && seen.insert(target.as_str()) {
                    out.push(target.clone());
                }
            }
        }
        out
    }
}

pub fn expand_with_thesaurus(term: &str, thesaurus: &Thesaurus, filter: &RelationFilter) -> Vec<String> {
    thesaurus.expand(term, filter)
}
