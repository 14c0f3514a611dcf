//! Retrieval toolkit for short survey-question texts.
//!
//! * [`analysis`]: the text-to-terms chain shared by every component.
//! * [`index`]: positional inverted index, BM25 scoring and boolean/phrase search.
//! * [`expansion`]: thesaurus and co-occurrence query expansion.
//! * [`evaluation`]: TREC-style qrels and runs, R@n, nDCG@n, paired t-test,
//!   stratified topic sampling.
//! * [`cli`]: the `surveyqe` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod expansion;
pub mod index;

pub use analysis::{analyze, AnalyzerConfig, Stemmer, TermSequence};
pub use error::{Error, Result};
pub use index::{build_index, search, Bm25Params, BooleanQuery, DocumentRecord, InvertedIndex, Operator};
