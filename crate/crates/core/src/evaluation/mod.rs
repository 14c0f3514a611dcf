//! TREC-style evaluation: graded qrels, ranked runs, R@n and nDCG@n,
//! paired t-tests and stratified topic sampling.

mod metrics;
mod stats;
mod topics;
mod trec;

pub use metrics::{
    compare_reports, dcg, evaluate_run, ndcg_at, ndcg_from_grades, recall_at, Comparison, Metric, MetricComparison,
    MetricReport, MissingQrels,
};
pub use stats::{ln_gamma, paired_t_test, regularized_incomplete_beta, student_t_two_sided, TTest};
pub use topics::{
    aggregate_log, parse_log_tsv, read_topics, sample_topics_from_log, topics_to_jsonl, LogEntry, StrataCounts,
    Stratum, Topic,
};
pub use trec::{Grade, Qrels, RankedRun};
