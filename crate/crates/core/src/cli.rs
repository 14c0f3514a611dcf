//! `surveyqe` command-line front end.
//!
//! Every subcommand writes its human-readable output to the supplied writer
//! and returns an [`Error`]; `main` maps I/O errors to exit status 2 and all
//! other errors to 1.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{load_stopwords, AnalyzerConfig, Stemmer};
use crate::error::{Error, Result};
use crate::evaluation::{
    aggregate_log, compare_reports, evaluate_run, parse_log_tsv, read_topics, sample_topics_from_log, topics_to_jsonl,
    MetricReport, MissingQrels, Qrels, RankedRun, StrataCounts, Topic,
};
use crate::expansion::{
    build_expanded_query, mean_expansion_count, read_training_corpus, train_cooccurrence, CooccurrenceExpander,
    CooccurrenceModel, Expander, ExpansionPlan, NoExpansion, RelationFilter, SimilarityMeasure, Thesaurus,
    ThesaurusExpander, DEFAULT_SUGGESTIONS,
};
use crate::index::{build_index, read_corpus, search, Bm25Params, BooleanQuery, InvertedIndex, Operator};

#[derive(Debug, Parser)]
#[command(
    name = "surveyqe",
    version,
    about = "BM25 search, query expansion and TREC-style evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from a JSON-lines corpus
    Index(IndexArgs),
    /// Train a co-occurrence model from an annotated JSON-lines corpus
    TrainCooc(TrainArgs),
    /// Suggest controlled terms for each term of a query
    Suggest(SuggestArgs),
    /// Print the expanded boolean query for a raw query
    Expand(ExpandArgs),
    /// Search an index
    Search(SearchArgs),
    /// Run every topic through (expanded) search and evaluate the run
    RunExperiment(Box<ExperimentArgs>),
    /// Compare two runs with paired t-tests
    Compare(CompareArgs),
    /// Draw a stratified topic sample from a query log
    SampleTopics(SampleArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct AnalyzerArgs {
    /// Analyzer config JSON
    #[arg(long)]
    pub analyzer: Option<PathBuf>,
    /// Stopword list added to the analyzer config
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Override the analyzer's stemmer
    #[arg(long, value_enum)]
    pub stemmer: Option<StemmerArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StemmerArg {
    None,
    LightSuffix,
}

impl AnalyzerArgs {
    pub fn resolve(&self) -> Result<AnalyzerConfig> {
        resolve_analyzer(self.analyzer.as_deref(), self.stopwords.as_deref(), self.stemmer)
    }
}

fn resolve_analyzer(
    config: Option<&Path>,
    stopwords: Option<&Path>,
    stemmer: Option<StemmerArg>,
) -> Result<AnalyzerConfig> {
    let mut analyzer = match config {
        Some(p) => AnalyzerConfig::load(p)?,
        None => AnalyzerConfig::default(),
    };
    if let Some(p) = stopwords {
        analyzer.stopwords.extend(load_stopwords(p)?);
    }
    if let Some(s) = stemmer {
        analyzer.stemmer = match s {
            StemmerArg::None => Stemmer::None,
            StemmerArg::LightSuffix => Stemmer::LightSuffix,
        };
    }
    Ok(analyzer)
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub analyzer: AnalyzerArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub analyzer: AnalyzerArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SuggestArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value = "log_jaccard")]
    pub measure: SimilarityMeasure,
    #[arg(long, default_value_t = DEFAULT_SUGGESTIONS)]
    pub k: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMode {
    #[default]
    None,
    Thesaurus,
    Cooccurrence,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub query: String,
    #[arg(long, value_enum, default_value = "thesaurus")]
    pub mode: ExpansionMode,
    /// Index whose analyzer is used (otherwise the model's, or --analyzer)
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[command(flatten)]
    pub analyzer: AnalyzerArgs,
    #[arg(long)]
    pub thesaurus: Option<PathBuf>,
    /// `general`, `domain` or a comma-separated list of relation types
    #[arg(long, default_value = "domain")]
    pub relations: String,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value = "log_jaccard")]
    pub measure: SimilarityMeasure,
    #[arg(long, default_value_t = DEFAULT_SUGGESTIONS)]
    pub k: usize,
    #[arg(long, default_value = "OR")]
    pub operator: Operator,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub query: String,
    /// Treat the query as boolean syntax: `(a OR "b c") AND d`
    #[arg(long)]
    pub boolean: bool,
    #[arg(long, default_value = "OR")]
    pub operator: Operator,
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.75)]
    pub b: f64,
}

#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    /// Experiment config JSON; relative paths inside resolve against its directory
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub analyzer: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub topics: Option<PathBuf>,
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ExpansionMode>,
    #[arg(long)]
    pub thesaurus: Option<PathBuf>,
    #[arg(long)]
    pub relations: Option<String>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub measure: Option<SimilarityMeasure>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub operator: Option<Operator>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Comma-separated cutoffs, e.g. 5,10
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    #[arg(long)]
    pub run_out: Option<PathBuf>,
    /// Report path prefix; writes <prefix>.tsv and <prefix>.json
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    #[arg(long)]
    pub tag: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub query_log: Option<PathBuf>,
    #[arg(long)]
    pub strata: Option<String>,
    #[arg(long, value_enum)]
    pub missing_qrels: Option<MissingQrelsArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MissingQrelsArg {
    Skip,
    Error,
}

impl From<MissingQrelsArg> for MissingQrels {
    fn from(a: MissingQrelsArg) -> Self {
        match a {
            MissingQrelsArg::Skip => MissingQrels::Skip,
            MissingQrelsArg::Error => MissingQrels::Error,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub run_a: PathBuf,
    #[arg(long)]
    pub run_b: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "5,10")]
    pub cutoffs: Vec<usize>,
    /// Also write the comparison as JSON
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// `query<TAB>frequency` lines, or one raw query per line with --raw
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub raw: bool,
    /// high,medium,low
    #[arg(long, default_value = "27,17,16")]
    pub strata: StrataCounts,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Complete description of one experiment. Serialized as a single JSON
/// document; any command-line flag overrides the corresponding field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub index: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub analyzer: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub mode: ExpansionMode,
    pub thesaurus: Option<PathBuf>,
    pub relations: String,
    pub model: Option<PathBuf>,
    pub measure: SimilarityMeasure,
    pub k: usize,
    pub operator: Operator,
    pub bm25: Bm25Params,
    pub cutoffs: Vec<usize>,
    pub run_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub tag: Option<String>,
    pub seed: u64,
    pub query_log: Option<PathBuf>,
    pub strata: String,
    pub missing_qrels: MissingQrels,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            index: None,
            corpus: None,
            analyzer: None,
            stopwords: None,
            topics: None,
            qrels: None,
            mode: ExpansionMode::None,
            thesaurus: None,
            relations: "domain".into(),
            model: None,
            measure: SimilarityMeasure::LogJaccard,
            k: DEFAULT_SUGGESTIONS,
            operator: Operator::Or,
            bm25: Bm25Params::default(),
            cutoffs: vec![5, 10],
            run_out: None,
            report_out: None,
            tag: None,
            seed: 0,
            query_log: None,
            strata: "27,17,16".into(),
            missing_qrels: MissingQrels::Skip,
        }
    }
}

impl ExperimentConfig {
    /// Loads a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in config.paths_mut().into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    fn paths_mut(&mut self) -> [&mut Option<PathBuf>; 10] {
        [
            &mut self.index,
            &mut self.corpus,
            &mut self.analyzer,
            &mut self.stopwords,
            &mut self.topics,
            &mut self.qrels,
            &mut self.thesaurus,
            &mut self.model,
            &mut self.run_out,
            &mut self.report_out,
        ]
    }

    pub fn from_args(args: &ExperimentArgs) -> Result<Self> {
        let mut c = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &args.$field { c.$field = Some(v.clone()); }
            )*};
        }
        take!(index, corpus, analyzer, stopwords, topics, qrels, thesaurus, model, run_out, report_out, tag, query_log);
        if let Some(v) = args.mode {
            c.mode = v;
        }
        if let Some(v) = &args.relations {
            c.relations = v.clone();
        }
        if let Some(v) = args.measure {
            c.measure = v;
        }
        if let Some(v) = args.k {
            c.k = v;
        }
        if let Some(v) = args.operator {
            c.operator = v;
        }
        if let Some(v) = args.k1 {
            c.bm25.k1 = v;
        }
        if let Some(v) = args.b {
            c.bm25.b = v;
        }
        if let Some(v) = &args.cutoffs {
            c.cutoffs = v.clone();
        }
        if let Some(v) = args.seed {
            c.seed = v;
        }
        if let Some(v) = &args.strata {
            c.strata = v.clone();
        }
        if let Some(v) = args.missing_qrels {
            c.missing_qrels = v.into();
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.bm25.validate()?;
        if self.cutoffs.is_empty() || self.cutoffs.contains(&0) {
            return Err(Error::validation(
                "cutoffs must be a non-empty list of positive integers",
            ));
        }
        if self.index.is_none() && self.corpus.is_none() {
            return Err(Error::validation("experiment needs `index` or `corpus`"));
        }
        if self.topics.is_none() && self.query_log.is_none() {
            return Err(Error::validation("experiment needs `topics` or `query_log`"));
        }
        match self.mode {
            ExpansionMode::None => {}
            ExpansionMode::Thesaurus => {
                if self.thesaurus.is_none() {
                    return Err(Error::validation("thesaurus mode needs `thesaurus`"));
                }
                self.relations.parse::<RelationFilter>()?;
            }
            ExpansionMode::Cooccurrence => {
                if self.model.is_none() {
                    return Err(Error::validation("cooccurrence mode needs `model`"));
                }
                if self.k == 0 {
                    return Err(Error::validation("k must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn run_tag(&self) -> String {
        if let Some(t) = &self.tag {
            return t.clone();
        }
        match self.mode {
            ExpansionMode::None => "baseline".into(),
            ExpansionMode::Thesaurus => format!("thesaurus-{}", self.relations.replace(',', "+")),
            ExpansionMode::Cooccurrence => format!("cooc-{}-k{}", self.measure, self.k),
        }
    }
}

/// Everything one experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub run: RankedRun,
    pub queries: Vec<(String, BooleanQuery)>,
    pub plans: Vec<ExpansionPlan>,
    pub skipped: Vec<String>,
    pub mean_expansion_count: Option<f64>,
    pub report: Option<MetricReport>,
}

fn load_or_build_index(config: &ExperimentConfig) -> Result<InvertedIndex> {
    match (&config.index, &config.corpus) {
        (Some(p), _) => InvertedIndex::load(p),
        (None, Some(corpus)) => {
            let analyzer = resolve_analyzer(config.analyzer.as_deref(), config.stopwords.as_deref(), None)?;
            build_index(read_corpus(corpus)?, analyzer)
        }
        (None, None) => Err(Error::validation("experiment needs `index` or `corpus`")),
    }
}

fn load_experiment_topics(config: &ExperimentConfig) -> Result<Vec<Topic>> {
    let mut topics = match (&config.topics, &config.query_log) {
        (Some(p), _) => read_topics(p)?,
        (None, Some(log)) => {
            let text = fs::read_to_string(log).map_err(|e| Error::io(log, e))?;
            sample_topics_from_log(&parse_log_tsv(&text)?, config.strata.parse()?, config.seed)?
        }
        (None, None) => return Err(Error::validation("experiment needs `topics` or `query_log`")),
    };
    topics.sort_by(|a, b| a.topic_id.cmp(&b.topic_id));
    Ok(topics)
}

fn check_same_analyzer(index: &InvertedIndex, other: &AnalyzerConfig, what: &str) -> Result<()> {
    if index.analyzer() != other {
        return Err(Error::validation(format!(
            "{what} was built with a different analyzer config than the index"
        )));
    }
    Ok(())
}

/// Runs one experiment in memory. Topics are processed in parallel and
/// collected in topic-id order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let index = load_or_build_index(config)?;
    let analyzer = index.analyzer().clone();
    let topics = load_experiment_topics(config)?;

    let thesaurus;
    let model;
    let expander: Box<dyn Expander + Sync> = match config.mode {
        ExpansionMode::None => Box::new(NoExpansion),
        ExpansionMode::Thesaurus => {
            let path = config.thesaurus.as_deref().expect("validated");
            thesaurus = Thesaurus::load(path, analyzer.clone())?;
            Box::new(ThesaurusExpander {
                thesaurus: &thesaurus,
                filter: config.relations.parse()?,
            })
        }
        ExpansionMode::Cooccurrence => {
            model = CooccurrenceModel::load(config.model.as_deref().expect("validated"))?;
            check_same_analyzer(&index, model.analyzer(), "co-occurrence model")?;
            Box::new(CooccurrenceExpander {
                model: &model,
                measure: config.measure,
                k: config.k,
            })
        }
    };

    let top_n = *config.cutoffs.iter().max().expect("validated");
    let per_topic: Vec<Result<Option<(ExpansionPlan, BooleanQuery, _)>>> = topics
        .par_iter()
        .map(|topic| {
            let plan = match ExpansionPlan::build(&topic.query, &analyzer, expander.as_ref()) {
                Ok(p) => p,
                Err(Error::EmptyQuery) => return Ok(None),
                Err(e) => return Err(e),
            };
            let query = build_expanded_query(&topic.query, &plan, config.operator, &analyzer)?;
            let result = search(&index, &query, &config.bm25, top_n)?;
            Ok(Some((plan, query, result)))
        })
        .collect();

    let mut run = RankedRun::new(config.run_tag());
    let mut plans = Vec::new();
    let mut queries = Vec::new();
    let mut skipped = Vec::new();
    for (topic, outcome) in topics.iter().zip(per_topic) {
        match outcome? {
            None => {
                log::warn!(
                    "topic {}: query {:?} is empty after analysis; skipped",
                    topic.topic_id,
                    topic.query
                );
                skipped.push(topic.topic_id.clone());
            }
            Some((plan, query, result)) => {
                run.insert_result(&topic.topic_id, &result)?;
                queries.push((topic.topic_id.clone(), query));
                plans.push(plan);
            }
        }
    }

    let mean_expansion = match config.mode {
        ExpansionMode::None => None,
        _ if plans.is_empty() => None,
        _ => Some(mean_expansion_count(&plans)?),
    };
    let report = match &config.qrels {
        Some(p) => Some(evaluate_run(
            &run,
            &Qrels::load(p)?,
            &config.cutoffs,
            config.missing_qrels,
        )?),
        None => None,
    };
    Ok(ExperimentOutcome {
        run,
        queries,
        plans,
        skipped,
        mean_expansion_count: mean_expansion,
        report,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_index(args: &IndexArgs, out: &mut dyn Write) -> Result<()> {
    let analyzer = args.analyzer.resolve()?;
    let index = build_index(read_corpus(&args.corpus)?, analyzer)?;
    index.save(&args.out)?;
    emit(
        out,
        format!(
            "doc_count={} vocabulary={} avg_doc_len={:.6}\n",
            index.doc_count(),
            index.vocabulary_size(),
            index.avg_doc_len()
        ),
    )
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let analyzer = args.analyzer.resolve()?;
    let model = train_cooccurrence(&read_training_corpus(&args.corpus)?, analyzer)?;
    model.save(&args.out)?;
    emit(
        out,
        format!(
            "doc_count={} free_terms={} controlled_terms={}\n",
            model.doc_count(),
            model.free_terms().count(),
            model.controlled_terms().count()
        ),
    )
}

pub fn cmd_suggest(args: &SuggestArgs, out: &mut dyn Write) -> Result<()> {
    let model = CooccurrenceModel::load(&args.model)?;
    let terms = model.analyzer().terms(&args.query);
    if terms.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let mut text = String::new();
    for term in terms.iter().collect::<BTreeSet<_>>() {
        for s in model.suggest(term, args.measure, args.k)? {
            text.push_str(&format!("{term}\t{}\t{:.6}\n", s.term, s.score));
        }
    }
    emit(out, text)
}

pub fn cmd_expand(args: &ExpandArgs, out: &mut dyn Write) -> Result<()> {
    let (plan, analyzer) = match args.mode {
        ExpansionMode::Cooccurrence => {
            let path = args
                .model
                .as_deref()
                .ok_or_else(|| Error::validation("cooccurrence mode needs --model"))?;
            let model = CooccurrenceModel::load(path)?;
            let analyzer = model.analyzer().clone();
            let expander = CooccurrenceExpander {
                model: &model,
                measure: args.measure,
                k: args.k,
            };
            (ExpansionPlan::build(&args.query, &analyzer, &expander)?, analyzer)
        }
        mode => {
            let analyzer = match &args.index {
                Some(p) => InvertedIndex::load(p)?.analyzer().clone(),
                None => args.analyzer.resolve()?,
            };
            let plan = if mode == ExpansionMode::Thesaurus {
                let path = args
                    .thesaurus
                    .as_deref()
                    .ok_or_else(|| Error::validation("thesaurus mode needs --thesaurus"))?;
                let thesaurus = Thesaurus::load(path, analyzer.clone())?;
                let expander = ThesaurusExpander {
                    thesaurus: &thesaurus,
                    filter: args.relations.parse()?,
                };
                ExpansionPlan::build(&args.query, &analyzer, &expander)?
            } else {
                ExpansionPlan::build(&args.query, &analyzer, &NoExpansion)?
            };
            (plan, analyzer)
        }
    };
    let query = build_expanded_query(&args.query, &plan, args.operator, &analyzer)?;
    let mut text = format!("{query}\n");
    for e in plan.entries() {
        text.push_str(&format!("# {}: {} expansion terms\n", e.term, e.expansions.len()));
    }
    emit(out, text)
}

pub fn cmd_search(args: &SearchArgs, out: &mut dyn Write) -> Result<()> {
    let index = InvertedIndex::load(&args.index)?;
    let params = Bm25Params::new(args.k1, args.b)?;
    let query = if args.boolean {
        BooleanQuery::parse(&args.query, index.analyzer(), args.operator)?
    } else {
        crate::expansion::baseline_query(&args.query, args.operator, index.analyzer())?
    };
    let result = search(&index, &query, &params, args.top_n)?;
    let mut text = format!("# query: {}\n", result.query);
    for (rank, hit) in result.hits.iter().enumerate() {
        text.push_str(&format!("{}\t{}\t{:.6}\n", rank + 1, hit.doc_id, hit.score));
    }
    emit(out, text)
}

pub fn cmd_run_experiment(args: &ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let config = ExperimentConfig::from_args(args)?;
    let outcome = run_experiment(&config)?;
    let mut text = format!(
        "system={} topics={} skipped={}\n",
        outcome.run.tag(),
        outcome.run.topic_ids().count(),
        outcome.skipped.len()
    );
    if let Some(mean) = outcome.mean_expansion_count {
        text.push_str(&format!("mean_expansion_count={mean:.4}\n"));
    }
    match &config.run_out {
        Some(p) => write_file(p, &outcome.run.to_trec())?,
        None if outcome.report.is_none() => text.push_str(&outcome.run.to_trec()),
        None => {}
    }
    if let Some(report) = &outcome.report {
        if let Some(prefix) = &config.report_out {
            write_file(&with_extension(prefix, "tsv"), &report.to_tsv())?;
            write_file(&with_extension(prefix, "json"), &report.to_json())?;
        }
        for (m, v) in report.metrics.iter().zip(&report.mean) {
            text.push_str(&format!("{m}={v:.4}\n"));
        }
    }
    emit(out, text)
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let mut a = RankedRun::load(&args.run_a)?;
    let mut b = RankedRun::load(&args.run_b)?;
    let qrels = Qrels::load(&args.qrels)?;
    let ta: BTreeSet<String> = a.topic_ids().map(str::to_string).collect();
    let tb: BTreeSet<String> = b.topic_ids().map(str::to_string).collect();
    if ta != tb {
        let diff: Vec<&str> = ta.symmetric_difference(&tb).map(String::as_str).collect();
        return Err(Error::validation(format!(
            "runs cover different topics; symmetric difference: {}",
            diff.join(" ")
        )));
    }
    for topic in &ta {
        if !qrels.contains_topic(topic) {
            log::warn!("topic {topic} has no relevance judgments; excluded from both systems");
            a.remove_topic(topic);
            b.remove_topic(topic);
        }
    }
    if a.tag() == b.tag() {
        // keep the table readable when a run is compared with itself
        a = retag(a, "A");
        b = retag(b, "B");
    }
    let ra = evaluate_run(&a, &qrels, &args.cutoffs, MissingQrels::Error)?;
    let rb = evaluate_run(&b, &qrels, &args.cutoffs, MissingQrels::Error)?;
    let cmp = compare_reports(&ra, &rb)?;
    if let Some(p) = &args.json_out {
        let json = serde_json::to_string_pretty(&cmp).expect("comparison serialization cannot fail");
        write_file(p, &(json + "\n"))?;
    }
    emit(out, cmp.to_table())
}

fn retag(run: RankedRun, suffix: &str) -> RankedRun {
    let mut out = RankedRun::new(format!("{}:{suffix}", run.tag()));
    for (topic, hits) in run.topics() {
        out.insert_topic(topic, hits.to_vec()).expect("already validated");
    }
    out
}

pub fn cmd_sample_topics(args: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&args.log).map_err(|e| Error::io(&args.log, e))?;
    let entries = if args.raw {
        aggregate_log(text.lines())
    } else {
        parse_log_tsv(&text)?
    };
    let topics = sample_topics_from_log(&entries, args.strata, args.seed)?;
    let jsonl = topics_to_jsonl(&topics);
    match &args.out {
        Some(p) => {
            write_file(p, &jsonl)?;
            emit(out, format!("wrote {} topics to {}\n", topics.len(), p.display()))
        }
        None => emit(out, jsonl),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Index(a) => cmd_index(a, out),
        Command::TrainCooc(a) => cmd_train(a, out),
        Command::Suggest(a) => cmd_suggest(a, out),
        Command::Expand(a) => cmd_expand(a, out),
        Command::Search(a) => cmd_search(a, out),
        Command::RunExperiment(a) => cmd_run_experiment(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::SampleTopics(a) => cmd_sample_topics(a, out),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_io() {
        2
    } else {
        1
    }
}
