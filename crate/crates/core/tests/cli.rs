mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use surveyqe::cli::{run_experiment, ExpansionMode, ExperimentConfig};
use surveyqe::evaluation::{
    compare_reports, evaluate_run, paired_t_test, read_topics, Metric, MissingQrels, Qrels, RankedRun,
};
use surveyqe::expansion::baseline_query;
use surveyqe::index::read_corpus;
use surveyqe::{build_index, search, AnalyzerConfig, Bm25Params, Operator};

fn surveyqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surveyqe"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawning the binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

/// Fixture config with outputs redirected into `out`.
fn config(name: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::load(&fixture(&format!("{name}.json"))).unwrap();
    c.run_out = Some(out.join(format!("{name}.run")));
    c.report_out = Some(out.join(name));
    c
}

#[test]
fn index_of_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty.jsonl");
    fs::write(&corpus, "").unwrap();
    let out = surveyqe(&["index", "--corpus", p(&corpus), "--out", p(&dir.path().join("i.json"))]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("doc_count=0 vocabulary=0 "));
}

#[test]
fn index_stats_match_brute_force_on_16_docs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    let docs: Vec<String> = (0..16)
        .map(|i| {
            let text: Vec<&str> = (0..=(i % 5)).map(|j| VOCAB[(i * 3 + j) % VOCAB.len()]).collect();
            format!(r#"{{"doc_id": "q{i:02}", "text": "{}"}}"#, text.join(" "))
        })
        .collect();
    fs::write(&corpus, docs.join("\n")).unwrap();
    let out = surveyqe(&["index", "--corpus", p(&corpus), "--out", p(&dir.path().join("i.json"))]);
    assert!(out.status.success(), "{}", stderr(&out));

    let mut vocab = BTreeSet::new();
    let mut total = 0;
    for i in 0..16 {
        for j in 0..=(i % 5) {
            vocab.insert(VOCAB[(i * 3 + j) % VOCAB.len()]);
            total += 1;
        }
    }
    let expected = format!(
        "doc_count=16 vocabulary={} avg_doc_len={:.6}\n",
        vocab.len(),
        total as f64 / 16.0
    );
    assert_eq!(stdout(&out), expected);
}

#[test]
fn corrupt_line_is_named_and_exit_codes_split_io_from_validation() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.jsonl");
    fs::write(
        &corpus,
        "{\"doc_id\": \"a\", \"text\": \"x\"}\n\n{\"doc_id\": \"b\", \"text\": \n",
    )
    .unwrap();
    let out = surveyqe(&["index", "--corpus", p(&corpus), "--out", p(&dir.path().join("i.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = surveyqe(&[
        "index",
        "--corpus",
        p(&dir.path().join("missing.jsonl")),
        "--out",
        "x.json",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = surveyqe(&["index", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(surveyqe(&["--help"]).status.success());
}

#[test]
fn baseline_run_equals_direct_search() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("baseline", dir.path());
    let outcome = run_experiment(&cfg).unwrap();

    let analyzer = AnalyzerConfig::load(&fixture("analyzer.json")).unwrap();
    let index = build_index(read_corpus(&fixture("corpus.jsonl")).unwrap(), analyzer).unwrap();
    let mut direct = RankedRun::new(outcome.run.tag());
    for topic in read_topics(&fixture("topics.jsonl")).unwrap() {
        let q = baseline_query(&topic.query, Operator::Or, index.analyzer()).unwrap();
        let result = search(&index, &q, &Bm25Params::default(), 10).unwrap();
        direct.insert_result(&topic.topic_id, &result).unwrap();
    }
    assert_eq!(outcome.run.to_trec(), direct.to_trec());
    assert_eq!(outcome.mean_expansion_count, None);
}

#[test]
fn cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for round in ["a", "b"] {
        let out = surveyqe(&[
            "run-experiment",
            "--config",
            p(&fixture("cooc_jaccard.json")),
            "--run-out",
            p(&dir.path().join(format!("{round}.run"))),
            "--report-out",
            p(&dir.path().join(round)),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stdout(&out).contains("mean_expansion_count="));
    }
    for ext in ["run", "tsv", "json"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{ext}");
    }
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("r.run");
    let out = surveyqe(&[
        "run-experiment",
        "--config",
        p(&fixture("baseline.json")),
        "--cutoffs",
        "3",
        "--tag",
        "custom",
        "--run-out",
        p(&run),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&run).unwrap();
    assert!(text.lines().all(|l| l.ends_with(" custom")));
    let parsed = RankedRun::parse_trec(&text).unwrap();
    assert!(parsed.topics().all(|(_, hits)| hits.len() <= 3));
    assert!(stdout(&out).contains("R@3="));
}

#[test]
fn missing_mode_artifacts_fail() {
    let out = surveyqe(&[
        "run-experiment",
        "--config",
        p(&fixture("baseline.json")),
        "--mode",
        "thesaurus",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = surveyqe(&[
        "run-experiment",
        "--config",
        p(&fixture("baseline.json")),
        "--mode",
        "cooccurrence",
        "--model",
        "/nonexistent/model.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_with_foreign_analyzer_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let out = surveyqe(&[
        "train-cooc",
        "--corpus",
        p(&fixture("training.jsonl")),
        "--out",
        p(&model),
        "--stemmer",
        "light-suffix",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut cfg = config("cooc_jaccard", dir.path());
    cfg.model = Some(model);
    let err = run_experiment(&cfg).unwrap_err();
    assert!(err.to_string().contains("analyzer"), "{err}");
}

#[test]
fn empty_topic_is_skipped_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let topics = dir.path().join("t.jsonl");
    fs::write(
        &topics,
        "{\"topic_id\":\"T1\",\"query\":\"democracy\",\"stratum\":\"high\",\"frequency\":20}\n\
         {\"topic_id\":\"T2\",\"query\":\"how are you\",\"stratum\":\"low\",\"frequency\":1}\n",
    )
    .unwrap();
    let mut cfg = config("thesaurus_general", dir.path());
    cfg.topics = Some(topics);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.skipped, ["T2"]);
    assert_eq!(outcome.run.topic_ids().collect::<Vec<_>>(), ["T1"]);
}

#[test]
fn compare_self_gives_zero_t() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("thesaurus_domain", dir.path());
    let outcome = run_experiment(&cfg).unwrap();
    let run = dir.path().join("x.run");
    outcome.run.save(&run).unwrap();
    let json = dir.path().join("cmp.json");
    let out = surveyqe(&[
        "compare",
        "--run-a",
        p(&run),
        "--run-b",
        p(&run),
        "--qrels",
        p(&fixture("qrels.txt")),
        "--json-out",
        p(&json),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let cmp: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    for m in cmp["metrics"].as_array().unwrap() {
        assert_eq!(m["mean_a"], m["mean_b"]);
        assert_eq!(m["t"], 0.0);
        assert_eq!(m["p"], 1.0);
    }
}

#[test]
fn compare_topic_mismatch_lists_difference() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.run");
    let b = dir.path().join("b.run");
    fs::write(&a, "T1 Q0 d1 1 2 x\nT2 Q0 d1 1 2 x\n").unwrap();
    fs::write(&b, "T1 Q0 d1 1 2 y\nT3 Q0 d1 1 2 y\n").unwrap();
    let out = surveyqe(&[
        "compare",
        "--run-a",
        p(&a),
        "--run-b",
        p(&b),
        "--qrels",
        p(&fixture("qrels.txt")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("T2") && err.contains("T3") && !err.contains("T1"), "{err}");
}

#[test]
fn compare_excludes_unjudged_topics_from_both_systems() {
    let dir = tempfile::tempdir().unwrap();
    let base = run_experiment(&config("baseline", dir.path())).unwrap().run;
    let thes = run_experiment(&config("thesaurus_general", dir.path())).unwrap().run;
    let qrels_text = fs::read_to_string(fixture("qrels.txt")).unwrap();
    let partial: String = qrels_text
        .lines()
        .filter(|l| !l.starts_with("T010 "))
        .map(|l| format!("{l}\n"))
        .collect();
    let qrels = dir.path().join("partial.qrels");
    fs::write(&qrels, partial).unwrap();
    let (a, b) = (dir.path().join("a.run"), dir.path().join("b.run"));
    base.save(&a).unwrap();
    thes.save(&b).unwrap();
    let json = dir.path().join("cmp.json");
    let out = surveyqe(&[
        "compare",
        "--run-a",
        p(&a),
        "--run-b",
        p(&b),
        "--qrels",
        p(&qrels),
        "--json-out",
        p(&json),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("T010"), "warning expected: {}", stderr(&out));
    let cmp: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(cmp["topics"].as_u64(), Some(9));
}

#[test]
fn comparison_is_evaluation_composed_with_t_test() {
    let dir = tempfile::tempdir().unwrap();
    let qrels = Qrels::load(&fixture("qrels.txt")).unwrap();
    let a = run_experiment(&config("baseline", dir.path())).unwrap().run;
    let b = run_experiment(&config("cooc_cosine", dir.path())).unwrap().run;
    let ra = evaluate_run(&a, &qrels, &[5, 10], MissingQrels::Error).unwrap();
    let rb = evaluate_run(&b, &qrels, &[5, 10], MissingQrels::Error).unwrap();
    let cmp = compare_reports(&ra, &rb).unwrap();
    for (mc, metric) in cmp.metrics.iter().zip(Metric::columns(&[5, 10])) {
        let xa = ra.series(metric).unwrap();
        let xb = rb.series(metric).unwrap();
        let t = paired_t_test(&xb, &xa).unwrap();
        assert_eq!(mc.metric, metric.to_string());
        assert_eq!(mc.mean_a, ra.mean_of(metric).unwrap());
        assert_eq!(mc.mean_b, rb.mean_of(metric).unwrap());
        assert!(mc.t == t.t || (mc.t.is_nan() && t.t.is_nan()));
        assert_eq!(mc.p, t.p_two_sided);
        assert_eq!(mc.significant_at_0_1, t.p_two_sided < 0.1);
    }
    let table = cmp.to_table();
    assert!(table.contains("R@10") && table.contains("nDCG@10"));
}

#[test]
fn search_suggest_expand_and_sample_commands() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("index.json");
    let out = surveyqe(&[
        "index",
        "--corpus",
        p(&fixture("corpus.jsonl")),
        "--analyzer",
        p(&fixture("analyzer.json")),
        "--out",
        p(&index),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("doc_count=100 "));

    let out = surveyqe(&[
        "search",
        "--index",
        p(&index),
        "--query",
        "(democracy OR republic) AND NOT_A_WORD",
        "--boolean",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 1, "{}", stdout(&out));
    let out = surveyqe(&[
        "search",
        "--index",
        p(&index),
        "--query",
        "democracy republic",
        "--top-n",
        "3",
    ]);
    let lines: Vec<String> = stdout(&out).lines().skip(1).map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("1\tQ01-"));

    let out = surveyqe(&[
        "suggest",
        "--model",
        p(&fixture("model.json")),
        "--query",
        "democracy",
        "--k",
        "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 2);
    assert!(stdout(&out).starts_with("democracy\t"));

    let out = surveyqe(&[
        "expand",
        "--index",
        p(&index),
        "--thesaurus",
        p(&fixture("thesaurus.json")),
        "--relations",
        "general",
        "--query",
        "Democracy",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stdout(&out).starts_with("democracy OR republic OR elections\n"),
        "{}",
        stdout(&out)
    );

    let out = surveyqe(&["sample-topics", "--log", p(&fixture("query_log.tsv")), "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 60);
    let out = surveyqe(&[
        "sample-topics",
        "--log",
        p(&fixture("query_log.tsv")),
        "--strata",
        "41,0,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("high"));
}

#[test]
fn every_expansion_mode_has_a_tag_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut tags = BTreeSet::new();
    for name in [
        "baseline",
        "thesaurus_general",
        "thesaurus_domain",
        "cooc_jaccard",
        "cooc_cosine",
    ] {
        let cfg = config(name, dir.path());
        let outcome = run_experiment(&cfg).unwrap();
        assert_eq!(cfg.mode == ExpansionMode::None, outcome.mean_expansion_count.is_none());
        assert!(outcome.report.is_some());
        tags.insert(outcome.run.tag().to_string());
    }
    assert_eq!(tags.len(), 5);
}
