use std::collections::BTreeSet;
use std::path::PathBuf;

use proptest::prelude::*;
use serde::Deserialize;
use surveyqe::analysis::{light_stem, load_stopwords};
use surveyqe::{analyze, AnalyzerConfig, Stemmer};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/analysis")
        .join(name)
}

#[derive(Deserialize)]
struct Expected {
    stopwords: Vec<String>,
    terms: Vec<String>,
    positions: Vec<u32>,
}

// expected output was produced by a separate scripting-language tokenizer
#[test]
fn reference_text_matches_independent_tokenizer() {
    let text = std::fs::read_to_string(fixture("reference.txt")).unwrap();
    let expected: Expected =
        serde_json::from_str(&std::fs::read_to_string(fixture("reference.expected.json")).unwrap()).unwrap();
    let config = AnalyzerConfig::default().with_stopwords(expected.stopwords.iter().cloned());
    let seq = analyze(&text, &config);
    assert_eq!(seq.terms, expected.terms);
    assert_eq!(seq.positions, expected.positions);
}

#[test]
fn labor_market_example() {
    let config = AnalyzerConfig::default().with_stopwords(["the"]);
    let seq = analyze("The Labor Market", &config);
    assert_eq!(seq.terms, ["labor", "market"]);
    assert_eq!(seq.positions, [1, 2]);
    assert!(analyze("", &config).is_empty());
    assert!(analyze("the THE The", &config).is_empty());
}

// 46 = grep -v '^#' | tr -d ' ' | grep -v '^$' | tr A-Z a-z | sort -u | wc -l
#[test]
fn hundred_line_stopword_fixture() {
    let words = load_stopwords(&fixture("stopwords_100.txt")).unwrap();
    assert_eq!(words.len(), 46);
    assert!(words
        .iter()
        .all(|w| w == &w.to_lowercase() && w.trim() == w && !w.is_empty()));
}

#[test]
fn light_stemmer_is_opt_in() {
    let text = "elections parties working";
    assert_eq!(
        analyze(text, &AnalyzerConfig::default()).terms,
        ["elections", "parties", "working"]
    );
    let stemmed = AnalyzerConfig::default().with_stemmer(Stemmer::LightSuffix);
    assert_eq!(analyze(text, &stemmed).terms, ["election", "party", "work"]);
    assert_eq!(light_stem("analysis"), "analysis");
}

fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            "[a-zA-Z]{1,8}",
            "[0-9]{1,3}",
            "(Über|ÄRGER|élève|Straße|naïve)",
            "[ ,.;:!?()'\"/-]{1,3}",
        ],
        0..30,
    )
    .prop_map(|parts| parts.join(" "))
}

fn stopword_strategy() -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::btree_set("[a-z]{1,3}", 0..15)
}

proptest! {
    #[test]
    fn positions_strictly_increase(text in text_strategy(), stops in stopword_strategy(), stem in any::<bool>()) {
        let mut config = AnalyzerConfig::default().with_stopwords(stops);
        if stem {
            config = config.with_stemmer(Stemmer::LightSuffix);
        }
        let seq = analyze(&text, &config);
        prop_assert_eq!(seq.terms.len(), seq.positions.len());
        prop_assert!(seq.positions.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(seq.terms.iter().all(|t| !config.stopwords.contains(t)));
    }

    #[test]
    fn analysis_is_idempotent(text in text_strategy(), stops in stopword_strategy()) {
        let config = AnalyzerConfig::default().with_stopwords(stops);
        let once = analyze(&text, &config);
        let twice = analyze(&once.terms.join(" "), &config);
        prop_assert_eq!(once.terms, twice.terms);
    }

    #[test]
    fn stopwords_never_reorder_survivors(text in text_strategy(), stops in stopword_strategy()) {
        let plain = analyze(&text, &AnalyzerConfig::default());
        let filtered = analyze(&text, &AnalyzerConfig::default().with_stopwords(stops));
        // filtered must be a subsequence of plain at the same positions
        let mut it = plain.iter();
        for (term, pos) in filtered.iter() {
            prop_assert!(it.any(|(t, p)| t == term && p == pos));
        }
    }

    #[test]
    fn analysis_is_pure(text in text_strategy()) {
        let config = AnalyzerConfig::default().with_stemmer(Stemmer::LightSuffix);
        prop_assert_eq!(analyze(&text, &config), analyze(&text, &config));
    }
}
