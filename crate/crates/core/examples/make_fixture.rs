//! Writes the synthetic retrieval fixture used by the acceptance tests.
//!
//! ```text
//! cargo run --example make_fixture -- crates/core/fixtures/synthetic
//! ```
//!
//! Every topic has two documents that use the topic word literally and four
//! that express the same need through a synonym, an association or a related
//! term only. Keyword search finds the literal pair; expansion can find the
//! rest. The output is a pure function of the tables below.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use surveyqe::expansion::{train_cooccurrence, TrainingRecord};
use surveyqe::AnalyzerConfig;

struct TopicSpec {
    word: &'static str,
    synonym: &'static str,
    association: &'static str,
    related: &'static str,
    broader: &'static str,
}

const TOPICS: [TopicSpec; 10] = [
    TopicSpec {
        word: "democracy",
        synonym: "republic",
        association: "elections",
        related: "parliament",
        broader: "political system",
    },
    TopicSpec {
        word: "unemployment",
        synonym: "joblessness",
        association: "layoffs",
        related: "welfare",
        broader: "labour market",
    },
    TopicSpec {
        word: "religion",
        synonym: "faith",
        association: "church",
        related: "spirituality",
        broader: "culture",
    },
    TopicSpec {
        word: "immigration",
        synonym: "migration",
        association: "refugees",
        related: "integration",
        broader: "population",
    },
    TopicSpec {
        word: "health",
        synonym: "wellbeing",
        association: "hospital",
        related: "illness",
        broader: "quality of life",
    },
    TopicSpec {
        word: "education",
        synonym: "schooling",
        association: "teachers",
        related: "university",
        broader: "human capital",
    },
    TopicSpec {
        word: "family",
        synonym: "household",
        association: "children",
        related: "marriage",
        broader: "social structure",
    },
    TopicSpec {
        word: "income",
        synonym: "earnings",
        association: "wages",
        related: "poverty",
        broader: "living conditions",
    },
    TopicSpec {
        word: "environment",
        synonym: "ecology",
        association: "pollution",
        related: "climate",
        broader: "nature",
    },
    TopicSpec {
        word: "trust",
        synonym: "confidence",
        association: "institutions",
        related: "corruption",
        broader: "social capital",
    },
];

const STOPWORDS: [&str; 24] = [
    "a", "about", "and", "are", "at", "do", "for", "has", "how", "in", "is", "of", "on", "or", "over", "that", "the",
    "to", "with", "would", "you", "your", "it", "by",
];

const DISTRACTORS: [&str; 40] = [
    "How many hours per week do you usually spend commuting?",
    "Which newspaper do you read most often?",
    "How often do you use public transport?",
    "Do you own or rent the dwelling you live in?",
    "How many rooms does your dwelling have?",
    "How often do you go to the cinema?",
    "Do you have access to a garden?",
    "How many cars are available to the people you live with?",
    "Did you travel abroad during the last twelve months?",
    "How often do you practise sports?",
    "What is your year of birth?",
    "In which federal state do you live?",
    "How large is the town you live in?",
    "Do you use a computer at home?",
    "How often do you cook meals yourself?",
    "Which television channel do you watch most often?",
    "How many books did you read last year?",
    "Do you keep pets at home?",
    "How often do you meet neighbours?",
    "Do you volunteer for a club or association?",
    "How satisfied are you with your leisure time?",
    "How often do you listen to the radio?",
    "Do you have a driving licence?",
    "How many mobile phones are used by you?",
    "How often do you eat out in restaurants?",
    "Which language do you mainly speak at home?",
    "How long have you lived at your current address?",
    "Do you play a musical instrument?",
    "How often do you visit museums?",
    "How many holidays did you take last summer?",
    "Do you smoke cigarettes?",
    "How often do you shop online?",
    "How many hours do you sleep per night?",
    "Do you garden as a hobby?",
    "How often do you ride a bicycle?",
    "Which season of the year do you like best?",
    "How much time do you spend on social media?",
    "Do you collect stamps or coins?",
    "How often do you attend concerts?",
    "How many friends do you meet regularly?",
];

const TRAINING_FRAMES: [&str; 5] = [
    "Attitudes towards {} among adults",
    "Panel study of {} and social change",
    "Regional differences in {} between cohorts",
    "Measuring {} in cross-national surveys",
    "Longitudinal analysis of {} and life course",
];

fn topic_documents(t: &TopicSpec) -> [(&'static str, String, u8); 6] {
    [
        (
            "lit1",
            format!("How satisfied are you with {} in your country?", t.word),
            2,
        ),
        (
            "lit2",
            format!("Do you think {} has improved over the last ten years?", t.word),
            2,
        ),
        ("syn1", format!("How important is {} for you personally?", t.synonym), 2),
        (
            "syn2",
            format!("Please rate the state of {} in your region.", t.synonym),
            1,
        ),
        (
            "assoc",
            format!("Would you say that {} matter in daily life?", t.association),
            1,
        ),
        (
            "rel",
            format!("How often do you discuss {} with friends?", t.related),
            1,
        ),
    ]
}

fn analyzer() -> AnalyzerConfig {
    AnalyzerConfig::default().with_stopwords(STOPWORDS)
}

fn jsonl(rows: impl IntoIterator<Item = serde_json::Value>) -> String {
    rows.into_iter().map(|r| format!("{r}\n")).collect()
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap_or_else(|e| panic!("writing {}: {e}", path.display()));
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/fixtures/synthetic".into()),
    );
    fs::create_dir_all(&dir).expect("creating fixture directory");

    let mut corpus = Vec::new();
    let mut qrels = String::new();
    let mut topics = Vec::new();
    for (i, t) in TOPICS.iter().enumerate() {
        let topic_id = format!("T{:03}", i + 1);
        for (suffix, text, grade) in topic_documents(t) {
            let doc_id = format!("Q{:02}-{suffix}", i + 1);
            qrels.push_str(&format!("{topic_id} 0 {doc_id} {grade}\n"));
            corpus.push(json!({"doc_id": doc_id, "text": text, "metadata": {"source": "synthetic"}}));
        }
        // one judged non-relevant distractor per topic
        qrels.push_str(&format!("{topic_id} 0 D{:02} 0\n", i * 4 + 1));
        let (stratum, frequency) = match i {
            0..=3 => ("high", 40 - i as u64),
            4..=6 => ("medium", 9 - i as u64),
            _ => ("low", 1),
        };
        topics.push(json!({"topic_id": topic_id, "query": t.word, "stratum": stratum, "frequency": frequency}));
    }
    for (i, text) in DISTRACTORS.iter().enumerate() {
        corpus.push(json!({"doc_id": format!("D{:02}", i + 1), "text": text}));
    }
    assert_eq!(corpus.len(), 100);

    let concepts: Vec<_> = TOPICS
        .iter()
        .map(|t| {
            json!({
                "preferred": t.word,
                "alternatives": [],
                "relations": [
                    {"type": "synonym", "target": t.synonym},
                    {"type": "association", "target": t.association},
                    {"type": "related", "target": t.related},
                    {"type": "broader", "target": t.broader},
                ],
            })
        })
        .chain([
            json!({"preferred": "survey", "alternatives": ["questionnaire"],
                   "relations": [{"type": "narrower", "target": "panel study"}]}),
            json!({"preferred": "age group", "alternatives": [],
                   "relations": [{"type": "narrower", "target": "youth"}]}),
        ])
        .collect();

    let mut training = Vec::new();
    for (i, t) in TOPICS.iter().enumerate() {
        let next = &TOPICS[(i + 1) % TOPICS.len()];
        for j in 0..20 {
            let mut keywords = Vec::new();
            if j % 4 != 3 {
                keywords.push(t.synonym.to_string());
            }
            if j % 2 == 0 {
                keywords.push(t.association.to_string());
            }
            if j % 3 == 0 || j % 4 == 3 {
                keywords.push(t.related.to_string());
            }
            if j % 5 == 0 {
                keywords.push(t.word.to_string());
            }
            if j % 4 == 1 {
                keywords.push("survey research".to_string());
            }
            if j == 19 {
                keywords.push(next.synonym.to_string());
            }
            let text = TRAINING_FRAMES[j % TRAINING_FRAMES.len()].replace("{}", t.word);
            training.push(TrainingRecord::new(format!("S{:03}", i * 20 + j + 1), text, keywords));
        }
    }
    assert_eq!(training.len(), 200);

    let mut log = String::new();
    for i in 0..40 {
        log.push_str(&format!("frequent query {i}\t{}\n", 11 + (i * 7) % 50));
    }
    for i in 0..30 {
        log.push_str(&format!("occasional query {i}\t{}\n", 2 + i % 9));
    }
    for i in 0..25 {
        log.push_str(&format!("rare query {i}\t1\n"));
    }

    let analyzer = analyzer();
    let model = train_cooccurrence(&training, analyzer.clone()).expect("training fixture model");

    write(
        &dir,
        "analyzer.json",
        serde_json::to_string_pretty(&analyzer).unwrap() + "\n",
    );
    write(&dir, "corpus.jsonl", jsonl(corpus));
    write(&dir, "topics.jsonl", jsonl(topics));
    write(&dir, "qrels.txt", qrels);
    write(
        &dir,
        "thesaurus.json",
        serde_json::to_string_pretty(&concepts).unwrap() + "\n",
    );
    write(
        &dir,
        "training.jsonl",
        jsonl(training.iter().map(|r| serde_json::to_value(r).unwrap())),
    );
    write(&dir, "model.json", model.to_json());
    write(&dir, "query_log.tsv", log);

    let base = json!({
        "corpus": "corpus.jsonl",
        "analyzer": "analyzer.json",
        "topics": "topics.jsonl",
        "qrels": "qrels.txt",
        "cutoffs": [5, 10],
        "seed": 0,
    });
    let configs = [
        ("baseline", json!({"mode": "none"})),
        (
            "thesaurus_general",
            json!({"mode": "thesaurus", "thesaurus": "thesaurus.json", "relations": "general"}),
        ),
        (
            "thesaurus_domain",
            json!({"mode": "thesaurus", "thesaurus": "thesaurus.json", "relations": "domain"}),
        ),
        (
            "cooc_jaccard",
            json!({"mode": "cooccurrence", "model": "model.json", "measure": "log_jaccard", "k": 20}),
        ),
        (
            "cooc_cosine",
            json!({"mode": "cooccurrence", "model": "model.json", "measure": "cosine", "k": 20}),
        ),
    ];
    for (name, extra) in configs {
        let mut config = base.clone();
        config
            .as_object_mut()
            .unwrap()
            .extend(extra.as_object().unwrap().clone());
        let obj = config.as_object_mut().unwrap();
        obj.insert("run_out".into(), json!(format!("out/{name}.run")));
        obj.insert("report_out".into(), json!(format!("out/{name}")));
        write(
            &dir,
            &format!("{name}.json"),
            serde_json::to_string_pretty(&config).unwrap() + "\n",
        );
    }
    println!("wrote fixture to {}", dir.display());
}
