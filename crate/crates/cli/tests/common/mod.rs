#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_headline-scorer");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

const CLICKBAIT: &[&str] = &[
    "21 Completely Engrossing Fan Fictions You Won't Be Able To Stop Reading",
    "These White Tiger Cubs Are The Most Beautiful Creatures You'll See Today",
    "Here's What Real Vegans Actually Eat",
    "You Won't Believe What Happened Next",
    "The Cutest Puppies You Will Ever See",
    "Which Celebrity Are You Based On Your Favorite Pizza?",
    "10 Reasons Why Cats Are Better Than Dogs",
    "This Is The Best Thing You Will Read Today",
];

const NEWS: &[&str] = &[
    "Senate passes budget bill after long debate",
    "Central bank holds interest rates steady",
    "Storm causes flooding in coastal towns",
    "Court rules on election dispute",
    "Prime minister meets trade delegation",
    "Company reports quarterly earnings growth",
    "Police arrest suspect in downtown robbery",
    "Researchers publish climate study results",
    "City council approves new transit plan",
    "Oil prices fall amid supply concerns",
    "Government announces vaccine rollout schedule",
    "Parliament debates immigration reform",
];

/// Writes an instances/truth pair with `clickbait` clickbait posts and
/// `news` ordinary posts; ids are prefixed with `prefix`.
pub fn write_corpus(dir: &Path, prefix: &str, clickbait: usize, news: usize) -> (PathBuf, PathBuf) {
    let mut instances = String::new();
    let mut truth = String::new();
    let mut k = 0;
    let mut push = |text: &str, judgments: [f64; 5], class: &str| {
        let id = format!("{prefix}{k}");
        k += 1;
        let mean = judgments.iter().sum::<f64>() / 5.0;
        writeln!(
            instances,
            "{}",
            serde_json::json!({"id": id, "postText": [text], "targetTitle": "ignored"})
        )
        .unwrap();
        writeln!(
            truth,
            "{}",
            serde_json::json!({"id": id, "truthJudgments": judgments, "truthMean": mean, "truthClass": class})
        )
        .unwrap();
    };
    for i in 0..clickbait {
        let third = 1.0 / 3.0;
        let j = [1.0, 1.0, 2.0 * third, if i % 2 == 0 { 1.0 } else { third }, 2.0 * third];
        push(CLICKBAIT[i % CLICKBAIT.len()], j, "clickbait");
    }
    for i in 0..news {
        let third = 1.0 / 3.0;
        let j = [0.0, third, 0.0, if i % 3 == 0 { 2.0 * third } else { 0.0 }, 0.0];
        push(NEWS[i % NEWS.len()], j, "no-clickbait");
    }
    let ip = dir.join(format!("{prefix}instances.jsonl"));
    let tp = dir.join(format!("{prefix}truth.jsonl"));
    fs::write(&ip, instances).unwrap();
    fs::write(&tp, truth).unwrap();
    (ip, tp)
}

/// A small GloVe-format file of dimension `dims` covering part of the
/// toy vocabulary.
pub fn write_embeddings(dir: &Path, dims: usize) -> PathBuf {
    let words = [
        "you", "won't", "believe", "what", "the", "cutest", "best", "cats", "dogs", "senate",
        "bill", "bank", "rates", "storm", "court", "police", "city", "oil", "prices", "government",
    ];
    let mut text = String::new();
    for (i, w) in words.iter().enumerate() {
        text.push_str(w);
        for d in 0..dims {
            let v = ((i * 7 + d * 3) % 11) as f64 / 10.0 - 0.5;
            write!(text, " {v:.4}").unwrap();
        }
        text.push('\n');
    }
    let path = dir.join(format!("toy_{dims}d.txt"));
    fs::write(&path, text).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Fixtures shared with the core crate's tests.
pub fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}
