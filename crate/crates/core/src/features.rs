//! Hand-crafted headline features and the assembled feature rows.
//!
//! A feature row is the seven hand-crafted values, in the order of
//! [`HANDCRAFTED_NAMES`], followed by the mean word vector of the headline.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::LabeledDataset;
use crate::embeddings::{average_embedding, EmbeddingTable};
use crate::error::{Error, Result};
use crate::text::{count_stopwords, parse_word_list, tokenize, StopwordList};

pub const HANDCRAFTED_LEN: usize = 7;

pub const HANDCRAFTED_NAMES: [&str; HANDCRAFTED_LEN] = [
    "n_words",
    "n_stopwords",
    "avg_word_len",
    "has_question_form",
    "starts_with_digit",
    "has_gerund",
    "has_superlative",
];

const QUESTION_WORDS: &str = include_str!("../data/question_words.txt");
const GERUND_EXCEPTIONS: &str = include_str!("../data/gerund_exceptions.txt");
const SUPERLATIVE_IRREGULARS: &str = include_str!("../data/superlative_irregulars.txt");
const SUPERLATIVE_EXCLUSIONS: &str = include_str!("../data/superlative_exclusions.txt");

const GERUND_MIN_LEN: usize = 5;
const SUPERLATIVE_MIN_LEN: usize = 4;

/// Word lists behind the presence flags.
#[derive(Debug, Clone)]
pub struct FeatureLexicons {
    pub question_words: HashSet<String>,
    pub gerund_exceptions: HashSet<String>,
    pub superlative_irregulars: HashSet<String>,
    pub superlative_exclusions: HashSet<String>,
}

impl FeatureLexicons {
    /// The lists shipped in the crate's `data/` directory.
    pub fn bundled() -> Self {
        Self::parse(
            QUESTION_WORDS,
            GERUND_EXCEPTIONS,
            SUPERLATIVE_IRREGULARS,
            SUPERLATIVE_EXCLUSIONS,
        )
        .expect("bundled lexicons are well-formed")
    }

    /// Reads `question_words.txt`, `gerund_exceptions.txt`,
    /// `superlative_irregulars.txt` and `superlative_exclusions.txt` from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        Self::parse(
            &read("question_words.txt")?,
            &read("gerund_exceptions.txt")?,
            &read("superlative_irregulars.txt")?,
            &read("superlative_exclusions.txt")?,
        )
    }

    pub fn parse(
        question_words: &str,
        gerund_exceptions: &str,
        superlative_irregulars: &str,
        superlative_exclusions: &str,
    ) -> Result<Self> {
        Ok(FeatureLexicons {
            question_words: parse_word_list(question_words)?,
            gerund_exceptions: parse_word_list(gerund_exceptions)?,
            superlative_irregulars: parse_word_list(superlative_irregulars)?,
            superlative_exclusions: parse_word_list(superlative_exclusions)?,
        })
    }

    fn is_gerund(&self, lower: &str) -> bool {
        lower.ends_with("ing")
            && lower.chars().count() >= GERUND_MIN_LEN
            && !self.gerund_exceptions.contains(lower)
    }

    fn is_superlative(&self, lower: &str) -> bool {
        self.superlative_irregulars.contains(lower)
            || (lower.ends_with("est")
                && lower.chars().count() >= SUPERLATIVE_MIN_LEN
                && !self.superlative_exclusions.contains(lower))
    }
}

/// SHA-256 of each bundled word list, keyed by file name.
pub fn bundled_lexicon_checksums() -> BTreeMap<String, String> {
    [
        ("stopwords_en.txt", StopwordList::source_text()),
        ("question_words.txt", QUESTION_WORDS),
        ("gerund_exceptions.txt", GERUND_EXCEPTIONS),
        ("superlative_irregulars.txt", SUPERLATIVE_IRREGULARS),
        ("superlative_exclusions.txt", SUPERLATIVE_EXCLUSIONS),
    ]
    .into_iter()
    .map(|(name, text)| (name.to_string(), hex::encode(Sha256::digest(text.as_bytes()))))
    .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct HandcraftedFeatures {
    pub n_words: usize,
    pub n_stopwords: usize,
    pub avg_word_len: f64,
    pub has_question_form: bool,
    pub starts_with_digit: bool,
    pub has_gerund: bool,
    pub has_superlative: bool,
}

impl HandcraftedFeatures {
    pub fn to_array(&self) -> [f64; HANDCRAFTED_LEN] {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        [
            self.n_words as f64,
            self.n_stopwords as f64,
            self.avg_word_len,
            flag(self.has_question_form),
            flag(self.starts_with_digit),
            flag(self.has_gerund),
            flag(self.has_superlative),
        ]
    }
}

pub fn extract_handcrafted(
    text: &str,
    stops: &StopwordList,
    lex: &FeatureLexicons,
) -> HandcraftedFeatures {
    let tokens = tokenize(text);
    let n_words = tokens.len();
    let avg_word_len = if n_words == 0 {
        0.0
    } else {
        tokens.iter().map(|t| t.char_len()).sum::<usize>() as f64 / n_words as f64
    };
    HandcraftedFeatures {
        n_words,
        n_stopwords: count_stopwords(&tokens, stops),
        avg_word_len,
        has_question_form: tokens.iter().any(|t| lex.question_words.contains(&t.lower)),
        starts_with_digit: tokens
            .first()
            .and_then(|t| t.surface.chars().next())
            .is_some_and(|c| c.is_ascii_digit()),
        has_gerund: tokens.iter().any(|t| lex.is_gerund(&t.lower)),
        has_superlative: tokens.iter().any(|t| lex.is_superlative(&t.lower)),
    }
}

/// One feature row: hand-crafted values then the mean embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn assemble(
    hc: &HandcraftedFeatures,
    embedding: &[f64],
    embedding_dim: usize,
) -> Result<FeatureVector> {
    if embedding.len() != embedding_dim {
        return Err(Error::Dimension {
            expected: embedding_dim,
            found: embedding.len(),
        });
    }
    if embedding.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("embedding component".into()));
    }
    let mut values = Vec::with_capacity(HANDCRAFTED_LEN + embedding_dim);
    values.extend_from_slice(&hc.to_array());
    values.extend_from_slice(embedding);
    Ok(FeatureVector(values))
}

/// Everything needed to turn a headline into a feature row.
#[derive(Debug, Clone, Copy)]
pub struct Featurizer<'a> {
    pub table: &'a EmbeddingTable,
    pub stops: &'a StopwordList,
    pub lexicons: &'a FeatureLexicons,
}

impl Featurizer<'_> {
    pub fn dimension(&self) -> usize {
        HANDCRAFTED_LEN + self.table.dimension()
    }

    pub fn featurize(&self, text: &str) -> FeatureVector {
        let hc = extract_handcrafted(text, self.stops, self.lexicons);
        let emb = average_embedding(&tokenize(text), self.table);
        assemble(&hc, &emb, self.table.dimension()).expect("pooled embedding matches table dimension")
    }

    /// Feature rows for `texts`, computed in parallel, in input order.
    pub fn featurize_all<S: AsRef<str> + Sync>(&self, texts: &[S]) -> FeatureMatrix {
        let cols = self.dimension();
        let rows: Vec<FeatureVector> = texts.par_iter().map(|t| self.featurize(t.as_ref())).collect();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            data.extend_from_slice(row.as_slice());
        }
        FeatureMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }
}

/// Dense row-major matrix of feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(cols: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }
}

/// Feature matrix and target scores (truth means) for a labeled dataset.
pub fn featurize_dataset(ds: &LabeledDataset, featurizer: &Featurizer<'_>) -> (FeatureMatrix, Vec<f64>) {
    let texts: Vec<&str> = ds.instances().map(|i| i.post_text.as_str()).collect();
    let matrix = featurizer.featurize_all(&texts);
    let targets = ds.labels().map(|l| l.mean).collect();
    (matrix, targets)
}

/// CSV column names: the hand-crafted names then `emb_000`, `emb_001`, ...
pub fn column_names(embedding_dim: usize) -> Vec<String> {
    HANDCRAFTED_NAMES
        .iter()
        .map(|s| s.to_string())
        .chain((0..embedding_dim).map(|i| format!("emb_{i:03}")))
        .collect()
}
