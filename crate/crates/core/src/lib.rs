//! Clickbait scoring for short news headlines.
//!
//! A headline is turned into a fixed-order feature vector made of seven
//! hand-crafted signals (word count, stopword count, average word length and
//! four presence flags) followed by the mean of its pre-trained word vectors.
//! An unregularized least-squares linear model maps that vector to a score in
//! `[0, 1]`.
//!
//! - [`corpus`] loads the challenge JSONL corpora, joins posts to their truth
//!   labels and produces the balanced train/validation split.
//! - [`text`] tokenizes headlines and holds the bundled stopword list.
//! - [`embeddings`] reads GloVe text files and mean-pools word vectors.
//! - [`features`] computes the hand-crafted signals and assembles feature rows.
//! - [`model`] fits, applies and serializes the linear model.
//! - [`metrics`] computes the regression and classification statistics.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod features;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod text;

pub use corpus::{ClassLabel, Instance, LabeledDataset, LabeledRecord, TruthLabel};
pub use embeddings::EmbeddingTable;
pub use error::{Error, Result};
pub use features::{FeatureLexicons, FeatureMatrix, FeatureVector, HandcraftedFeatures};
pub use metrics::MetricsReport;
pub use model::{LinearModel, Prediction};
pub use text::{StopwordList, Token};

/// Embedding width of the published GloVe 6B 300d vectors.
pub const DEFAULT_EMBEDDING_DIM: usize = 300;
