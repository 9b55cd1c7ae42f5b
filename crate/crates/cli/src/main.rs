//! `headline-scorer`: split, train, predict, evaluate and dump features.
//!
//! Exit codes: 0 on success, 2 for input or usage errors, 3 for numeric or
//! model errors. Logs go to standard error; JSON results go to standard
//! output or the `--out` path.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "headline-scorer", version, about = "Clickbait scoring for tweet headlines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge two labeled corpora, balance the classes and split train/validation.
    Split(SplitArgs),
    /// Fit the linear model on one or more labeled corpora.
    Train(TrainArgs),
    /// Score every instance of a corpus with a trained model.
    Predict(PredictArgs),
    /// Compare a predictions file against a truth file.
    Evaluate(EvaluateArgs),
    /// Write the feature matrix of a corpus as CSV.
    Features(FeaturesArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Instances files of the two corpora, in merge order.
    #[arg(long, num_args = 1, required = true)]
    pub instances: Vec<PathBuf>,
    /// Truth files, paired with `--instances` by position.
    #[arg(long, num_args = 1, required = true)]
    pub truth: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, num_args = 1, required = true)]
    pub instances: Vec<PathBuf>,
    #[arg(long, num_args = 1, required = true)]
    pub truth: Vec<PathBuf>,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Where to write the model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Expected embedding dimension.
    #[arg(long, default_value_t = headline_scorer_core::DEFAULT_EMBEDDING_DIM)]
    pub dims: usize,
    /// Recorded in the model metadata.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Predictions JSONL; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Expected embedding dimension; defaults to the model's.
    #[arg(long)]
    pub dims: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = headline_scorer_core::DEFAULT_EMBEDDING_DIM)]
    pub dims: usize,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Split(args) => commands::split(args),
        Command::Train(args) => commands::train(args),
        Command::Predict(args) => commands::predict(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Features(args) => commands::features(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
