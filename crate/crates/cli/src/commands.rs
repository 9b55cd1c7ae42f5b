use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use headline_scorer_core::corpus::{self, JoinReport, LabeledDataset, SplitSummary};
use headline_scorer_core::embeddings::{load_embeddings, EmbeddingTable};
use headline_scorer_core::features::{
    bundled_lexicon_checksums, column_names, featurize_dataset, Featurizer, HANDCRAFTED_LEN,
};
use headline_scorer_core::metrics::{self, ScoreLine};
use headline_scorer_core::model::{self, load_model, save_model};
use headline_scorer_core::{Error, FeatureLexicons, StopwordList};
use log::{info, warn};
use serde::Serialize;

use crate::{EvaluateArgs, FeaturesArgs, PredictArgs, SplitArgs, TrainArgs};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_INPUT };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn require_files<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> CmdResult {
    for p in paths {
        if !p.is_file() {
            return Err(Failure::input(format!("input file not found: {}", p.display())));
        }
    }
    Ok(())
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::input(format!("cannot write {}: {e}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::numeric(format!("cannot serialize output: {e}")))?;
    println!("{text}");
    Ok(())
}

/// Output file, or standard output when `path` is `None`.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| io_failure(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn load_corpora(instances: &[PathBuf], truth: &[PathBuf]) -> Result<Vec<(LabeledDataset, JoinReport)>, Failure> {
    if instances.len() != truth.len() {
        return Err(Failure::input(format!(
            "got {} --instances but {} --truth files; they pair by position",
            instances.len(),
            truth.len()
        )));
    }
    require_files(instances.iter().chain(truth))?;
    instances
        .iter()
        .zip(truth)
        .map(|(i, t)| {
            let (ds, report) = corpus::load_labeled(i, t)?;
            info!("{}: {} labeled records", i.display(), ds.len());
            Ok((ds, report))
        })
        .collect()
}

#[derive(Serialize)]
struct SourceReport {
    instances: String,
    truth: String,
    #[serde(flatten)]
    join: JoinReport,
    clickbait: usize,
    no_clickbait: usize,
}

#[derive(Serialize)]
struct SplitOutput {
    sources: Vec<SourceReport>,
    #[serde(flatten)]
    summary: SplitSummary,
}

pub fn split(args: SplitArgs) -> CmdResult {
    if args.instances.len() != 2 {
        return Err(Failure::input("split takes exactly two corpora (two --instances and two --truth)"));
    }
    let corpora = load_corpora(&args.instances, &args.truth)?;
    let sources = corpora
        .iter()
        .zip(args.instances.iter().zip(&args.truth))
        .map(|((ds, report), (i, t))| {
            let counts = ds.class_counts();
            SourceReport {
                instances: i.display().to_string(),
                truth: t.display().to_string(),
                join: report.clone(),
                clickbait: counts.clickbait,
                no_clickbait: counts.no_clickbait,
            }
        })
        .collect();
    let mut datasets = corpora.into_iter().map(|(ds, _)| ds);
    let (a, b) = (datasets.next().unwrap(), datasets.next().unwrap());
    let split = corpus::merge_balance_split(a, b, args.train_fraction, args.seed)?;

    fs::create_dir_all(&args.out).map_err(|e| io_failure(&args.out, e))?;
    corpus::write_instances(&split.train, args.out.join("train_instances.jsonl"))?;
    corpus::write_truth(&split.train, args.out.join("train_truth.jsonl"))?;
    corpus::write_instances(&split.validation, args.out.join("validation_instances.jsonl"))?;
    corpus::write_truth(&split.validation, args.out.join("validation_truth.jsonl"))?;

    let output = SplitOutput {
        sources,
        summary: split.summary,
    };
    let summary_path = args.out.join("split_summary.json");
    let text = serde_json::to_string_pretty(&output)
        .map_err(|e| Failure::numeric(format!("cannot serialize summary: {e}")))?;
    fs::write(&summary_path, format!("{text}\n")).map_err(|e| io_failure(&summary_path, e))?;
    print_json(&output)
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Serialize)]
struct TrainOutput {
    n: usize,
    training_mse: f64,
    target_variance: f64,
    feature_dimension: usize,
    rank: Option<usize>,
    seed: u64,
    model: String,
}

pub fn train(args: TrainArgs) -> CmdResult {
    require_files([&args.embeddings])?;
    let corpora = load_corpora(&args.instances, &args.truth)?;
    let dataset = corpora
        .into_iter()
        .map(|(ds, _)| ds)
        .reduce(LabeledDataset::concat)
        .unwrap_or_default();
    if dataset.is_empty() {
        return Err(Failure::input("no labeled records after joining instances with truth"));
    }

    let table = load_embeddings(&args.embeddings, Some(args.dims))?;
    let stops = StopwordList::bundled();
    let lexicons = FeatureLexicons::bundled();
    let featurizer = Featurizer {
        table: &table,
        stops: &stops,
        lexicons: &lexicons,
    };
    let (x, y) = featurize_dataset(&dataset, &featurizer);
    info!("featurized {} records into {} columns", x.rows, x.cols);

    let mut fitted = model::fit(&x, &y)?;
    fitted.metadata.embedding_file = Some(file_label(&args.embeddings));
    fitted.metadata.embedding_dimension = Some(table.dimension());
    fitted.metadata.lexicon_checksums = bundled_lexicon_checksums();
    fitted.metadata.seed = Some(args.seed);
    save_model(&fitted, &args.model)?;

    let scores = fitted.raw_scores(&x)?;
    let n = y.len() as f64;
    let training_mse = y.iter().zip(&scores).map(|(t, s)| (t - s).powi(2)).sum::<f64>() / n;
    let mean = y.iter().sum::<f64>() / n;
    let target_variance = y.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    print_json(&TrainOutput {
        n: y.len(),
        training_mse,
        target_variance,
        feature_dimension: fitted.feature_dimension(),
        rank: fitted.metadata.rank,
        seed: args.seed,
        model: args.model.display().to_string(),
    })
}

fn check_model_table(model: &model::LinearModel, table: &EmbeddingTable) -> CmdResult {
    let expected = model.feature_dimension();
    let found = HANDCRAFTED_LEN + table.dimension();
    if expected != found {
        return Err(Failure::numeric(format!(
            "model expects {expected} features but the embedding table yields {found}"
        )));
    }
    let current = bundled_lexicon_checksums();
    if !model.metadata.lexicon_checksums.is_empty() && model.metadata.lexicon_checksums != current {
        warn!("model was trained with different lexicon files; features may not match");
    }
    Ok(())
}

pub fn predict(args: PredictArgs) -> CmdResult {
    require_files([&args.model, &args.instances, &args.embeddings])?;
    let model = load_model(&args.model)?;
    let instances = corpus::load_instances(&args.instances)?;
    let table = load_embeddings(&args.embeddings, args.dims)?;
    check_model_table(&model, &table)?;

    let stops = StopwordList::bundled();
    let lexicons = FeatureLexicons::bundled();
    let featurizer = Featurizer {
        table: &table,
        stops: &stops,
        lexicons: &lexicons,
    };
    let texts: Vec<&str> = instances.iter().map(|i| i.post_text.as_str()).collect();
    let x = featurizer.featurize_all(&texts);

    let out_path = args.out.as_deref();
    let mut out = open_output(out_path)?;
    let write_err = |e: io::Error| match out_path {
        Some(p) => io_failure(p, e),
        None => Failure::input(format!("cannot write standard output: {e}")),
    };
    for (instance, row) in instances.iter().zip(x.iter_rows()) {
        let prediction = model.predict(instance.id.as_str(), row)?;
        let line = ScoreLine {
            id: prediction.id,
            clickbait_score: prediction.clamped_score,
        };
        let text = serde_json::to_string(&line)
            .map_err(|e| Failure::numeric(format!("cannot serialize prediction: {e}")))?;
        writeln!(out, "{text}").map_err(write_err)?;
    }
    out.flush().map_err(write_err)?;
    info!("scored {} instances", instances.len());
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> CmdResult {
    require_files([&args.predictions, &args.truth])?;
    let report = metrics::evaluate(&args.predictions, &args.truth, args.threshold)?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure::numeric(format!("cannot serialize report: {e}")))?;
        fs::write(path, format!("{text}\n")).map_err(|e| io_failure(path, e))?;
    }
    print_json(&report)
}

pub fn features(args: FeaturesArgs) -> CmdResult {
    require_files([&args.instances, &args.embeddings])?;
    let instances = corpus::load_instances(&args.instances)?;
    let table = load_embeddings(&args.embeddings, Some(args.dims))?;
    let stops = StopwordList::bundled();
    let lexicons = FeatureLexicons::bundled();
    let featurizer = Featurizer {
        table: &table,
        stops: &stops,
        lexicons: &lexicons,
    };
    let texts: Vec<&str> = instances.iter().map(|i| i.post_text.as_str()).collect();
    let x = featurizer.featurize_all(&texts);

    let out_path = args.out.as_deref();
    let mut out = open_output(out_path)?;
    let write_err = |e: io::Error| match out_path {
        Some(p) => io_failure(p, e),
        None => Failure::input(format!("cannot write standard output: {e}")),
    };
    writeln!(out, "{}", column_names(table.dimension()).join(",")).map_err(write_err)?;
    for row in x.iter_rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(",")).map_err(write_err)?;
    }
    out.flush().map_err(write_err)
}
