//! Clickbait Challenge corpora: loading, joining and the balanced split.
//!
//! An instances file holds one JSON object per line with an `id` and a
//! `postText`; a truth file holds `id`, `truthJudgments`, `truthMean` and
//! `truthClass`. Only the post text is used downstream, but the remaining
//! fields of an instance are kept so that split files can be written back
//! without loss.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::rng::XorShift64Star;

const MEAN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "clickbait")]
    Clickbait,
    #[serde(rename = "no-clickbait")]
    NoClickbait,
}

impl ClassLabel {
    /// The class implied by a mean score: clickbait strictly above 0.5.
    pub fn from_mean(mean: f64) -> Self {
        if mean > 0.5 {
            ClassLabel::Clickbait
        } else {
            ClassLabel::NoClickbait
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Clickbait => "clickbait",
            ClassLabel::NoClickbait => "no-clickbait",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "clickbait" => Some(ClassLabel::Clickbait),
            "no-clickbait" | "no_clickbait" => Some(ClassLabel::NoClickbait),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tweet post.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub post_text: String,
    /// The source JSON object as read, including fields not used here.
    pub raw: Map<String, Value>,
}

impl Instance {
    pub fn new(id: impl Into<String>, post_text: impl Into<String>) -> Self {
        let id = id.into();
        let post_text = post_text.into();
        let mut raw = Map::new();
        raw.insert("id".into(), Value::String(id.clone()));
        raw.insert("postText".into(), Value::Array(vec![Value::String(post_text.clone())]));
        Instance { id, post_text, raw }
    }
}

/// Human judgments for one post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLabel {
    pub id: String,
    #[serde(rename = "truthJudgments")]
    pub judgments: Vec<f64>,
    #[serde(rename = "truthMean")]
    pub mean: f64,
    #[serde(rename = "truthClass")]
    pub class_label: ClassLabel,
}

impl TruthLabel {
    /// A label whose class follows from `mean`.
    pub fn from_judgments(id: impl Into<String>, judgments: Vec<f64>) -> Self {
        let mean = if judgments.is_empty() {
            0.0
        } else {
            judgments.iter().sum::<f64>() / judgments.len() as f64
        };
        TruthLabel {
            id: id.into(),
            judgments,
            mean,
            class_label: ClassLabel::from_mean(mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRecord {
    pub instance: Instance,
    pub label: TruthLabel,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledDataset {
    pub records: Vec<LabeledRecord>,
    /// Names of the files the records came from.
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub clickbait: usize,
    pub no_clickbait: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.clickbait + self.no_clickbait
    }
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn class_counts(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for r in &self.records {
            match r.label.class_label {
                ClassLabel::Clickbait => counts.clickbait += 1,
                ClassLabel::NoClickbait => counts.no_clickbait += 1,
            }
        }
        counts
    }

    /// Records of `self` followed by those of `other`.
    pub fn concat(mut self, other: LabeledDataset) -> LabeledDataset {
        self.records.extend(other.records);
        self.provenance.extend(other.provenance);
        self
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.records.iter().map(|r| &r.instance)
    }

    pub fn labels(&self) -> impl Iterator<Item = &TruthLabel> {
        self.records.iter().map(|r| &r.label)
    }
}

fn json_lines(path: &Path) -> Result<Vec<(usize, Map<String, Value>)>> {
    let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut objects = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, line_no, format!("invalid JSON: {e}")))?;
        match value {
            Value::Object(map) => objects.push((line_no, map)),
            _ => return Err(Error::parse(path, line_no, "expected a JSON object")),
        }
    }
    Ok(objects)
}

fn read_id(path: &Path, line: usize, map: &Map<String, Value>) -> Result<String> {
    let id = match map.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(_) => return Err(Error::parse(path, line, "field `id` must be a string or number")),
        None => return Err(Error::parse(path, line, "missing field `id`")),
    };
    if id.is_empty() {
        return Err(Error::parse(path, line, "field `id` is empty"));
    }
    Ok(id)
}

fn read_post_text(path: &Path, line: usize, map: &Map<String, Value>) -> Result<String> {
    match map.get("postText") {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Array(parts)) => {
            let mut pieces = Vec::with_capacity(parts.len());
            for p in parts {
                match p {
                    Value::String(s) => pieces.push(s.as_str()),
                    _ => {
                        return Err(Error::parse(
                            path,
                            line,
                            "field `postText` must hold only strings",
                        ))
                    }
                }
            }
            Ok(pieces.join(" "))
        }
        Some(Value::Null) | None => Err(Error::parse(path, line, "missing field `postText`")),
        Some(_) => Err(Error::parse(
            path,
            line,
            "field `postText` must be a string or an array of strings",
        )),
    }
}

/// Reads an instances file, one [`Instance`] per non-blank line in file order.
pub fn load_instances(path: impl AsRef<Path>) -> Result<Vec<Instance>> {
    let path = path.as_ref();
    json_lines(path)?
        .into_iter()
        .map(|(line, raw)| {
            let id = read_id(path, line, &raw)?;
            let post_text = read_post_text(path, line, &raw)?;
            Ok(Instance { id, post_text, raw })
        })
        .collect()
}

fn read_number(path: &Path, line: usize, value: &Value, field: &str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| Error::parse(path, line, format!("field `{field}` must be numeric")))
}

/// Reads a truth file.
///
/// A stored mean that disagrees with the average of the judgments, or a
/// stored class that disagrees with the mean, is logged as a warning; the
/// stored values are kept.
pub fn load_truth(path: impl AsRef<Path>) -> Result<Vec<TruthLabel>> {
    let path = path.as_ref();
    let mut labels = Vec::new();
    for (line, map) in json_lines(path)? {
        let id = read_id(path, line, &map)?;
        let judgments = match map.get("truthJudgments") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| read_number(path, line, v, "truthJudgments"))
                .collect::<Result<Vec<_>>>()?,
            Some(Value::Null) | None => Vec::new(),
            Some(_) => {
                return Err(Error::parse(path, line, "field `truthJudgments` must be an array"))
            }
        };
        let mean = match map.get("truthMean") {
            Some(v) => read_number(path, line, v, "truthMean")?,
            None => return Err(Error::parse(path, line, "missing field `truthMean`")),
        };
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::Validation(format!(
                "{}:{line}: truthMean {mean} outside [0, 1]",
                path.display()
            )));
        }
        if let Some(j) = judgments.iter().find(|j| !(0.0..=1.0).contains(*j)) {
            return Err(Error::Validation(format!(
                "{}:{line}: judgment {j} outside [0, 1]",
                path.display()
            )));
        }
        let class_label = match map.get("truthClass") {
            Some(Value::String(s)) => ClassLabel::parse(s).ok_or_else(|| {
                Error::parse(path, line, format!("unknown truthClass {s:?}"))
            })?,
            Some(_) => return Err(Error::parse(path, line, "field `truthClass` must be a string")),
            None => ClassLabel::from_mean(mean),
        };

        if !judgments.is_empty() {
            let avg = judgments.iter().sum::<f64>() / judgments.len() as f64;
            if (avg - mean).abs() > MEAN_TOLERANCE {
                warn!(
                    "{}:{line}: id {id}: truthMean {mean} differs from judgment average {avg}",
                    path.display()
                );
            }
        }
        if class_label != ClassLabel::from_mean(mean) {
            warn!(
                "{}:{line}: id {id}: truthClass {class_label} inconsistent with truthMean {mean}",
                path.display()
            );
        }
        labels.push(TruthLabel {
            id,
            judgments,
            mean,
            class_label,
        });
    }
    Ok(labels)
}

/// Ids that appeared in only one of the joined inputs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JoinReport {
    pub matched: usize,
    pub instances_without_truth: usize,
    pub truths_without_instance: usize,
}

/// Pairs instances with truth labels by id, in instance order.
///
/// Ids present on only one side are dropped and counted in the report.
pub fn join(
    instances: Vec<Instance>,
    truths: Vec<TruthLabel>,
    source_name: &str,
) -> Result<(LabeledDataset, JoinReport)> {
    let mut seen = HashSet::with_capacity(instances.len());
    for inst in &instances {
        if !seen.insert(inst.id.as_str()) {
            return Err(Error::DuplicateId {
                id: inst.id.clone(),
                source_name: format!("{source_name} instances"),
            });
        }
    }
    let mut by_id: HashMap<String, TruthLabel> = HashMap::with_capacity(truths.len());
    for t in truths {
        if by_id.contains_key(&t.id) {
            return Err(Error::DuplicateId {
                id: t.id,
                source_name: format!("{source_name} truth"),
            });
        }
        by_id.insert(t.id.clone(), t);
    }

    let mut report = JoinReport::default();
    let mut records = Vec::with_capacity(instances.len().min(by_id.len()));
    for instance in instances {
        match by_id.remove(&instance.id) {
            Some(label) => records.push(LabeledRecord { instance, label }),
            None => report.instances_without_truth += 1,
        }
    }
    report.matched = records.len();
    report.truths_without_instance = by_id.len();
    if report.instances_without_truth > 0 || report.truths_without_instance > 0 {
        warn!(
            "{source_name}: dropped {} instances without truth and {} truth labels without instance",
            report.instances_without_truth, report.truths_without_instance
        );
    }
    Ok((
        LabeledDataset {
            records,
            provenance: vec![source_name.to_string()],
        },
        report,
    ))
}

/// Loads and joins an instances/truth file pair.
pub fn load_labeled(
    instances_path: impl AsRef<Path>,
    truth_path: impl AsRef<Path>,
) -> Result<(LabeledDataset, JoinReport)> {
    let instances_path = instances_path.as_ref();
    let instances = load_instances(instances_path)?;
    let truths = load_truth(truth_path.as_ref())?;
    let name = instances_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| instances_path.display().to_string());
    join(instances, truths, &name)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSummary {
    pub seed: u64,
    pub train_fraction: f64,
    pub merged: ClassCounts,
    pub balanced: ClassCounts,
    pub train: ClassCounts,
    pub validation: ClassCounts,
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: LabeledDataset,
    pub validation: LabeledDataset,
    pub summary: SplitSummary,
}

/// Number of training records for a pool of `n`: `train_fraction * n`
/// rounded half up.
pub fn train_size(train_fraction: f64, n: usize) -> usize {
    ((train_fraction * n as f64) + 0.5).floor() as usize
}

/// Concatenates `a` and `b`, balances the classes and splits the pool.
///
/// Every record of the minority class is kept, together with a uniform
/// sample (without replacement) of as many majority records. The balanced
/// pool (clickbait records first, each class in source order) is shuffled
/// and its first `train_size(train_fraction, 2m)` records become the
/// training half. Sampling and shuffling share one generator seeded by
/// `seed`.
pub fn merge_balance_split(
    a: LabeledDataset,
    b: LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let merged = a.concat(b);
    let merged_counts = merged.class_counts();
    let provenance = merged.provenance.clone();

    let (clickbait, no_clickbait): (Vec<LabeledRecord>, Vec<LabeledRecord>) = merged
        .records
        .into_iter()
        .partition(|r| r.label.class_label == ClassLabel::Clickbait);
    if clickbait.is_empty() || no_clickbait.is_empty() {
        return Err(Error::CannotBalance(format!(
            "merged corpus has {} clickbait and {} no-clickbait records",
            clickbait.len(),
            no_clickbait.len()
        )));
    }

    let mut rng = XorShift64Star::new(seed);
    let m = clickbait.len().min(no_clickbait.len());
    let subsample = |records: Vec<LabeledRecord>, rng: &mut XorShift64Star| {
        if records.len() == m {
            return records;
        }
        let mut picked = rng.sample_indices(records.len(), m);
        picked.sort_unstable();
        let mut slots: Vec<Option<LabeledRecord>> = records.into_iter().map(Some).collect();
        picked
            .into_iter()
            .map(|i| slots[i].take().expect("indices are distinct"))
            .collect::<Vec<_>>()
    };
    let mut pool = subsample(clickbait, &mut rng);
    pool.extend(subsample(no_clickbait, &mut rng));
    rng.shuffle(&mut pool);

    let n_train = train_size(train_fraction, pool.len());
    let validation_records = pool.split_off(n_train);
    let train = LabeledDataset {
        records: pool,
        provenance: provenance.clone(),
    };
    let validation = LabeledDataset {
        records: validation_records,
        provenance,
    };
    let summary = SplitSummary {
        seed,
        train_fraction,
        merged: merged_counts,
        balanced: ClassCounts {
            clickbait: m,
            no_clickbait: m,
        },
        train: train.class_counts(),
        validation: validation.class_counts(),
    };
    Ok(Split {
        train,
        validation,
        summary,
    })
}

/// Writes the instances of `ds` as JSONL, one source object per line.
pub fn write_instances(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_lines(path.as_ref(), ds.instances().map(|i| serde_json::to_string(&i.raw)))
}

/// Writes the truth labels of `ds` as JSONL.
pub fn write_truth(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_lines(path.as_ref(), ds.labels().map(serde_json::to_string))
}

fn write_lines<I>(path: &Path, lines: I) -> Result<()>
where
    I: Iterator<Item = serde_json::Result<String>>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for line in lines {
        let line = line.map_err(|e| Error::Validation(format!("cannot serialize record: {e}")))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
