//! Regression and classification statistics for predicted clickbait scores.
//!
//! Variances are population variances (divide by `n`). The normalized MSE
//! is reported as `1 − r2`, which is the same ratio of residual to total
//! sum of squares.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{load_truth, ClassLabel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionMetrics {
    pub mse: f64,
    pub mae: f64,
    pub median_ae: f64,
    /// `None` when the truth scores have zero variance.
    pub nmse: Option<f64>,
    pub explained_variance: Option<f64>,
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub confusion: Confusion,
}

/// The full evaluation report, serialized with the long metric names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    #[serde(rename = "mean_squared_error")]
    pub mse: f64,
    #[serde(rename = "median_absolute_error")]
    pub median_ae: f64,
    #[serde(rename = "f1_score")]
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    #[serde(rename = "normalised_mean_squared_error")]
    pub nmse: Option<f64>,
    #[serde(rename = "mean_absolute_error")]
    pub mae: f64,
    pub explained_variance: Option<f64>,
    #[serde(rename = "r2_score")]
    pub r2: Option<f64>,
    pub confusion: Confusion,
    pub n: usize,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn population_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn regression_metrics(y: &[f64], yhat: &[f64]) -> Result<RegressionMetrics> {
    check_lengths(y.len(), yhat.len())?;
    if y.len() < 2 {
        return Err(Error::Validation(format!(
            "regression metrics need at least 2 values, got {}",
            y.len()
        )));
    }
    if y.iter().chain(yhat).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric input".into()));
    }
    let n = y.len() as f64;
    let residuals: Vec<f64> = y.iter().zip(yhat).map(|(a, b)| a - b).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let abs_err: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let mse = ss_res / n;
    let mae = abs_err.iter().sum::<f64>() / n;
    let median_ae = median(abs_err);

    let y_mean = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let (nmse, explained_variance, r2) = if ss_tot > 0.0 {
        let r2 = 1.0 - ss_res / ss_tot;
        let ev = 1.0 - population_variance(&residuals) / (ss_tot / n);
        (Some(1.0 - r2), Some(ev), Some(r2))
    } else {
        (None, None, None)
    };
    Ok(RegressionMetrics {
        mse,
        mae,
        median_ae,
        nmse,
        explained_variance,
        r2,
    })
}

/// F1 from precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Clickbait is the positive class; a score at or above `threshold` is a
/// positive prediction.
pub fn classification_metrics(
    y: &[ClassLabel],
    scores: &[f64],
    threshold: f64,
) -> Result<ClassificationMetrics> {
    check_lengths(y.len(), scores.len())?;
    if y.is_empty() {
        return Err(Error::Empty("no labels to classify".into()));
    }
    let mut c = Confusion::default();
    for (&label, &score) in y.iter().zip(scores) {
        let predicted = score >= threshold;
        match (label == ClassLabel::Clickbait, predicted) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    Ok(ClassificationMetrics {
        precision,
        recall,
        f1: f1_score(precision, recall),
        accuracy: ratio(c.tp + c.tn, c.total()),
        confusion: c,
    })
}

/// Regression metrics on (truth mean, score) plus classification metrics
/// on (truth class, score).
pub fn report(
    truth_means: &[f64],
    truth_classes: &[ClassLabel],
    scores: &[f64],
    threshold: f64,
) -> Result<MetricsReport> {
    let reg = regression_metrics(truth_means, scores)?;
    let cls = classification_metrics(truth_classes, scores, threshold)?;
    Ok(MetricsReport {
        mse: reg.mse,
        median_ae: reg.median_ae,
        f1: cls.f1,
        precision: cls.precision,
        recall: cls.recall,
        accuracy: cls.accuracy,
        nmse: reg.nmse,
        mae: reg.mae,
        explained_variance: reg.explained_variance,
        r2: reg.r2,
        confusion: cls.confusion,
        n: truth_means.len(),
    })
}

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreLine {
    pub id: String,
    #[serde(rename = "clickbaitScore")]
    pub clickbait_score: f64,
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<ScoreLine>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, i + 1, format!("invalid JSON: {e}")))?;
        let id = match value.get("id") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => return Err(Error::parse(path, i + 1, "missing field `id`")),
        };
        let score = value
            .get("clickbaitScore")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::parse(path, i + 1, "missing numeric field `clickbaitScore`"))?;
        out.push(ScoreLine {
            id,
            clickbait_score: score,
        });
    }
    Ok(out)
}

/// Joins a predictions file with a truth file and computes the report.
///
/// Scores are clamped to `[0, 1]`. Records follow truth-file order.
pub fn evaluate(
    predictions_path: impl AsRef<Path>,
    truth_path: impl AsRef<Path>,
    threshold: f64,
) -> Result<MetricsReport> {
    let predictions = load_predictions(predictions_path)?;
    let truth = load_truth(truth_path)?;
    let mut by_id: HashMap<&str, f64> = HashMap::with_capacity(predictions.len());
    for p in &predictions {
        if by_id.insert(p.id.as_str(), p.clickbait_score).is_some() {
            return Err(Error::DuplicateId {
                id: p.id.clone(),
                source_name: "predictions".into(),
            });
        }
    }
    let mut means = Vec::new();
    let mut classes = Vec::new();
    let mut scores = Vec::new();
    for t in &truth {
        if let Some(&s) = by_id.get(t.id.as_str()) {
            means.push(t.mean);
            classes.push(t.class_label);
            scores.push(s.clamp(0.0, 1.0));
        }
    }
    if means.is_empty() {
        return Err(Error::Empty("predictions and truth share no ids".into()));
    }
    if means.len() < 2 {
        return Err(Error::Validation("evaluation needs at least 2 shared ids".into()));
    }
    report(&means, &classes, &scores, threshold)
}
