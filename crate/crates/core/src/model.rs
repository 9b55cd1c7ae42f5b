//! Unregularized linear regression over feature rows.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::linalg::{dot, lstsq};

pub const FORMAT_VERSION: u64 = 1;

/// Provenance recorded alongside the fitted parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    #[serde(default)]
    pub embedding_file: Option<String>,
    #[serde(default)]
    pub embedding_dimension: Option<usize>,
    #[serde(default)]
    pub lexicon_checksums: BTreeMap<String, String>,
    #[serde(default)]
    pub training_records: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Numerical rank of the augmented design matrix at fit time.
    #[serde(default)]
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub metadata: ModelMetadata,
}

/// A scored headline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub id: String,
    pub raw_score: f64,
    pub clamped_score: f64,
}

impl Prediction {
    pub fn new(id: impl Into<String>, raw_score: f64) -> Self {
        Prediction {
            id: id.into(),
            raw_score,
            clamped_score: raw_score.clamp(0.0, 1.0),
        }
    }
}

/// Least-squares fit of `y ≈ X w + b`.
///
/// The intercept is an extra all-ones column and no coefficient is
/// penalized. Rank-deficient designs get the minimum-norm solution.
pub fn fit(x: &FeatureMatrix, y: &[f64]) -> Result<LinearModel> {
    if x.rows == 0 {
        return Err(Error::Empty("cannot fit a model on zero rows".into()));
    }
    if y.len() != x.rows {
        return Err(Error::Dimension {
            expected: x.rows,
            found: y.len(),
        });
    }
    if x.data.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training data".into()));
    }
    let d = x.cols;
    let p = d + 1;
    let mut augmented = Vec::with_capacity(x.rows * p);
    for row in x.iter_rows() {
        augmented.extend_from_slice(row);
        augmented.push(1.0);
    }
    let solution = lstsq(&augmented, x.rows, p, y)?;
    let mut weights = solution.x;
    let intercept = weights.pop().expect("augmented system has an intercept");
    Ok(LinearModel {
        weights,
        intercept,
        metadata: ModelMetadata {
            training_records: x.rows,
            rank: Some(solution.rank),
            ..Default::default()
        },
    })
}

impl LinearModel {
    pub fn feature_dimension(&self) -> usize {
        self.weights.len()
    }

    /// `w · x + b`.
    pub fn raw_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Dimension {
                expected: self.weights.len(),
                found: x.len(),
            });
        }
        Ok(dot(&self.weights, x) + self.intercept)
    }

    pub fn predict(&self, id: impl Into<String>, x: &[f64]) -> Result<Prediction> {
        Ok(Prediction::new(id, self.raw_score(x)?))
    }

    /// Raw scores for every row of `x`.
    pub fn raw_scores(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        x.iter_rows().map(|row| self.raw_score(row)).collect()
    }

    /// Serializes to the versioned JSON model format.
    pub fn to_json(&self) -> Result<String> {
        if !self.intercept.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("model parameters".into()));
        }
        let file = ModelFileOut {
            format_version: FORMAT_VERSION,
            feature_dimension: self.weights.len(),
            weights: self.weights.iter().map(|&w| Fixed17(w)).collect(),
            intercept: Fixed17(self.intercept),
            metadata: &self.metadata,
        };
        let mut text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::Validation(format!("cannot serialize model: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let malformed = |message: String| Error::MalformedModel {
            path: path.to_path_buf(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| malformed("missing integer `format_version`".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let file: ModelFileIn = serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
        if file.weights.len() != file.feature_dimension {
            return Err(Error::Dimension {
                expected: file.feature_dimension,
                found: file.weights.len(),
            });
        }
        if file.feature_dimension == 0 {
            return Err(malformed("feature_dimension must be positive".into()));
        }
        Ok(LinearModel {
            weights: file.weights,
            intercept: file.intercept,
            metadata: file.metadata,
        })
    }
}

pub fn save_model(model: &LinearModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = model.to_json()?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LinearModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    LinearModel::from_json(&text, path)
}

/// An `f64` written with 17 significant digits.
struct Fixed17(f64);

impl Serialize for Fixed17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let text = format!("{:.16e}", self.0);
        let raw = RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    format_version: u64,
    feature_dimension: usize,
    weights: Vec<Fixed17>,
    intercept: Fixed17,
    metadata: &'a ModelMetadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileIn {
    #[allow(dead_code)]
    format_version: u64,
    feature_dimension: usize,
    weights: Vec<f64>,
    intercept: f64,
    #[serde(default)]
    metadata: ModelMetadata,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows[0].len(), rows).unwrap()
    }

    #[test]
    fn exact_line() {
        let x = matrix(&[vec![0.0], vec![1.0], vec![2.0]]);
        let m = fit(&x, &[1.0, 3.0, 5.0]).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-9);
        assert!((m.intercept - 1.0).abs() < 1e-9);
        let p = m.predict("x", &[3.0]).unwrap();
        assert!((p.raw_score - 7.0).abs() < 1e-9);
        assert_eq!(p.clamped_score, 1.0);
    }

    #[test]
    fn constant_target() {
        let x = matrix(&[vec![1.0, 5.0], vec![2.0, -1.0], vec![0.5, 3.0], vec![4.0, 4.0]]);
        let m = fit(&x, &[0.3; 4]).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-9));
        assert!((m.intercept - 0.3).abs() < 1e-9);
    }

    #[test]
    fn duplicate_columns_share_weight() {
        let x = matrix(&[
            vec![1.0, 1.0, 0.5],
            vec![2.0, 2.0, -1.0],
            vec![3.0, 3.0, 0.0],
            vec![-1.0, -1.0, 2.0],
            vec![0.5, 0.5, 1.5],
        ]);
        let y: Vec<f64> = x.iter_rows().map(|r| 2.0 * r[0] + 0.25 * r[2] + 1.0).collect();
        let m = fit(&x, &y).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-6, "{:?}", m.weights);
        assert!((m.weights[1] - 1.0).abs() < 1e-6);
        assert_eq!(m.metadata.rank, Some(3));
    }

    #[test]
    fn fit_errors() {
        let empty = FeatureMatrix {
            rows: 0,
            cols: 2,
            data: vec![],
        };
        assert!(matches!(fit(&empty, &[]), Err(Error::Empty(_))));
        let x = matrix(&[vec![f64::INFINITY]]);
        assert!(matches!(fit(&x, &[0.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn prediction_clamping() {
        let m = LinearModel {
            weights: vec![0.0; 3],
            intercept: 0.3,
            metadata: ModelMetadata::default(),
        };
        let p = m.predict("a", &[9.0, 9.0, 9.0]).unwrap();
        assert_eq!((p.raw_score, p.clamped_score), (0.3, 0.3));

        let m = LinearModel {
            weights: vec![1.0, 0.0, 0.0],
            intercept: 0.7,
            metadata: ModelMetadata::default(),
        };
        let p = m.predict("b", &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((p.raw_score, p.clamped_score), (1.7, 1.0));
        assert_eq!(m.predict("c", &[-2.0, 0.0, 0.0]).unwrap().clamped_score, 0.0);
        assert!(matches!(m.predict("d", &[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn numbers_have_17_significant_digits() {
        let m = LinearModel {
            weights: vec![0.1, -2.5],
            intercept: 1.0 / 3.0,
            metadata: ModelMetadata::default(),
        };
        let text = m.to_json().unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("-2.5000000000000000e0"));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn load_errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let m = LinearModel {
            weights: vec![0.25; 307],
            intercept: 0.1,
            metadata: ModelMetadata::default(),
        };
        let text = m.to_json().unwrap();

        let truncated = dir.path().join("truncated.json");
        fs::write(&truncated, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_model(&truncated), Err(Error::MalformedModel { .. })));

        let version = dir.path().join("v2.json");
        fs::write(&version, text.replace("\"format_version\": 1", "\"format_version\": 2")).unwrap();
        assert!(matches!(load_model(&version), Err(Error::ModelVersion { found: 2, .. })));

        let dims = dir.path().join("dims.json");
        fs::write(&dims, text.replace("\"feature_dimension\": 307", "\"feature_dimension\": 306")).unwrap();
        assert!(matches!(load_model(&dims), Err(Error::Dimension { .. })));

        let ok = dir.path().join("ok.json");
        save_model(&m, &ok).unwrap();
        let loaded = load_model(&ok).unwrap();
        assert_eq!(loaded.feature_dimension(), 307);
        assert!(loaded.predict("x", &[1.0; 307]).is_ok());
    }

    #[test]
    fn non_finite_parameters_are_not_saved() {
        let m = LinearModel {
            weights: vec![f64::NAN],
            intercept: 0.0,
            metadata: ModelMetadata::default(),
        };
        assert!(matches!(m.to_json(), Err(Error::NonFinite(_))));
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(
            weights in prop::collection::vec(
                any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40),
            intercept in any::<f64>().prop_filter("finite", |v| v.is_finite()),
            seed in any::<Option<u64>>(),
        ) {
            let m = LinearModel {
                weights,
                intercept,
                metadata: ModelMetadata { seed, training_records: 11, ..Default::default() },
            };
            let back = LinearModel::from_json(&m.to_json().unwrap(), Path::new("mem")).unwrap();
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back.weights), bits(&m.weights));
            prop_assert_eq!(back.intercept.to_bits(), m.intercept.to_bits());
            prop_assert_eq!(back.metadata, m.metadata);
        }
    }
}
