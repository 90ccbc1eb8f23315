//! Trainable parameters and the forward pass.
//!
//! Every feature owns two sigmoid cuts, one fitted on the events below its
//! center and one on the events above it. Each cut sees the normalized input
//! scaled by the feature's softmax importance score:
//!
//! ```text
//! ŷ = σ(w · s′ · x − b)
//! ```

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::EventTable;
use crate::error::{LcfError, Result};
use crate::rng::substream;

/// Default probability threshold for a cut to count as passed.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Initial weights are redrawn while their magnitude is below this.
const MIN_INIT_WEIGHT: f64 = 0.1;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Inverse of [`sigmoid`] on (0, 1).
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Importance-scaled input `x′ = s′ · x`.
pub fn scale_input(x_norm: f64, score: f64) -> f64 {
    score * x_norm
}

/// A single learnable cut, `σ(w · x′ − b)`.
pub fn cut_output(x_scaled: f64, w: f64, b: f64) -> f64 {
    sigmoid(w * x_scaled - b)
}

/// Mean and standard deviation per feature, fitted on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormalizationStats {
    /// Stats that leave values unchanged.
    pub fn identity(n_features: usize) -> Self {
        Self {
            mean: vec![0.0; n_features],
            std: vec![1.0; n_features],
        }
    }

    pub fn normalize(&self, feature: usize, raw: f64) -> f64 {
        (raw - self.mean[feature]) / self.std[feature]
    }

    pub fn denormalize(&self, feature: usize, norm: f64) -> f64 {
        norm * self.std[feature] + self.mean[feature]
    }

    pub(crate) fn select(&self, idx: &[usize]) -> Self {
        Self {
            mean: idx.iter().map(|&j| self.mean[j]).collect(),
            std: idx.iter().map(|&j| self.std[j]).collect(),
        }
    }
}

/// Lower and upper cut parameters of one feature. The center is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureCutParams {
    pub w_lower: f64,
    pub b_lower: f64,
    pub w_upper: f64,
    pub b_upper: f64,
    pub center_norm: f64,
}

/// Importance logits and the softmax scores derived from them.
///
/// Scores are recomputed on every change, so they can never go stale.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceVector {
    logits: Vec<f64>,
    scores: Vec<f64>,
}

impl ImportanceVector {
    pub fn uniform(n_features: usize) -> Self {
        Self::from_logits(vec![0.0; n_features])
    }

    pub fn from_logits(logits: Vec<f64>) -> Self {
        let scores = softmax(&logits);
        Self { logits, scores }
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.logits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.is_empty()
    }

    /// Mutates the logits in place and refreshes the scores.
    pub fn update<F: FnOnce(&mut [f64])>(&mut self, f: F) {
        f(&mut self.logits);
        self.scores = softmax(&self.logits);
    }
}

/// Per-event, per-feature cut outputs (row-major, `n_events × n_features`).
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    pub n_events: usize,
    pub n_features: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ForwardOutput {
    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.n_features + j]
    }

    pub fn upper(&self, i: usize, j: usize) -> f64 {
        self.upper[i * self.n_features + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcfModel {
    pub feature_names: Vec<String>,
    pub params: Vec<FeatureCutParams>,
    pub importance: ImportanceVector,
    pub norm: NormalizationStats,
    pub threshold: f64,
    pub seed: u64,
}

impl LcfModel {
    /// Fresh model: weights uniform in (−1, 1) with |w| ≥ 0.1, zero biases,
    /// uniform importance. Each feature draws from its own substream keyed by
    /// name, so initialization does not depend on column order.
    pub fn init(
        feature_names: Vec<String>,
        norm: NormalizationStats,
        centers_norm: &[f64],
        threshold: f64,
        seed: u64,
    ) -> Result<Self> {
        let f = feature_names.len();
        if centers_norm.len() != f || norm.mean.len() != f || norm.std.len() != f {
            return Err(LcfError::Dimension(format!(
                "{} features, {} centers, {} normalization entries",
                f,
                centers_norm.len(),
                norm.mean.len()
            )));
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(LcfError::Config(format!(
                "threshold must lie in (0, 1), got {threshold}"
            )));
        }
        let params = feature_names
            .iter()
            .zip(centers_norm)
            .map(|(name, &center_norm)| {
                let mut rng = substream(seed, &format!("init/{name}"));
                let mut draw = || loop {
                    let w: f64 = rng.gen_range(-1.0..1.0);
                    if w.abs() >= MIN_INIT_WEIGHT {
                        break w;
                    }
                };
                FeatureCutParams {
                    w_lower: draw(),
                    b_lower: 0.0,
                    w_upper: draw(),
                    b_upper: 0.0,
                    center_norm,
                }
            })
            .collect();
        Ok(Self {
            importance: ImportanceVector::uniform(f),
            feature_names,
            params,
            norm,
            threshold,
            seed,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn scores(&self) -> &[f64] {
        self.importance.scores()
    }

    pub fn center_raw(&self, j: usize) -> f64 {
        self.norm.denormalize(j, self.params[j].center_norm)
    }

    /// Cut outputs for a batch normalized with this model's stats.
    pub fn forward(&self, batch: &EventTable) -> Result<ForwardOutput> {
        self.check_batch(batch)?;
        Ok(self.forward_rows(batch.values(), batch.n_events()))
    }

    pub(crate) fn check_batch(&self, batch: &EventTable) -> Result<()> {
        if batch.n_features() != self.n_features() {
            return Err(LcfError::Dimension(format!(
                "batch has {} features, model has {}",
                batch.n_features(),
                self.n_features()
            )));
        }
        match batch.normalization() {
            Some(stats) if *stats == self.norm => Ok(()),
            Some(_) => Err(LcfError::Data(
                "batch was normalized with different statistics than the model".into(),
            )),
            None => Err(LcfError::Data(
                "batch must be normalized before the forward pass".into(),
            )),
        }
    }

    /// Forward pass over row-major normalized values.
    pub(crate) fn forward_rows(&self, values: &[f64], n_events: usize) -> ForwardOutput {
        let f = self.n_features();
        let scores = self.scores();
        let mut lower = Vec::with_capacity(n_events * f);
        let mut upper = Vec::with_capacity(n_events * f);
        for row in values.chunks_exact(f).take(n_events) {
            for ((x, p), &s) in row.iter().zip(&self.params).zip(scores) {
                let xs = scale_input(*x, s);
                lower.push(cut_output(xs, p.w_lower, p.b_lower));
                upper.push(cut_output(xs, p.w_upper, p.b_upper));
            }
        }
        ForwardOutput {
            n_events,
            n_features: f,
            lower,
            upper,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk model layout.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    features: Vec<FeatureEntry>,
    importance_logits: Vec<f64>,
    normalization: NormalizationStats,
    threshold: f64,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureEntry {
    name: String,
    #[serde(flatten)]
    params: FeatureCutParams,
}

impl From<&LcfModel> for ModelFile {
    fn from(m: &LcfModel) -> Self {
        Self {
            features: m
                .feature_names
                .iter()
                .zip(&m.params)
                .map(|(name, p)| FeatureEntry {
                    name: name.clone(),
                    params: *p,
                })
                .collect(),
            importance_logits: m.importance.logits().to_vec(),
            normalization: m.norm.clone(),
            threshold: m.threshold,
            seed: m.seed,
        }
    }
}

impl TryFrom<ModelFile> for LcfModel {
    type Error = LcfError;

    fn try_from(file: ModelFile) -> Result<Self> {
        let f = file.features.len();
        if file.importance_logits.len() != f
            || file.normalization.mean.len() != f
            || file.normalization.std.len() != f
        {
            return Err(LcfError::Dimension(
                "model file: per-feature arrays disagree in length".into(),
            ));
        }
        if !(file.threshold > 0.0 && file.threshold < 1.0) {
            return Err(LcfError::Config(format!(
                "model file: threshold {} outside (0, 1)",
                file.threshold
            )));
        }
        let (feature_names, params) = file
            .features
            .into_iter()
            .map(|e| (e.name, e.params))
            .unzip();
        Ok(Self {
            feature_names,
            params,
            importance: ImportanceVector::from_logits(file.importance_logits),
            norm: file.normalization,
            threshold: file.threshold,
            seed: file.seed,
        })
    }
}
