//! Masked binary cross-entropy and its closed-form gradients.
//!
//! For event `i` and feature `j` the loss term is
//!
//! ```text
//! L_ij = ½ · g_ij · (bce(y_i, ŷˡ_ij)·mˡ_ij + bce(y_i, ŷᵘ_ij)·mᵘ_ij)
//! ```
//!
//! where `mˡ`/`mᵘ` select the side of the feature's center the event falls
//! on and `g` is the strategy gate (all ones for `parallel`, the cut-flow
//! mask for `sequential`). The batch loss is the mean over events of the sum
//! over features. Masks carry no gradient.

use crate::data::EventTable;
use crate::error::{LcfError, Result};
use crate::model::{ForwardOutput, LcfModel};
use crate::strategy::{CutStrategy, MaskMode, Parallel, Sequential};

/// Predictions are clamped to `[PRED_EPS, 1 − PRED_EPS]` inside [`bce`].
pub const PRED_EPS: f64 = 1e-7;

pub fn bce(y: u8, yhat: f64) -> f64 {
    let p = yhat.clamp(PRED_EPS, 1.0 - PRED_EPS);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Which side of its center each event-feature value falls on.
/// `x < center` is lower, `x ≥ center` is upper.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterMasks {
    pub n_events: usize,
    pub n_features: usize,
    pub lower: Vec<bool>,
    pub upper: Vec<bool>,
}

impl CenterMasks {
    pub fn lower(&self, i: usize, j: usize) -> bool {
        self.lower[i * self.n_features + j]
    }

    pub fn upper(&self, i: usize, j: usize) -> bool {
        self.upper[i * self.n_features + j]
    }
}

pub fn center_masks(batch: &EventTable, centers_norm: &[f64]) -> Result<CenterMasks> {
    if centers_norm.len() != batch.n_features() {
        return Err(LcfError::Dimension(format!(
            "{} centers for {} features",
            centers_norm.len(),
            batch.n_features()
        )));
    }
    Ok(center_masks_rows(
        batch.values(),
        batch.n_events(),
        centers_norm,
    ))
}

fn center_masks_rows(values: &[f64], n_events: usize, centers: &[f64]) -> CenterMasks {
    let f = centers.len();
    let lower: Vec<bool> = values
        .chunks_exact(f)
        .take(n_events)
        .flat_map(|row| row.iter().zip(centers).map(|(x, c)| x < c))
        .collect();
    let upper = lower.iter().map(|&l| !l).collect();
    CenterMasks {
        n_events,
        n_features: f,
        lower,
        upper,
    }
}

/// Cut-flow gate: `mask[i][j]` is 1 when event `i` reaches feature `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialMask {
    pub n_events: usize,
    pub n_features: usize,
    pub mask: Vec<bool>,
}

impl SequentialMask {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n_features + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.mask[i * self.n_features..(i + 1) * self.n_features]
    }
}

/// `mask[i][0] = 1`; later entries require both cut outputs of the previous
/// feature to reach `t` (ties pass). In cumulative mode the previous mask
/// entry is ANDed in as well.
pub fn sequential_masks(outputs: &ForwardOutput, t: f64, mode: MaskMode) -> SequentialMask {
    let f = outputs.n_features;
    let mut mask = Vec::with_capacity(outputs.n_events * f);
    for i in 0..outputs.n_events {
        let mut gate = true;
        for j in 0..f {
            if j > 0 {
                let passed = outputs.lower(i, j - 1) >= t && outputs.upper(i, j - 1) >= t;
                gate = match mode {
                    MaskMode::Cumulative => gate && passed,
                    MaskMode::OneStep => passed,
                };
            }
            mask.push(gate);
        }
    }
    SequentialMask {
        n_events: outputs.n_events,
        n_features: f,
        mask,
    }
}

/// Analytic gradients of a batch loss.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub d_w_lower: Vec<f64>,
    pub d_b_lower: Vec<f64>,
    pub d_w_upper: Vec<f64>,
    pub d_b_upper: Vec<f64>,
    pub d_logits: Vec<f64>,
}

impl GradientSet {
    fn zeros(f: usize) -> Self {
        Self {
            d_w_lower: vec![0.0; f],
            d_b_lower: vec![0.0; f],
            d_w_upper: vec![0.0; f],
            d_b_upper: vec![0.0; f],
            d_logits: vec![0.0; f],
        }
    }

    pub fn n_features(&self) -> usize {
        self.d_logits.len()
    }

    /// All components, in parameter-vector order (see [`crate::optim::param_name`]).
    pub fn flatten(&self) -> Vec<f64> {
        let f = self.n_features();
        let mut out = Vec::with_capacity(5 * f);
        for j in 0..f {
            out.extend([
                self.d_w_lower[j],
                self.d_b_lower[j],
                self.d_w_upper[j],
                self.d_b_upper[j],
            ]);
        }
        out.extend_from_slice(&self.d_logits);
        out
    }
}

/// Loss under the parallel strategy.
pub fn parallel_loss(batch: &EventTable, model: &LcfModel) -> Result<f64> {
    strategy_loss(batch, model, &Parallel)
}

/// Loss under the sequential strategy with cumulative masking.
pub fn sequential_loss(batch: &EventTable, model: &LcfModel) -> Result<f64> {
    strategy_loss(batch, model, &Sequential::default())
}

pub fn strategy_loss(
    batch: &EventTable,
    model: &LcfModel,
    strategy: &dyn CutStrategy,
) -> Result<f64> {
    Ok(loss_and_gradients(batch, model, strategy)?.0)
}

pub fn gradients(
    batch: &EventTable,
    model: &LcfModel,
    strategy: &dyn CutStrategy,
) -> Result<GradientSet> {
    Ok(loss_and_gradients(batch, model, strategy)?.1)
}

pub fn loss_and_gradients(
    batch: &EventTable,
    model: &LcfModel,
    strategy: &dyn CutStrategy,
) -> Result<(f64, GradientSet)> {
    model.check_batch(batch)?;
    loss_and_gradients_rows(batch.values(), batch.labels(), model, strategy)
}

/// One forward pass producing both the mean loss and every gradient.
pub(crate) fn loss_and_gradients_rows(
    values: &[f64],
    labels: &[u8],
    model: &LcfModel,
    strategy: &dyn CutStrategy,
) -> Result<(f64, GradientSet)> {
    let n = labels.len();
    if n == 0 {
        return Err(LcfError::EmptyBatch);
    }
    let f = model.n_features();
    let out = model.forward_rows(values, n);
    let centers: Vec<f64> = model.params.iter().map(|p| p.center_norm).collect();
    let sides = center_masks_rows(values, n, &centers);
    let gate = strategy.flow_mask(&out, model.threshold);
    let scores = model.scores();

    let mut total = 0.0;
    let mut g = GradientSet::zeros(f);
    // ∂L/∂s′_j, before the softmax Jacobian.
    let mut delta = vec![0.0; f];
    for i in 0..n {
        let y = labels[i];
        let yf = f64::from(y);
        for j in 0..f {
            if gate.as_ref().is_some_and(|m| !m.get(i, j)) {
                continue;
            }
            let k = i * f + j;
            let x = values[k];
            let p = &model.params[j];
            // Exactly one side is live per event-feature pair.
            let (yhat, w) = if sides.lower[k] {
                (out.lower[k], p.w_lower)
            } else {
                (out.upper[k], p.w_upper)
            };
            total += 0.5 * bce(y, yhat);
            let r = 0.5 * (yhat - yf);
            if sides.lower[k] {
                g.d_w_lower[j] += r * scores[j] * x;
                g.d_b_lower[j] -= r;
            } else {
                g.d_w_upper[j] += r * scores[j] * x;
                g.d_b_upper[j] -= r;
            }
            delta[j] += r * w * x;
        }
    }
    let inv_n = 1.0 / n as f64;
    for v in g
        .d_w_lower
        .iter_mut()
        .chain(&mut g.d_b_lower)
        .chain(&mut g.d_w_upper)
        .chain(&mut g.d_b_upper)
        .chain(&mut delta)
    {
        *v *= inv_n;
    }
    let baseline: f64 = scores.iter().zip(&delta).map(|(s, d)| s * d).sum();
    for (k, d) in g.d_logits.iter_mut().enumerate() {
        *d = scores[k] * (delta[k] - baseline);
    }
    Ok((total * inv_n, g))
}
