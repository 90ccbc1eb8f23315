//! Adam and the mini-batch training loop.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{apply_normalizer, fit_normalizer, EventTable};
use crate::error::{LcfError, Result};
use crate::loss::{loss_and_gradients_rows, GradientSet};
use crate::model::{LcfModel, DEFAULT_THRESHOLD};
use crate::rng::substream;
use crate::strategy::{MaskMode, StrategyRegistry};

/// Default fraction of the average importance (1/F) a feature needs to be
/// kept at inference.
pub const DEFAULT_MIN_IMPORTANCE_RATIO: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Name of a registered strategy.
    pub strategy: String,
    pub threshold: f64,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub min_importance_ratio: f64,
    pub sequential_mask_mode: MaskMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            batch_size: 512,
            epochs: 200,
            strategy: "parallel".into(),
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            min_importance_ratio: DEFAULT_MIN_IMPORTANCE_RATIO,
            sequential_mask_mode: MaskMode::Cumulative,
        }
    }
}

impl TrainConfig {
    pub fn with_strategy(mut self, name: &str) -> Self {
        self.strategy = name.to_string();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LcfError::Config(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            ));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)".into());
        }
        if !(self.adam_eps > 0.0) {
            return bad("adam_eps must be positive".into());
        }
        if !(self.min_importance_ratio >= 0.0 && self.min_importance_ratio.is_finite()) {
            return bad(format!(
                "min_importance_ratio must be non-negative, got {}",
                self.min_importance_ratio
            ));
        }
        Ok(())
    }
}

/// Parameter vector layout: `[w_lower, b_lower, w_upper, b_upper]` for each
/// feature in order, followed by the importance logits.
pub fn param_name(index: usize, feature_names: &[String]) -> String {
    let f = feature_names.len();
    if index < 4 * f {
        let field = ["w_lower", "b_lower", "w_upper", "b_upper"][index % 4];
        format!("{field}[{}]", feature_names[index / 4])
    } else {
        format!("importance_logit[{}]", feature_names[index - 4 * f])
    }
}

fn read_param(model: &LcfModel, index: usize) -> f64 {
    let f = model.n_features();
    if index < 4 * f {
        let p = &model.params[index / 4];
        [p.w_lower, p.b_lower, p.w_upper, p.b_upper][index % 4]
    } else {
        model.importance.logits()[index - 4 * f]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
        }
    }

    pub fn for_model(model: &LcfModel) -> Self {
        Self::new(5 * model.n_features())
    }
}

/// One bias-corrected Adam update of every trainable.
pub fn adam_step(
    model: &mut LcfModel,
    grads: &GradientSet,
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    let g = grads.flatten();
    if g.len() != state.m.len() || g.len() != 5 * model.n_features() {
        return Err(LcfError::Dimension(format!(
            "{} gradients, {} optimizer slots, {} features",
            g.len(),
            state.m.len(),
            model.n_features()
        )));
    }
    if let Some(k) = g.iter().position(|v| !v.is_finite()) {
        return Err(LcfError::NonFiniteGradient(param_name(
            k,
            &model.feature_names,
        )));
    }

    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let mut next = Vec::with_capacity(g.len());
    for (k, &gk) in g.iter().enumerate() {
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * gk;
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * gk * gk;
        let m_hat = state.m[k] / c1;
        let v_hat = state.v[k] / c2;
        next.push(read_param(model, k) - cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_eps));
    }
    if let Some(k) = next.iter().position(|v| !v.is_finite()) {
        return Err(LcfError::NonFiniteParameter(param_name(
            k,
            &model.feature_names,
        )));
    }

    let f = model.n_features();
    for (p, chunk) in model.params.iter_mut().zip(next.chunks_exact(4)) {
        p.w_lower = chunk[0];
        p.b_lower = chunk[1];
        p.w_upper = chunk[2];
        p.b_upper = chunk[3];
    }
    model
        .importance
        .update(|logits| logits.copy_from_slice(&next[4 * f..]));
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Event-weighted mean of the batch losses seen during the epoch.
    pub mean_loss: f64,
    /// Importance scores at the end of the epoch.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub feature_names: Vec<String>,
    pub epochs: Vec<EpochRecord>,
    /// Total optimizer steps taken.
    pub steps: u64,
}

impl TrainingHistory {
    /// CSV: `epoch,mean_loss,<score per feature>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for rec in &self.epochs {
            out.push_str(&format!("{},{:.16e}", rec.epoch, rec.mean_loss));
            for s in &rec.scores {
                out.push_str(&format!(",{s:.16e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Trains with the built-in strategies.
pub fn train(
    train_raw: &EventTable,
    cfg: &TrainConfig,
    centers_raw: &[f64],
) -> Result<(LcfModel, TrainingHistory)> {
    train_with(&StrategyRegistry::builtin(), train_raw, cfg, centers_raw)
}

/// Fits normalization on `train_raw`, initializes from `cfg.seed` and runs
/// `cfg.epochs` passes of shuffled mini-batches (the last one may be short).
pub fn train_with(
    registry: &StrategyRegistry,
    train_raw: &EventTable,
    cfg: &TrainConfig,
    centers_raw: &[f64],
) -> Result<(LcfModel, TrainingHistory)> {
    cfg.validate()?;
    let strategy = registry.create(&cfg.strategy, cfg)?;
    if train_raw.is_empty() {
        return Err(LcfError::Data("training table is empty".into()));
    }
    if train_raw.is_normalized() {
        return Err(LcfError::Data(
            "training expects raw (unnormalized) data".into(),
        ));
    }
    let f = train_raw.n_features();
    if centers_raw.len() != f {
        return Err(LcfError::Dimension(format!(
            "{} centers for {} features",
            centers_raw.len(),
            f
        )));
    }

    let stats = fit_normalizer(train_raw)?;
    let centers_norm: Vec<f64> = centers_raw
        .iter()
        .enumerate()
        .map(|(j, &c)| stats.normalize(j, c))
        .collect();
    let mut model = LcfModel::init(
        train_raw.feature_names().to_vec(),
        stats.clone(),
        &centers_norm,
        cfg.threshold,
        cfg.seed,
    )?;
    let data = apply_normalizer(train_raw, &stats)?;
    let n = data.n_events();
    let mut adam = AdamState::for_model(&model);
    let mut history = TrainingHistory {
        feature_names: model.feature_names.clone(),
        ..Default::default()
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut values = Vec::with_capacity(cfg.batch_size * f);
    let mut labels = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut substream(cfg.seed, &format!("shuffle/{epoch}")));
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            values.clear();
            labels.clear();
            for &i in chunk {
                values.extend_from_slice(data.row(i));
                labels.push(data.labels()[i]);
            }
            let (loss, grads) =
                loss_and_gradients_rows(&values, &labels, &model, strategy.as_ref())?;
            adam_step(&mut model, &grads, &mut adam, cfg)?;
            loss_sum += loss * chunk.len() as f64;
        }
        history.epochs.push(EpochRecord {
            epoch: epoch + 1,
            mean_loss: loss_sum / n as f64,
            scores: model.scores().to_vec(),
        });
    }
    history.steps = adam.step;
    Ok((model, history))
}
