//! Training strategies, registered by name.
//!
//! A strategy decides which event-feature loss terms are live on top of the
//! center masks. `parallel` keeps every term, so each cut sees the full
//! distribution of its observable. `sequential` gates feature `j` by whether
//! the event passed the cuts of the features before it, so each cut is fitted
//! on the events that survive the flow so far.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LcfError, Result};
use crate::loss::{sequential_masks, SequentialMask};
use crate::model::ForwardOutput;
use crate::optim::TrainConfig;

pub trait CutStrategy: Send + Sync {
    fn name(&self) -> &str;

    /// Gate applied to every center-masked loss term. `None` keeps all terms.
    /// Masks are constants for differentiation.
    fn flow_mask(&self, outputs: &ForwardOutput, threshold: f64) -> Option<SequentialMask>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    /// An event failing any earlier cut stays masked for all later features.
    #[default]
    Cumulative,
    /// Only the immediately preceding feature gates the next one.
    OneStep,
}

impl fmt::Display for MaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskMode::Cumulative => "cumulative",
            MaskMode::OneStep => "one_step",
        })
    }
}

impl FromStr for MaskMode {
    type Err = LcfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cumulative" => Ok(MaskMode::Cumulative),
            "one_step" | "one-step" => Ok(MaskMode::OneStep),
            _ => Err(LcfError::Config(format!(
                "unknown sequential mask mode `{s}` (expected cumulative or one_step)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl CutStrategy for Parallel {
    fn name(&self) -> &str {
        "parallel"
    }

    fn flow_mask(&self, _outputs: &ForwardOutput, _threshold: f64) -> Option<SequentialMask> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential {
    pub mode: MaskMode,
}

impl CutStrategy for Sequential {
    fn name(&self) -> &str {
        "sequential"
    }

    fn flow_mask(&self, outputs: &ForwardOutput, threshold: f64) -> Option<SequentialMask> {
        Some(sequential_masks(outputs, threshold, self.mode))
    }
}

pub type StrategyFactory = fn(&TrainConfig) -> Box<dyn CutStrategy>;

/// Name → constructor table for strategies.
#[derive(Clone)]
pub struct StrategyRegistry {
    factories: BTreeMap<String, StrategyFactory>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// Registry holding `parallel` and `sequential`.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register("parallel", |_| Box::new(Parallel));
        registry.register("sequential", |cfg| {
            Box::new(Sequential {
                mode: cfg.sequential_mask_mode,
            })
        });
        registry
    }

    /// Adds or replaces a strategy.
    pub fn register(&mut self, name: &str, factory: StrategyFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn create(&self, name: &str, cfg: &TrainConfig) -> Result<Box<dyn CutStrategy>> {
        self.factories
            .get(name)
            .map(|factory| factory(cfg))
            .ok_or_else(|| LcfError::UnknownStrategy {
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl fmt::Debug for StrategyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}
