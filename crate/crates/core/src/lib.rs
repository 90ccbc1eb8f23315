//! Learnable cut flow: cut-based event selection where every cut is a
//! trainable sigmoid and every observable carries a learnable softmax
//! importance.
//!
//! The pipeline is: generate or load an [`EventTable`], clip and split it
//! ([`data`]), train a [`LcfModel`] under a named strategy ([`optim`],
//! [`strategy`]), turn the trained parameters into readable cut regions
//! ([`extract`]) and score them ([`metrics`]).

pub mod cli;
pub mod data;
pub mod error;
pub mod extract;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod rng;
pub mod strategy;
pub mod suite;

pub use data::{EventTable, MockId};
pub use error::{LcfError, Result};
pub use extract::{apply_report, build_report, CutFlowReport};
pub use metrics::{MetricsReport, PhysicsConfig};
pub use model::LcfModel;
pub use optim::{train, TrainConfig, TrainingHistory};
pub use strategy::{CutStrategy, StrategyRegistry};
