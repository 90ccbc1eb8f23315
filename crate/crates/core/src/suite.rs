//! End-to-end runs: prepare data, train, extract the cut flow, evaluate.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{gen_mock, prepare, EventTable, MockId, PreparedData, DEFAULT_MOCK_EVENTS};
use crate::error::Result;
use crate::extract::{apply_report, build_report, CutFlowReport};
use crate::metrics::{table_header, MetricsReport, PhysicsConfig};
use crate::model::LcfModel;
use crate::optim::{train_with, TrainConfig, TrainingHistory};
use crate::strategy::StrategyRegistry;

/// Everything produced by one training run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dataset: String,
    pub strategy: String,
    pub model: LcfModel,
    pub history: TrainingHistory,
    pub report: CutFlowReport,
    pub metrics: MetricsReport,
    pub train_seconds: f64,
}

impl RunOutcome {
    pub fn score_of(&self, feature: &str) -> Option<f64> {
        self.report
            .features
            .iter()
            .find(|f| f.name == feature)
            .map(|f| f.importance)
    }
}

/// Trains on `data.train` and scores the extracted cut flow on `data.test`.
pub fn run_prepared(
    registry: &StrategyRegistry,
    dataset: &str,
    data: &PreparedData,
    centers_raw: &[f64],
    cfg: &TrainConfig,
    phys: &PhysicsConfig,
) -> Result<RunOutcome> {
    let start = Instant::now();
    let (model, history) = train_with(registry, &data.train, cfg, centers_raw)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let report = build_report(&model, cfg.min_importance_ratio);
    let metrics = evaluate(&report, &data.test, phys)?;
    Ok(RunOutcome {
        dataset: dataset.to_string(),
        strategy: cfg.strategy.clone(),
        model,
        history,
        report,
        metrics,
        train_seconds,
    })
}

pub fn evaluate(
    report: &CutFlowReport,
    test_raw: &EventTable,
    phys: &PhysicsConfig,
) -> Result<MetricsReport> {
    let preds = apply_report(test_raw, report)?;
    MetricsReport::from_predictions(&preds, test_raw.labels(), phys)
}

/// Settings for a sweep over the mock datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub datasets: Vec<MockId>,
    pub strategies: Vec<String>,
    pub n_events: usize,
    /// Seeds data generation and the split; training uses `train.seed`.
    pub data_seed: u64,
    /// Percentile band applied before the split; `None` (the default) keeps
    /// the full Gaussian tails.
    pub clip: Option<(f64, f64)>,
    pub train_fraction: f64,
    pub train: TrainConfig,
    pub physics: PhysicsConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            datasets: MockId::ALL.to_vec(),
            strategies: vec!["parallel".into(), "sequential".into()],
            n_events: DEFAULT_MOCK_EVENTS,
            data_seed: 0,
            clip: None,
            train_fraction: 0.5,
            train: TrainConfig::default(),
            physics: PhysicsConfig::mock(),
        }
    }
}

pub fn prepare_mock(id: MockId, cfg: &SuiteConfig) -> Result<PreparedData> {
    let table = gen_mock(id, cfg.n_events, cfg.data_seed)?;
    prepare(
        id.as_str(),
        &table,
        cfg.clip,
        cfg.train_fraction,
        cfg.data_seed,
    )
}

pub fn run_mock(
    registry: &StrategyRegistry,
    id: MockId,
    strategy: &str,
    cfg: &SuiteConfig,
) -> Result<RunOutcome> {
    let data = prepare_mock(id, cfg)?;
    let train_cfg = cfg.train.clone().with_strategy(strategy);
    run_prepared(
        registry,
        id.as_str(),
        &data,
        &id.centers(),
        &train_cfg,
        &cfg.physics,
    )
}

/// One row per (dataset, strategy) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub dataset: String,
    pub strategy: String,
    pub metrics: MetricsReport,
    pub features: Vec<String>,
    pub importance: Vec<f64>,
    pub cases: Vec<String>,
    pub train_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub rows: Vec<SuiteRow>,
}

impl SuiteSummary {
    pub fn table(&self) -> String {
        let mut out = format!("{:<8} {}", "Dataset", table_header());
        for row in &self.rows {
            let label = format!("LCF ({})", row.strategy);
            out.push_str(&format!(
                "{:<8} {}\n",
                row.dataset,
                row.metrics.table_row(&label)
            ));
        }
        out.push('\n');
        for row in &self.rows {
            let cuts: Vec<String> = row
                .features
                .iter()
                .zip(&row.importance)
                .zip(&row.cases)
                .map(|((f, s), c)| format!("{f}={s:.4}/{c}"))
                .collect();
            out.push_str(&format!(
                "{:<8} {:<11} {}\n",
                row.dataset,
                row.strategy,
                cuts.join(" ")
            ));
        }
        out
    }
}

impl From<&RunOutcome> for SuiteRow {
    fn from(run: &RunOutcome) -> Self {
        Self {
            dataset: run.dataset.clone(),
            strategy: run.strategy.clone(),
            metrics: run.metrics.clone(),
            features: run.report.feature_order.clone(),
            importance: run.report.features.iter().map(|f| f.importance).collect(),
            cases: run
                .report
                .features
                .iter()
                .map(|f| f.region.case().to_string())
                .collect(),
            train_seconds: run.train_seconds,
        }
    }
}

/// Runs every configured dataset under every configured strategy. `progress`
/// is called after each run.
pub fn run_suite(
    registry: &StrategyRegistry,
    cfg: &SuiteConfig,
    mut progress: impl FnMut(&RunOutcome),
) -> Result<SuiteSummary> {
    let mut rows = Vec::new();
    for &id in &cfg.datasets {
        let data = prepare_mock(id, cfg)?;
        for strategy in &cfg.strategies {
            let train_cfg = cfg.train.clone().with_strategy(strategy);
            let run = run_prepared(
                registry,
                id.as_str(),
                &data,
                &id.centers(),
                &train_cfg,
                &cfg.physics,
            )?;
            progress(&run);
            rows.push(SuiteRow::from(&run));
        }
    }
    Ok(SuiteSummary {
        config: cfg.clone(),
        rows,
    })
}
