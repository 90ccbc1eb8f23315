//! Event tables, synthetic mock datasets, CSV ingestion and the preprocessing
//! pipeline (percentile clipping, stratified split, normalization).

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{LcfError, Result};
use crate::model::NormalizationStats;
use crate::rng::substream;

/// Features with a standard deviation below this cannot carry a cut.
pub const MIN_STD: f64 = 1e-12;

/// Column name used for the class label in CSV files.
pub const LABEL_COLUMN: &str = "label";
/// Default percentile band for clipping.
pub const DEFAULT_CLIP: (f64, f64) = (5.0, 95.0);

/// N×F matrix of observables (row-major) with binary labels, 1 = signal.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    values: Vec<f64>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    normalization: Option<NormalizationStats>,
}

impl EventTable {
    pub fn new(feature_names: Vec<String>, values: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let n_features = feature_names.len();
        if n_features == 0 {
            return Err(LcfError::Dimension(
                "a table needs at least one feature".into(),
            ));
        }
        if values.len() != labels.len() * n_features {
            return Err(LcfError::Dimension(format!(
                "{} values for {} events × {} features",
                values.len(),
                labels.len(),
                n_features
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(LcfError::Data(format!("duplicate feature name `{name}`")));
            }
        }
        if let Some(row) = labels.iter().position(|&y| y > 1) {
            return Err(LcfError::NonBinaryLabel {
                row,
                value: labels[row].to_string(),
            });
        }
        Ok(Self {
            values,
            labels,
            feature_names,
            normalization: None,
        })
    }

    pub fn n_events(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let f = self.n_features();
        &self.values[i * f..(i + 1) * f]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_features() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_events()).map(|i| self.value(i, j)).collect()
    }

    pub fn n_signal(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn n_background(&self) -> usize {
        self.n_events() - self.n_signal()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization.is_some()
    }

    /// The statistics this table was normalized with, if any.
    pub fn normalization(&self) -> Option<&NormalizationStats> {
        self.normalization.as_ref()
    }

    /// New table holding the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let f = self.n_features();
        let mut values = Vec::with_capacity(rows.len() * f);
        let mut labels = Vec::with_capacity(rows.len());
        for &i in rows {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self {
            values,
            labels,
            feature_names: self.feature_names.clone(),
            normalization: self.normalization.clone(),
        }
    }

    /// New table with columns picked by name, in the given order.
    pub fn select_columns(&self, names: &[&str]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|name| {
                self.feature_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| LcfError::Data(format!("no column named `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(self.n_events() * idx.len());
        for i in 0..self.n_events() {
            let row = self.row(i);
            values.extend(idx.iter().map(|&j| row[j]));
        }
        let names = names.iter().map(|s| s.to_string()).collect();
        let mut out = Self::new(names, values, self.labels.clone())?;
        out.normalization = self.normalization.as_ref().map(|s| s.select(&idx));
        Ok(out)
    }

    /// Fails unless `names` matches this table's columns exactly, in order.
    pub fn check_columns(&self, names: &[String]) -> Result<()> {
        if self.feature_names != names {
            return Err(LcfError::Dimension(format!(
                "columns [{}] do not match expected [{}]",
                self.feature_names.join(", "),
                names.join(", ")
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Mock datasets

/// Standard deviation of every Gaussian component in the mock feature table.
pub const MOCK_STD: f64 = 2.0;
/// Standard deviation of the additive noise on the correlated features.
pub const NOISE_STD: f64 = 1.0;
pub const DEFAULT_MOCK_EVENTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockId {
    Mock1,
    Mock2,
    Mock3,
    Mock4,
    Mock5,
    Mock6,
}

impl MockId {
    pub const ALL: [MockId; 6] = [
        MockId::Mock1,
        MockId::Mock2,
        MockId::Mock3,
        MockId::Mock4,
        MockId::Mock5,
        MockId::Mock6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MockId::Mock1 => "mock1",
            MockId::Mock2 => "mock2",
            MockId::Mock3 => "mock3",
            MockId::Mock4 => "mock4",
            MockId::Mock5 => "mock5",
            MockId::Mock6 => "mock6",
        }
    }

    /// Column order of the dataset.
    pub fn features(self) -> &'static [&'static str] {
        match self {
            MockId::Mock1 => &["x1", "x2", "x3", "x4"],
            MockId::Mock2 => &["x1", "x5", "x6"],
            MockId::Mock3 => &["x1", "x7", "x8"],
            MockId::Mock4 => &["x1", "x9", "x10"],
            MockId::Mock5 => &["x1", "x2", "x3", "x4", "x5", "x7", "x9"],
            MockId::Mock6 => &["x1", "x2", "x7", "x3", "x5", "x4", "x9"],
        }
    }

    pub fn centers(self) -> Vec<f64> {
        self.features()
            .iter()
            .map(|name| mock_center(name).expect("every mock feature has a center"))
            .collect()
    }
}

impl fmt::Display for MockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MockId {
    type Err = LcfError;

    fn from_str(s: &str) -> Result<Self> {
        MockId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| LcfError::UnknownDataset(s.to_string()))
    }
}

/// How one class of one mock feature is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureGenerator {
    /// N(mean, MOCK_STD²).
    Normal { mean: f64 },
    /// Equal-weight mixture of N(a, MOCK_STD²) and N(b, MOCK_STD²).
    Mixture { a: f64, b: f64 },
    /// coef · x1 of the same event + N(0, NOISE_STD²).
    Correlated { coef: f64 },
}

/// Generator for `feature` in the given class (1 = signal).
pub fn feature_generator(feature: &str, label: u8) -> Option<FeatureGenerator> {
    use FeatureGenerator::*;
    let signal = label == 1;
    let gen = match feature {
        "x1" => Normal {
            mean: if signal { -2.0 } else { 2.0 },
        },
        "x2" => Normal {
            mean: if signal { 2.0 } else { -2.0 },
        },
        "x3" if signal => Normal { mean: 0.0 },
        "x3" => Mixture { a: 5.0, b: -5.0 },
        "x4" if signal => Mixture { a: 5.0, b: -5.0 },
        "x4" => Normal { mean: 0.0 },
        "x5" => Normal {
            mean: if signal { -1.0 } else { 1.0 },
        },
        "x6" => Normal {
            mean: if signal { -3.0 } else { 3.0 },
        },
        "x7" => Normal { mean: -5.0 },
        "x8" => Normal { mean: 5.0 },
        "x9" => Correlated { coef: 0.9 },
        "x10" => Correlated { coef: 0.7 },
        _ => return None,
    };
    Some(gen)
}

/// Default cut center of a mock feature, in raw units.
pub fn mock_center(feature: &str) -> Option<f64> {
    let c = match feature {
        "x1" => -2.0,
        "x2" => 2.0,
        "x3" => 0.0,
        "x4" => 0.0,
        "x5" => -1.0,
        "x6" => -3.0,
        "x7" => -5.0,
        "x8" => 5.0,
        "x9" => -1.8,
        "x10" => -1.4,
        _ => return None,
    };
    Some(c)
}

/// Diboson observables and their default centers.
pub const DIBOSON_CENTERS: [(&str, f64); 6] = [
    ("M_jet", 80.0),
    ("C2_beta1", 0.15),
    ("C2_beta2", 0.025),
    ("D2_beta1", 2.0),
    ("D2_beta2", 2.0),
    ("tau21_beta1", 0.3),
];

/// Built-in center for a known feature name (mock or diboson).
pub fn default_center(feature: &str) -> Option<f64> {
    mock_center(feature).or_else(|| {
        DIBOSON_CENTERS
            .iter()
            .find(|(name, _)| *name == feature)
            .map(|&(_, c)| c)
    })
}

fn class_key(label: u8) -> &'static str {
    if label == 1 {
        "signal"
    } else {
        "background"
    }
}

/// Draws `n` samples of one feature for one class. `x1` supplies the base
/// column for the correlated features.
fn sample_feature(feature: &str, label: u8, n: usize, seed: u64, x1: &[f64]) -> Vec<f64> {
    let gen = feature_generator(feature, label).expect("known mock feature");
    let mut rng = substream(seed, &format!("mock/{feature}/{}", class_key(label)));
    let wide = Normal::new(0.0, MOCK_STD).expect("valid std");
    let noise = Normal::new(0.0, NOISE_STD).expect("valid std");
    match gen {
        FeatureGenerator::Normal { mean } => (0..n).map(|_| mean + wide.sample(&mut rng)).collect(),
        FeatureGenerator::Mixture { a, b } => (0..n)
            .map(|_| {
                let mean = if rng.gen_bool(0.5) { a } else { b };
                mean + wide.sample(&mut rng)
            })
            .collect(),
        FeatureGenerator::Correlated { coef } => x1
            .iter()
            .map(|&base| coef * base + noise.sample(&mut rng))
            .collect(),
    }
}

/// Generates a balanced mock dataset in raw units.
///
/// Samples are keyed by `(seed, feature, class)`, so two datasets sharing a
/// feature share its samples; Mock6 is Mock5 with permuted columns.
pub fn gen_mock(id: MockId, n_events: usize, seed: u64) -> Result<EventTable> {
    if n_events == 0 || !n_events.is_multiple_of(2) {
        return Err(LcfError::Config(format!(
            "n_events must be a positive even number, got {n_events}"
        )));
    }
    let half = n_events / 2;
    let features = id.features();
    let f = features.len();
    let mut values = vec![0.0; n_events * f];
    let mut labels = Vec::with_capacity(n_events);
    for (block, label) in [1u8, 0u8].into_iter().enumerate() {
        let x1 = sample_feature("x1", label, half, seed, &[]);
        for (j, name) in features.iter().enumerate() {
            let column = if *name == "x1" {
                x1.clone()
            } else {
                sample_feature(name, label, half, seed, &x1)
            };
            for (k, v) in column.into_iter().enumerate() {
                values[(block * half + k) * f + j] = v;
            }
        }
        labels.extend(std::iter::repeat_n(label, half));
    }
    let table = EventTable::new(
        features.iter().map(|s| s.to_string()).collect(),
        values,
        labels,
    )?;
    let mut order: Vec<usize> = (0..n_events).collect();
    order.shuffle(&mut substream(seed, "mock/rows"));
    Ok(table.select_rows(&order))
}

// ---------------------------------------------------------------------------
// CSV

/// Reads a CSV with a header row; every column but `label_column` becomes a
/// feature, in file order.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<EventTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| LcfError::Data(format!("no label column `{label_column}` in header")))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(LcfError::InvalidCell {
                row,
                column: String::new(),
                reason: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        for (k, cell) in record.iter().enumerate() {
            if k == label_idx {
                labels.push(parse_label(cell, row)?);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| LcfError::InvalidCell {
                row,
                column: headers[k].to_string(),
                reason: if cell.is_empty() {
                    "missing value".into()
                } else {
                    format!("cannot parse `{cell}` as a number")
                },
            })?;
            if !v.is_finite() {
                return Err(LcfError::InvalidCell {
                    row,
                    column: headers[k].to_string(),
                    reason: format!("non-finite value `{cell}`"),
                });
            }
            values.push(v);
        }
    }
    EventTable::new(feature_names, values, labels)
}

fn parse_label(cell: &str, row: usize) -> Result<u8> {
    match cell.parse::<f64>() {
        Ok(v) if v == 0.0 => Ok(0),
        Ok(v) if v == 1.0 => Ok(1),
        _ => Err(LcfError::NonBinaryLabel {
            row,
            value: cell.to_string(),
        }),
    }
}

/// Writes feature columns then `label`; floats carry 17 significant digits.
pub fn write_csv(table: &EventTable, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<&str> = table.feature_names().iter().map(String::as_str).collect();
    header.push(LABEL_COLUMN);
    writer.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..table.n_events() {
        record.clear();
        record.extend(table.row(i).iter().map(|v| format!("{v:.16e}")));
        record.push(table.labels()[i].to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Preprocessing

/// Percentile of sorted data, linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let pos = (pct / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Per-feature `[p_lo, p_hi]` bounds over all events of the table.
pub fn percentile_bounds(table: &EventTable, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    if table.is_empty() {
        return Err(LcfError::Data(
            "cannot compute percentiles of an empty table".into(),
        ));
    }
    if !(0.0..=100.0).contains(&lo) || !(0.0..=100.0).contains(&hi) || lo >= hi {
        return Err(LcfError::Config(format!(
            "invalid percentile band [{lo}, {hi}]"
        )));
    }
    Ok((0..table.n_features())
        .map(|j| {
            let mut col = table.column(j);
            col.sort_by(f64::total_cmp);
            (percentile(&col, lo), percentile(&col, hi))
        })
        .collect())
}

/// Drops every event with any feature outside its `[p_lo, p_hi]` band.
pub fn percentile_clip(table: &EventTable, lo: f64, hi: f64) -> Result<EventTable> {
    let bounds = percentile_bounds(table, lo, hi)?;
    clip_to_bounds(table, &bounds)
}

pub fn clip_to_bounds(table: &EventTable, bounds: &[(f64, f64)]) -> Result<EventTable> {
    let keep: Vec<usize> = (0..table.n_events())
        .filter(|&i| {
            table
                .row(i)
                .iter()
                .zip(bounds)
                .all(|(&v, &(lo, hi))| v >= lo && v <= hi)
        })
        .collect();
    if keep.is_empty() {
        return Err(LcfError::Data(
            "percentile clipping removed every event".into(),
        ));
    }
    Ok(table.select_rows(&keep))
}

/// Stratified seeded split; each class contributes `round(fraction · n_class)`
/// events to the training side.
pub fn split(
    table: &EventTable,
    train_fraction: f64,
    seed: u64,
) -> Result<(EventTable, EventTable)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(LcfError::Config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = substream(seed, "split");
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in [1u8, 0u8] {
        let mut idx: Vec<usize> = (0..table.n_events())
            .filter(|&i| table.labels()[i] == label)
            .collect();
        idx.shuffle(&mut rng);
        let n_train = (train_fraction * idx.len() as f64).round() as usize;
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((table.select_rows(&train), table.select_rows(&test)))
}

/// Per-feature mean and population standard deviation of a raw table.
pub fn fit_normalizer(train: &EventTable) -> Result<NormalizationStats> {
    if train.is_normalized() {
        return Err(LcfError::Data(
            "normalizer must be fitted on raw data".into(),
        ));
    }
    if train.is_empty() {
        return Err(LcfError::Data(
            "cannot fit a normalizer on an empty table".into(),
        ));
    }
    let n = train.n_events() as f64;
    let f = train.n_features();
    let mut mean = vec![0.0; f];
    for i in 0..train.n_events() {
        for (m, v) in mean.iter_mut().zip(train.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; f];
    for i in 0..train.n_events() {
        for ((s, v), m) in var.iter_mut().zip(train.row(i)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std: Vec<f64> = var.into_iter().map(|s| (s / n).sqrt()).collect();
    for (name, &s) in train.feature_names().iter().zip(&std) {
        if !(s >= MIN_STD) {
            return Err(LcfError::ConstantFeature {
                name: name.clone(),
                std: s,
                min: MIN_STD,
            });
        }
    }
    Ok(NormalizationStats { mean, std })
}

/// Maps raw values to `(x − mean) / std` and records the stats used.
pub fn apply_normalizer(table: &EventTable, stats: &NormalizationStats) -> Result<EventTable> {
    if table.is_normalized() {
        return Err(LcfError::Data("table is already normalized".into()));
    }
    if stats.mean.len() != table.n_features() || stats.std.len() != table.n_features() {
        return Err(LcfError::Dimension(format!(
            "normalizer has {} features, table has {}",
            stats.mean.len(),
            table.n_features()
        )));
    }
    let f = table.n_features();
    let values = table
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| stats.normalize(k % f, v))
        .collect();
    Ok(EventTable {
        values,
        labels: table.labels.clone(),
        feature_names: table.feature_names.clone(),
        normalization: Some(stats.clone()),
    })
}

/// Provenance record written next to generated or prepared datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset: String,
    pub seed: u64,
    pub n_events: usize,
    pub features: Vec<String>,
    pub clip: Option<ClipRecord>,
    pub train_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub lower_percentile: f64,
    pub upper_percentile: f64,
    /// Always "combined-before-split": bounds come from both classes of the
    /// full table, before the train/test split.
    pub stage: String,
    pub bounds: Vec<(f64, f64)>,
    pub n_retained: usize,
}

/// Output of the clip-then-split pipeline.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: EventTable,
    pub test: EventTable,
    pub manifest: DatasetManifest,
}

/// Optional percentile clipping followed by a stratified split.
pub fn prepare(
    dataset: &str,
    table: &EventTable,
    clip: Option<(f64, f64)>,
    train_fraction: f64,
    seed: u64,
) -> Result<PreparedData> {
    let (clipped, clip_record) = match clip {
        Some((lo, hi)) => {
            let bounds = percentile_bounds(table, lo, hi)?;
            let clipped = clip_to_bounds(table, &bounds)?;
            let record = ClipRecord {
                lower_percentile: lo,
                upper_percentile: hi,
                stage: "combined-before-split".into(),
                bounds,
                n_retained: clipped.n_events(),
            };
            (clipped, Some(record))
        }
        None => (table.clone(), None),
    };
    let (train, test) = split(&clipped, train_fraction, seed)?;
    let manifest = DatasetManifest {
        dataset: dataset.to_string(),
        seed,
        n_events: table.n_events(),
        features: table.feature_names().to_vec(),
        clip: clip_record,
        train_fraction,
        n_train: train.n_events(),
        n_test: test.n_events(),
    };
    Ok(PreparedData {
        train,
        test,
        manifest,
    })
}
