//! Human-readable cuts from trained parameters, and inference with them.
//!
//! A side cut passes events with `σ(w·s′·x − b) > t`, i.e. `x > boundary`
//! when `w > 0` and `x < boundary` when `w < 0`, where
//! `boundary = (logit(t) + b) / (w·s′)` in normalized units. The lower and
//! upper side cuts of a feature are combined into a final region:
//!
//! | lower        | upper        | region                                  |
//! |--------------|--------------|-----------------------------------------|
//! | valid        | invalid      | the lower cut alone                     |
//! | invalid      | valid        | the upper cut alone                     |
//! | valid, +/−   | valid, same  | intersection                            |
//! | valid, +     | valid, −     | middle: `(lower, upper)`                |
//! | valid, −     | valid, +     | edge: `(−∞, lower) ∪ (upper, ∞)`         |
//! | invalid      | invalid      | union of both half-lines                |
//!
//! A side is valid when its boundary stays strictly on its own side of the
//! center. A side whose effective slope `|w·s′|` is below [`DEGENERATE_SLOPE`]
//! has no boundary; it is invalid and imposes no cut.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{percentile, EventTable};
use crate::error::{LcfError, Result};
use crate::model::{logit, LcfModel, NormalizationStats};

pub const DEGENERATE_SLOPE: f64 = 1e-12;

/// Number of histogram bins in plot exports.
pub const PLOT_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Direction {
    /// Signal above the boundary.
    Positive,
    /// Signal below the boundary.
    Negative,
}

impl Direction {
    pub fn of(w: f64) -> Self {
        if w < 0.0 {
            Direction::Negative
        } else {
            Direction::Positive
        }
    }
}

impl From<Direction> for i8 {
    fn from(d: Direction) -> i8 {
        match d {
            Direction::Positive => 1,
            Direction::Negative => -1,
        }
    }
}

impl TryFrom<i8> for Direction {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Direction::Positive),
            -1 => Ok(Direction::Negative),
            _ => Err(format!("direction must be 1 or -1, got {v}")),
        }
    }
}

/// One trained sigmoid cut expressed in raw units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideCut {
    /// `None` when the cut is degenerate (flat sigmoid).
    pub boundary: Option<f64>,
    pub direction: Direction,
    pub valid: bool,
}

impl SideCut {
    /// Pass region of this cut on its own.
    pub fn half_line(&self) -> Interval {
        match (self.boundary, self.direction) {
            (None, _) => Interval::FULL,
            (Some(b), Direction::Positive) => Interval::new(b, f64::INFINITY),
            (Some(b), Direction::Negative) => Interval::new(f64::NEG_INFINITY, b),
        }
    }

    fn valid_below(&self, center: f64) -> bool {
        self.boundary.is_some_and(|b| b < center)
    }

    fn valid_above(&self, center: f64) -> bool {
        self.boundary.is_some_and(|b| b > center)
    }
}

/// Boundary and direction of a side cut. Validity is left `false`; it depends
/// on the center and is settled by [`validate_sides`].
pub fn side_boundary(w: f64, b: f64, score: f64, t: f64, mean: f64, std: f64) -> SideCut {
    let slope = w * score;
    let boundary = if slope.abs() < DEGENERATE_SLOPE {
        None
    } else {
        let norm = (logit(t) + b) / slope;
        Some(norm * std + mean)
    };
    SideCut {
        boundary,
        direction: Direction::of(w),
        valid: false,
    }
}

/// Copies of both side cuts with their `valid` flags set.
pub fn validate_sides(lower: &SideCut, upper: &SideCut, center_raw: f64) -> (SideCut, SideCut) {
    (
        SideCut {
            valid: lower.valid_below(center_raw),
            ..*lower
        },
        SideCut {
            valid: upper.valid_above(center_raw),
            ..*upper
        },
    )
}

/// Open interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    Left,
    Right,
    Middle,
    Edge,
    PassAll,
    /// Only reachable through hand-written reports; `combine` never yields it.
    Empty,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Left => "left",
            CaseLabel::Right => "right",
            CaseLabel::Middle => "middle",
            CaseLabel::Edge => "edge",
            CaseLabel::PassAll => "pass_all",
            CaseLabel::Empty => "empty",
        })
    }
}

/// Sorted, disjoint open intervals in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RegionRepr", try_from = "RegionRepr")]
pub struct CutRegion {
    intervals: Vec<Interval>,
    case: CaseLabel,
}

impl CutRegion {
    /// Canonical region covering the union of `parts`.
    pub fn from_union(mut parts: Vec<Interval>) -> Self {
        parts.retain(|iv| iv.lo < iv.hi);
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                // Open intervals touching at a point leave that point out.
                Some(last) if iv.lo < last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        let case = label(&merged);
        Self {
            intervals: merged,
            case,
        }
    }

    pub fn pass_all() -> Self {
        Self::from_union(vec![Interval::FULL])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn case(&self) -> CaseLabel {
        self.case
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }
}

fn label(intervals: &[Interval]) -> CaseLabel {
    match intervals {
        [] => CaseLabel::Empty,
        [iv] => match (iv.lo.is_infinite(), iv.hi.is_infinite()) {
            (true, true) => CaseLabel::PassAll,
            (true, false) => CaseLabel::Left,
            (false, true) => CaseLabel::Right,
            (false, false) => CaseLabel::Middle,
        },
        _ => CaseLabel::Edge,
    }
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    intervals: Vec<[Option<f64>; 2]>,
    case: CaseLabel,
}

impl From<CutRegion> for RegionRepr {
    fn from(r: CutRegion) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        Self {
            intervals: r
                .intervals
                .iter()
                .map(|iv| [finite(iv.lo), finite(iv.hi)])
                .collect(),
            case: r.case,
        }
    }
}

impl TryFrom<RegionRepr> for CutRegion {
    type Error = String;

    fn try_from(r: RegionRepr) -> std::result::Result<Self, String> {
        let parts = r
            .intervals
            .iter()
            .map(|[lo, hi]| {
                Interval::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))
            })
            .collect();
        let region = CutRegion::from_union(parts);
        if region.case != r.case {
            return Err(format!(
                "region labelled `{}` but its intervals form `{}`",
                r.case, region.case
            ));
        }
        Ok(region)
    }
}

/// Final pass region of a feature from its two side cuts.
pub fn combine(lower: &SideCut, upper: &SideCut, center_raw: f64) -> CutRegion {
    let (lower, upper) = validate_sides(lower, upper, center_raw);
    let (a, b) = (lower.half_line(), upper.half_line());
    match (lower.valid, upper.valid) {
        (true, false) => CutRegion::from_union(vec![a]),
        (false, true) => CutRegion::from_union(vec![b]),
        (true, true) => match (lower.direction, upper.direction) {
            (Direction::Negative, Direction::Positive) => CutRegion::from_union(vec![a, b]),
            // Aligned, or the middle case: both are the intersection.
            _ => CutRegion::from_union(a.intersect(&b).into_iter().collect()),
        },
        (false, false) => CutRegion::from_union(vec![a, b]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCut {
    pub name: String,
    /// Raw units.
    pub center: f64,
    pub lower: SideCut,
    pub upper: SideCut,
    pub region: CutRegion,
    pub importance: f64,
    pub retained: bool,
}

/// Everything needed to read, audit and apply a trained cut flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutFlowReport {
    pub threshold: f64,
    pub min_importance_ratio: f64,
    pub feature_order: Vec<String>,
    pub normalization: NormalizationStats,
    pub features: Vec<FeatureCut>,
}

impl CutFlowReport {
    /// Score a feature needs to be retained: `ratio / F`.
    pub fn importance_floor(&self) -> f64 {
        self.min_importance_ratio / self.features.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn build_report(model: &LcfModel, min_importance_ratio: f64) -> CutFlowReport {
    let f = model.n_features();
    let scores = model.scores();
    let floor = min_importance_ratio / f as f64;
    let features = (0..f)
        .map(|j| {
            let p = &model.params[j];
            let (mean, std) = (model.norm.mean[j], model.norm.std[j]);
            let center = model.center_raw(j);
            let lower = side_boundary(p.w_lower, p.b_lower, scores[j], model.threshold, mean, std);
            let upper = side_boundary(p.w_upper, p.b_upper, scores[j], model.threshold, mean, std);
            let region = combine(&lower, &upper, center);
            let (lower, upper) = validate_sides(&lower, &upper, center);
            FeatureCut {
                name: model.feature_names[j].clone(),
                center,
                lower,
                upper,
                region,
                importance: scores[j],
                retained: scores[j] >= floor,
            }
        })
        .collect();
    CutFlowReport {
        threshold: model.threshold,
        min_importance_ratio,
        feature_order: model.feature_names.clone(),
        normalization: model.norm.clone(),
        features,
    }
}

/// 1 when the event lies inside the region of every retained feature.
pub fn apply_report(events_raw: &EventTable, report: &CutFlowReport) -> Result<Vec<u8>> {
    events_raw.check_columns(&report.feature_order)?;
    if events_raw.is_normalized() {
        return Err(LcfError::Data("cut regions apply to raw values".into()));
    }
    let retained: Vec<(usize, &CutRegion)> = report
        .features
        .iter()
        .enumerate()
        .filter(|(_, fc)| fc.retained)
        .map(|(j, fc)| (j, &fc.region))
        .collect();
    Ok((0..events_raw.n_events())
        .map(|i| {
            let row = events_raw.row(i);
            u8::from(retained.iter().all(|&(j, region)| region.contains(row[j])))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub signal: u64,
    pub background: u64,
}

/// Histogram of one feature with its cut region, ready for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub feature: String,
    pub bins: Vec<HistBin>,
    pub region: CutRegion,
}

impl PlotData {
    /// Rows `kind,low,high,signal,background`; `kind` is `bin` or `region`,
    /// region rows leave the counts empty and write infinite ends as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,low,high,signal,background\n");
        for b in &self.bins {
            out.push_str(&format!(
                "bin,{:.16e},{:.16e},{},{}\n",
                b.lo, b.hi, b.signal, b.background
            ));
        }
        for iv in self.region.intervals() {
            out.push_str(&format!("region,{},{},,\n", fmt_end(iv.lo), fmt_end(iv.hi)));
        }
        out
    }
}

fn fmt_end(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Per-feature signal/background histograms over the 5th–95th percentile
/// range of `events_raw`, with `PLOT_BINS` equal-width bins.
pub fn plot_data(events_raw: &EventTable, report: &CutFlowReport) -> Result<Vec<PlotData>> {
    events_raw.check_columns(&report.feature_order)?;
    if events_raw.is_empty() {
        return Err(LcfError::Data("no events to histogram".into()));
    }
    Ok(report
        .features
        .iter()
        .enumerate()
        .map(|(j, fc)| {
            let col = events_raw.column(j);
            let mut sorted = col.clone();
            sorted.sort_by(f64::total_cmp);
            let (lo, hi) = (percentile(&sorted, 5.0), percentile(&sorted, 95.0));
            let width = (hi - lo) / PLOT_BINS as f64;
            let mut bins: Vec<HistBin> = (0..PLOT_BINS)
                .map(|k| HistBin {
                    lo: lo + width * k as f64,
                    hi: if k + 1 == PLOT_BINS {
                        hi
                    } else {
                        lo + width * (k + 1) as f64
                    },
                    signal: 0,
                    background: 0,
                })
                .collect();
            if width > 0.0 {
                for (&x, &y) in col.iter().zip(events_raw.labels()) {
                    if x < lo || x > hi {
                        continue;
                    }
                    let k = (((x - lo) / width) as usize).min(PLOT_BINS - 1);
                    if y == 1 {
                        bins[k].signal += 1;
                    } else {
                        bins[k].background += 1;
                    }
                }
            }
            PlotData {
                feature: fc.name.clone(),
                bins,
                region: fc.region.clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sigmoid, FeatureCutParams, ImportanceVector};
    use proptest::prelude::*;

    fn side(boundary: f64, direction: Direction) -> SideCut {
        SideCut {
            boundary: Some(boundary),
            direction,
            valid: false,
        }
    }

    #[test]
    fn side_boundary_examples() {
        let s = side_boundary(1.0, 0.0, 1.0, 0.5, 0.0, 1.0);
        assert_eq!((s.boundary, s.direction), (Some(0.0), Direction::Positive));
        let s = side_boundary(-2.0, 0.0, 1.0, 0.5, 5.0, 2.0);
        assert_eq!((s.boundary, s.direction), (Some(5.0), Direction::Negative));
        let s = side_boundary(1.5, 0.3, 0.5, 0.5, 0.0, 1.0);
        let b = s.boundary.unwrap();
        assert!((b - 0.4).abs() < 1e-15);
        assert!((sigmoid(1.5 * 0.5 * b - 0.3) - 0.5).abs() < 1e-15);
        let s = side_boundary(1e-13, 0.0, 0.5, 0.5, 0.0, 1.0);
        assert_eq!(s.boundary, None);
    }

    #[test]
    fn combine_examples() {
        let r = combine(
            &side(-1.0, Direction::Positive),
            &side(1.0, Direction::Negative),
            0.0,
        );
        assert_eq!(r.case(), CaseLabel::Middle);
        assert_eq!(r.intervals(), [Interval::new(-1.0, 1.0)]);

        let r = combine(
            &side(3.0, Direction::Positive),
            &side(2.0, Direction::Positive),
            0.0,
        );
        assert_eq!(r.case(), CaseLabel::Right);
        assert_eq!(r.intervals(), [Interval::new(2.0, f64::INFINITY)]);

        let r = combine(
            &side(3.0, Direction::Negative),
            &side(-3.0, Direction::Positive),
            0.0,
        );
        assert_eq!(r.case(), CaseLabel::PassAll);
    }

    #[test]
    fn degenerate_sides_impose_no_cut() {
        let flat = SideCut {
            boundary: None,
            direction: Direction::Positive,
            valid: false,
        };
        assert_eq!(combine(&flat, &flat, 0.0).case(), CaseLabel::PassAll);
        let r = combine(&flat, &side(1.0, Direction::Negative), 0.0);
        assert_eq!(r.case(), CaseLabel::Left);
        // Invalid non-degenerate + degenerate → union covers everything.
        assert_eq!(
            combine(&side(1.0, Direction::Positive), &flat, 0.0).case(),
            CaseLabel::PassAll
        );
    }

    #[test]
    fn boundary_at_center_is_invalid() {
        let (l, u) = validate_sides(
            &side(0.0, Direction::Positive),
            &side(0.0, Direction::Negative),
            0.0,
        );
        assert!(!l.valid && !u.valid);
    }

    /// Membership straight from the rule table, evaluated point by point.
    fn rule_oracle(lower: &SideCut, upper: &SideCut, center: f64, x: f64) -> bool {
        let passes = |s: &SideCut| match s.direction {
            Direction::Positive => x > s.boundary.unwrap(),
            Direction::Negative => x < s.boundary.unwrap(),
        };
        let lv = lower.boundary.unwrap() < center;
        let uv = upper.boundary.unwrap() > center;
        match (lv, uv) {
            (true, false) => passes(lower),
            (false, true) => passes(upper),
            (true, true) => {
                if lower.direction == Direction::Negative && upper.direction == Direction::Positive
                {
                    passes(lower) || passes(upper)
                } else {
                    passes(lower) && passes(upper)
                }
            }
            (false, false) => passes(lower) || passes(upper),
        }
    }

    #[test]
    fn rule_table_all_sixteen_cases() {
        let dirs = [Direction::Positive, Direction::Negative];
        let mut seen = 0;
        for lv in [true, false] {
            for uv in [true, false] {
                for ld in dirs {
                    for ud in dirs {
                        let lower = side(if lv { -1.5 } else { 2.5 }, ld);
                        let upper = side(if uv { 1.5 } else { -2.5 }, ud);
                        let region = combine(&lower, &upper, 0.0);
                        for k in 0..=2000 {
                            let x = -10.0 + 0.01 * k as f64;
                            assert_eq!(
                                region.contains(x),
                                rule_oracle(&lower, &upper, 0.0, x),
                                "lv={lv} uv={uv} ld={ld:?} ud={ud:?} x={x}"
                            );
                        }
                        seen += 1;
                    }
                }
            }
        }
        assert_eq!(seen, 16);
    }

    #[test]
    fn union_merges_overlaps_only() {
        let r = CutRegion::from_union(vec![Interval::new(2.0, 5.0), Interval::new(-1.0, 3.0)]);
        assert_eq!(r.intervals(), [Interval::new(-1.0, 5.0)]);
        let r = CutRegion::from_union(vec![Interval::new(0.0, 1.0), Interval::new(1.0, 2.0)]);
        assert_eq!(r.intervals().len(), 2);
        assert!(!r.contains(1.0));
    }

    #[test]
    fn region_json_uses_null_for_infinity() {
        let r = CutRegion::from_union(vec![
            Interval::new(f64::NEG_INFINITY, -1.0),
            Interval::new(2.0, f64::INFINITY),
        ]);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"intervals":[[null,-1.0],[2.0,null]],"case":"edge"}"#
        );
        let back: CutRegion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(
            serde_json::from_str::<CutRegion>(r#"{"intervals":[[null,null]],"case":"left"}"#)
                .is_err()
        );
    }

    fn report_with(regions: Vec<(CutRegion, bool)>) -> CutFlowReport {
        let f = regions.len();
        let features = regions
            .into_iter()
            .enumerate()
            .map(|(j, (region, retained))| FeatureCut {
                name: format!("x{j}"),
                center: 0.0,
                lower: side(-1.0, Direction::Positive),
                upper: side(1.0, Direction::Negative),
                region,
                importance: 1.0 / f as f64,
                retained,
            })
            .collect();
        CutFlowReport {
            threshold: 0.5,
            min_importance_ratio: 0.05,
            feature_order: (0..f).map(|j| format!("x{j}")).collect(),
            normalization: NormalizationStats::identity(f),
            features,
        }
    }

    fn events(values: Vec<f64>, f: usize) -> EventTable {
        let n = values.len() / f;
        EventTable::new(
            (0..f).map(|j| format!("x{j}")).collect(),
            values,
            vec![0; n],
        )
        .unwrap()
    }

    #[test]
    fn apply_report_examples() {
        let rep = report_with(vec![
            (CutRegion::pass_all(), true),
            (CutRegion::pass_all(), true),
        ]);
        assert_eq!(
            apply_report(&events(vec![1.0, -4.0, 9.0, 0.0], 2), &rep).unwrap(),
            vec![1, 1]
        );

        let right = CutRegion::from_union(vec![Interval::new(2.0, f64::INFINITY)]);
        let rep = report_with(vec![(right.clone(), true)]);
        assert_eq!(
            apply_report(&events(vec![1.9, 2.1], 1), &rep).unwrap(),
            vec![0, 1]
        );

        // Dropped features are skipped.
        let rep = report_with(vec![(right, false)]);
        assert_eq!(apply_report(&events(vec![1.9], 1), &rep).unwrap(), vec![1]);

        assert!(apply_report(&events(vec![1.0, 2.0], 2), &rep).is_err());
    }

    #[test]
    fn retention_floor() {
        let mut m = LcfModel::init(
            vec!["a".into(), "b".into(), "c".into()],
            NormalizationStats::identity(3),
            &[0.0; 3],
            0.5,
            0,
        )
        .unwrap();
        let scores = [0.98f64, 0.012, 0.008];
        m.importance = ImportanceVector::from_logits(scores.iter().map(|s| s.ln()).collect());
        let rep = build_report(&m, 0.05);
        let kept: Vec<bool> = rep.features.iter().map(|f| f.retained).collect();
        assert_eq!(kept, [true, false, false]);
        assert!((rep.importance_floor() - 0.05 / 3.0).abs() < 1e-15);

        let m4 = LcfModel::init(
            (0..4).map(|j| format!("f{j}")).collect(),
            NormalizationStats::identity(4),
            &[0.0; 4],
            0.5,
            0,
        )
        .unwrap();
        assert!(build_report(&m4, 0.05).features.iter().all(|f| f.retained));
    }

    #[test]
    fn plot_data_counts_every_in_range_event() {
        let values: Vec<f64> = (0..1000).map(|k| k as f64 / 10.0).collect();
        let labels = (0..1000).map(|k| (k % 2) as u8).collect();
        let t = EventTable::new(vec!["x0".into()], values, labels).unwrap();
        let rep = report_with(vec![(CutRegion::pass_all(), true)]);
        let plots = plot_data(&t, &rep).unwrap();
        let bins = &plots[0].bins;
        assert_eq!(bins.len(), PLOT_BINS);
        let total: u64 = bins.iter().map(|b| b.signal + b.background).sum();
        let in_range = t
            .column(0)
            .iter()
            .filter(|&&x| x >= bins[0].lo && x <= bins[49].hi)
            .count();
        assert_eq!(total as usize, in_range);
        let csv = plots[0].to_csv();
        assert!(csv.ends_with("region,-inf,inf,,\n"));
    }

    proptest! {
        #[test]
        fn boundary_round_trips_through_sigmoid(
            w in -20.0f64..20.0, b in -5.0f64..5.0, score in 0.01f64..1.0,
            t in 0.05f64..0.95, mean in -50.0f64..50.0, std in 0.1f64..10.0,
        ) {
            prop_assume!((w * score).abs() > 1e-3);
            let cut = side_boundary(w, b, score, t, mean, std);
            let norm = (cut.boundary.unwrap() - mean) / std;
            prop_assert!((sigmoid(w * score * norm - b) - t).abs() < 1e-9);
        }

        #[test]
        fn higher_threshold_tightens(w in -20.0f64..20.0, b in -5.0f64..5.0, t in 0.05f64..0.9, dt in 0.01f64..0.09) {
            prop_assume!(w.abs() > 1e-3);
            let lo = side_boundary(w, b, 0.5, t, 0.0, 1.0).boundary.unwrap();
            let hi = side_boundary(w, b, 0.5, t + dt, 0.0, 1.0).boundary.unwrap();
            if w > 0.0 { prop_assert!(hi > lo) } else { prop_assert!(hi < lo) }
        }

        #[test]
        fn apply_matches_membership_oracle(
            seeds in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0, any::<bool>(), any::<bool>(), any::<bool>()), 3),
            xs in proptest::collection::vec(-8.0f64..8.0, 300),
        ) {
            let regions: Vec<(CutRegion, bool)> = seeds.iter().map(|&(l, u, ld, ud, keep)| {
                let dir = |p: bool| if p { Direction::Positive } else { Direction::Negative };
                (combine(&side(l, dir(ld)), &side(u, dir(ud)), 0.0), keep)
            }).collect();
            let rep = report_with(regions.clone());
            let t = events(xs.clone(), 3);
            let preds = apply_report(&t, &rep).unwrap();
            for (i, row) in xs.chunks(3).enumerate() {
                let mut pass = true;
                for (j, (region, keep)) in regions.iter().enumerate() {
                    if !keep { continue; }
                    let inside = region.intervals().iter().any(|iv| iv.lo < row[j] && row[j] < iv.hi);
                    pass &= inside;
                }
                prop_assert_eq!(preds[i], u8::from(pass));
            }
        }

        #[test]
        fn enlarging_a_region_never_drops_events(
            a in -5.0f64..0.0, b in 0.0f64..5.0, grow in 0.0f64..3.0,
            xs in proptest::collection::vec(-8.0f64..8.0, 100),
        ) {
            let small = CutRegion::from_union(vec![Interval::new(a, b)]);
            let big = CutRegion::from_union(vec![Interval::new(a - grow, b + grow)]);
            let t = events(xs, 1);
            let p_small = apply_report(&t, &report_with(vec![(small, true)])).unwrap();
            let p_big = apply_report(&t, &report_with(vec![(big, true)])).unwrap();
            for (s, g) in p_small.iter().zip(&p_big) {
                prop_assert!(g >= s);
            }
        }
    }

    #[test]
    fn report_round_trips_through_json() {
        let mut m = LcfModel::init(
            vec!["a".into(), "b".into()],
            NormalizationStats {
                mean: vec![1.0, -2.0],
                std: vec![2.0, 0.5],
            },
            &[0.0, 0.3],
            0.5,
            9,
        )
        .unwrap();
        m.params[1] = FeatureCutParams {
            w_lower: 0.0,
            b_lower: 0.1,
            w_upper: 3.0,
            b_upper: 1.0,
            center_norm: 0.3,
        };
        let rep = build_report(&m, 0.05);
        assert_eq!(rep.features[1].lower.boundary, None);
        let back = CutFlowReport::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
        let sum: f64 = rep.features.iter().map(|f| f.importance).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
