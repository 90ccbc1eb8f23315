//! Classification counts and the S/√B significance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LcfError, Result};

/// Femtobarns per picobarn.
pub const FB_PER_PB: f64 = 1000.0;

/// Cross sections (pb) and integrated luminosity (fb⁻¹).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConfig {
    pub sigma_signal: f64,
    pub sigma_background: f64,
    pub luminosity: f64,
}

impl PhysicsConfig {
    /// Rare 1 pb signal against a 10⁶ pb background at 3000 fb⁻¹.
    pub fn mock() -> Self {
        Self {
            sigma_signal: 1.0,
            sigma_background: 1.0e6,
            luminosity: 3000.0,
        }
    }

    /// Diboson (WW → qqqq) against QCD dijets at 3000 fb⁻¹.
    pub fn diboson() -> Self {
        Self {
            sigma_signal: 0.7644,
            sigma_background: 1.806e5,
            luminosity: 3000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.sigma_signal) && ok(self.sigma_background) && ok(self.luminosity) {
            Ok(())
        } else {
            Err(LcfError::Config(format!(
                "cross sections and luminosity must be positive: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

pub fn confusion(preds: &[u8], labels: &[u8]) -> Result<Confusion> {
    if preds.len() != labels.len() {
        return Err(LcfError::Dimension(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if preds.is_empty() {
        return Err(LcfError::Data("no events to score".into()));
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&p, &y) in preds.iter().zip(labels) {
        match (p == 1, y == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// `S / √B` with `S = ε_s·σ_s·𝓛` and `B = ε_b·σ_b·𝓛` (σ converted to fb).
/// No surviving background gives `+∞`.
pub fn significance(eps_s: f64, eps_b: f64, phys: &PhysicsConfig) -> f64 {
    let s = eps_s * phys.sigma_signal * FB_PER_PB * phys.luminosity;
    let b = eps_b * phys.sigma_background * FB_PER_PB * phys.luminosity;
    if b == 0.0 {
        return if s == 0.0 { 0.0 } else { f64::INFINITY };
    }
    s / b.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub eps_s: f64,
    pub eps_b: f64,
    /// `None` when no background survives (infinite significance).
    pub significance: Option<f64>,
}

impl MetricsReport {
    pub fn from_predictions(preds: &[u8], labels: &[u8], phys: &PhysicsConfig) -> Result<Self> {
        Ok(Self::from_confusion(confusion(preds, labels)?, phys))
    }

    pub fn from_confusion(c: Confusion, phys: &PhysicsConfig) -> Self {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let n = c.tp + c.fp + c.tn + c.fn_;
        let eps_s = ratio(c.tp, c.tp + c.fn_);
        let eps_b = ratio(c.fp, c.fp + c.tn);
        let z = significance(eps_s, eps_b, phys);
        Self {
            tp: c.tp,
            fp: c.fp,
            tn: c.tn,
            fn_: c.fn_,
            accuracy: ratio(c.tp + c.tn, n),
            precision: ratio(c.tp, c.tp + c.fp),
            eps_s,
            eps_b,
            significance: z.is_finite().then_some(z),
        }
    }

    pub fn n_events(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// One-row text table in the usual TP / FP / accuracy / precision /
    /// significance layout.
    pub fn table(&self, model: &str) -> String {
        format!("{}{}\n", table_header(), self.table_row(model))
    }

    pub fn table_row(&self, model: &str) -> String {
        let z = match self.significance {
            Some(z) => format!("{z:.4}"),
            None => "inf".to_string(),
        };
        format!(
            "{:<20} {:>8} {:>8} {:>10} {:>10} {:>13}",
            model,
            self.tp,
            self.fp,
            format!("{:.1}%", 100.0 * self.accuracy),
            format!("{:.1}%", 100.0 * self.precision),
            z
        )
    }
}

pub fn table_header() -> String {
    format!(
        "{:<20} {:>8} {:>8} {:>10} {:>10} {:>13}\n",
        "Model", "TP", "FP", "Accuracy", "Precision", "Significance"
    )
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.table("LCF"))
    }
}
