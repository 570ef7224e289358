use serde::{Deserialize, Serialize};

use super::{EvalError, ItemScores};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub samples: u32,
    /// Fraction of the test items drawn per resample.
    pub ratio: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            samples: 10_000,
            ratio: 0.5,
            alpha: 0.005,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn with_seed(seed: u64) -> Self {
        BootstrapConfig {
            seed,
            ..BootstrapConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.samples == 0 {
            return Err(EvalError::InvalidConfig("samples must be at least 1".into()));
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(EvalError::InvalidConfig(format!("ratio {} outside (0, 1]", self.ratio)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EvalError::InvalidConfig(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }

    /// Items drawn per resample for a test set of `n` items.
    pub fn resample_size(&self, n: usize) -> usize {
        ((n as f64 * self.ratio).floor() as usize).max(1)
    }
}

/// Which score drives a comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Exact-match accuracy, higher is better.
    #[default]
    Accuracy,
    /// Mean Levenshtein distance, lower is better.
    Distance,
}

impl Metric {
    /// Per-item utility with higher meaning better, kept integral so that
    /// resample comparisons are exact.
    pub(crate) fn utilities(self, s: &ItemScores) -> Vec<i64> {
        match self {
            Metric::Accuracy => s.correct().iter().map(|&c| i64::from(c)).collect(),
            Metric::Distance => s.distances().iter().map(|&d| -i64::from(d)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// Share of resamples on which the full-set winner does not strictly win.
    pub p: f64,
    /// Full-set winner; `None` when both systems score the same.
    pub winner: Option<Side>,
    pub significant: bool,
}

impl SignificanceResult {
    pub fn a_better(&self) -> bool {
        self.winner == Some(Side::A)
    }
}

/// Paired bootstrap test on accuracy.
pub fn paired_bootstrap(
    a: &ItemScores,
    b: &ItemScores,
    cfg: &BootstrapConfig,
) -> Result<SignificanceResult, EvalError> {
    paired_bootstrap_on(a, b, cfg, Metric::Accuracy)
}

/// Paired bootstrap resampling.
///
/// Each of `cfg.samples` rounds draws `max(1, floor(n * ratio))` item indices
/// uniformly with replacement, shared by both systems. `p` is the share of
/// rounds where the system that wins on the full set fails to score strictly
/// higher; a full-set tie gives `p = 1`.
pub fn paired_bootstrap_on(
    a: &ItemScores,
    b: &ItemScores,
    cfg: &BootstrapConfig,
    metric: Metric,
) -> Result<SignificanceResult, EvalError> {
    cfg.validate()?;
    if a.len() != b.len() {
        return Err(EvalError::SizeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let ua = metric.utilities(a);
    let ub = metric.utilities(b);
    let total_a: i64 = ua.iter().sum();
    let total_b: i64 = ub.iter().sum();
    let (winner, (w, l)) = match total_a.cmp(&total_b) {
        std::cmp::Ordering::Equal => {
            return Ok(SignificanceResult {
                p: 1.0,
                winner: None,
                significant: false,
            })
        }
        std::cmp::Ordering::Greater => (Side::A, (&ua, &ub)),
        std::cmp::Ordering::Less => (Side::B, (&ub, &ua)),
    };

    // Only the per-item difference matters for the comparison.
    let diff: Vec<i64> = w.iter().zip(l).map(|(x, y)| x - y).collect();
    let n = diff.len() as u64;
    let m = cfg.resample_size(diff.len());
    let mut rng = SplitMix64::new(cfg.seed);
    let mut failures = 0u32;
    for _ in 0..cfg.samples {
        let mut margin = 0i64;
        for _ in 0..m {
            margin += diff[rng.below(n) as usize];
        }
        if margin <= 0 {
            failures += 1;
        }
    }
    let p = f64::from(failures) / f64::from(cfg.samples);
    Ok(SignificanceResult {
        p,
        winner: Some(winner),
        significant: p < cfg.alpha,
    })
}
