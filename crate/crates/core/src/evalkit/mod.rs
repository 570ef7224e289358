//! Scoring, paired bootstrap significance, tiered per-language ranking,
//! count-vector aggregation, oracle scores, and item difficulty.

mod bootstrap;
mod difficulty;
mod ranking;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unimorph::Dataset;

pub use bootstrap::{paired_bootstrap, BootstrapConfig, Side, SignificanceResult};
pub use difficulty::{difficulty, difficulty_histogram, oracle, Difficulty, DifficultyHistogram};
pub use ranking::{
    aggregate_ranks, rank_language, rank_language_detailed, LanguageRanking, Metric, RankTable,
    Tiering,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("size mismatch: expected {expected} items, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("nothing to evaluate")]
    EmptySet,
    #[error("gold entry {index} has no form")]
    MissingGold { index: usize },
    #[error("system {system} has no ranking for language {language}")]
    MissingLanguage { system: String, language: String },
    #[error("invalid bootstrap config: {0}")]
    InvalidConfig(String),
}

/// One system's predictions for one language, aligned with the gold items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRun {
    pub system: String,
    pub language: String,
    pub predictions: Vec<String>,
}

/// Per-item exact-match flags and edit distances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemScores {
    correct: Vec<bool>,
    distances: Vec<u32>,
}

impl ItemScores {
    /// Builds scores from distances alone; an item is correct iff its
    /// distance is zero.
    pub fn from_distances(distances: Vec<u32>) -> Self {
        ItemScores {
            correct: distances.iter().map(|&d| d == 0).collect(),
            distances,
        }
    }

    /// Correctness-only scores (distance 1 stands in for any miss).
    pub fn from_correct(correct: &[bool]) -> Self {
        ItemScores::from_distances(correct.iter().map(|&c| u32::from(!c)).collect())
    }

    pub fn correct(&self) -> &[bool] {
        &self.correct
    }

    pub fn distances(&self) -> &[u32] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.correct.len()
    }

    pub fn is_empty(&self) -> bool {
        self.correct.is_empty()
    }

    pub fn correct_count(&self) -> usize {
        self.correct.iter().filter(|&&c| c).count()
    }
}

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> u32 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len() as u32;
    }
    let mut row: Vec<u32> = (0..=b.len() as u32).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i as u32 + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = diag + u32::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}

pub fn score_run(gold: &Dataset, run: &SystemRun) -> Result<ItemScores, EvalError> {
    if gold.len() != run.predictions.len() {
        return Err(EvalError::SizeMismatch {
            expected: gold.len(),
            found: run.predictions.len(),
        });
    }
    let distances = gold
        .iter()
        .zip(&run.predictions)
        .enumerate()
        .map(|(index, (e, pred))| {
            e.form()
                .map(|g| levenshtein(pred, g))
                .ok_or(EvalError::MissingGold { index })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ItemScores::from_distances(distances))
}

pub fn accuracy(s: &ItemScores) -> Result<f64, EvalError> {
    if s.is_empty() {
        return Err(EvalError::EmptySet);
    }
    Ok(s.correct_count() as f64 / s.len() as f64)
}

pub fn mean_distance(s: &ItemScores) -> Result<f64, EvalError> {
    if s.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let total: u64 = s.distances.iter().map(|&d| u64::from(d)).sum();
    Ok(total as f64 / s.len() as f64)
}
