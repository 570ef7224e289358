use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{EvalError, ItemScores};

fn check_aligned(runs: &[&ItemScores]) -> Result<usize, EvalError> {
    let first = runs.first().ok_or(EvalError::EmptySet)?;
    for r in &runs[1..] {
        if r.len() != first.len() {
            return Err(EvalError::SizeMismatch {
                expected: first.len(),
                found: r.len(),
            });
        }
    }
    if first.is_empty() {
        return Err(EvalError::EmptySet);
    }
    Ok(first.len())
}

/// Share of items that at least one of the systems gets right.
pub fn oracle(runs: &[&ItemScores]) -> Result<f64, EvalError> {
    let n = check_aligned(runs)?;
    let hits = (0..n)
        .filter(|&i| runs.iter().any(|r| r.correct()[i]))
        .count();
    Ok(hits as f64 / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    /// Every system correct.
    VeryEasy,
    /// At least 80% of systems correct.
    Easy,
    /// Strictly between 20% and 80%.
    Medium,
    /// At most 20% of systems correct, but some.
    Hard,
    /// No system correct.
    VeryHard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 5] = [
        Difficulty::VeryEasy,
        Difficulty::Easy,
        Difficulty::Medium,
        Difficulty::Hard,
        Difficulty::VeryHard,
    ];

    /// Bucket for `correct` of `total` systems, compared in integers.
    pub fn classify(correct: usize, total: usize) -> Difficulty {
        if correct == total {
            Difficulty::VeryEasy
        } else if correct == 0 {
            Difficulty::VeryHard
        } else if 5 * correct >= 4 * total {
            Difficulty::Easy
        } else if 5 * correct <= total {
            Difficulty::Hard
        } else {
            Difficulty::Medium
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::VeryEasy => "very_easy",
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
            Difficulty::VeryHard => "very_hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn difficulty(runs: &[&ItemScores]) -> Result<Vec<Difficulty>, EvalError> {
    let n = check_aligned(runs)?;
    Ok((0..n)
        .map(|i| {
            let c = runs.iter().filter(|r| r.correct()[i]).count();
            Difficulty::classify(c, runs.len())
        })
        .collect())
}

/// Percentage of items per bucket, grouped by part of speech.
pub type DifficultyHistogram = BTreeMap<String, BTreeMap<Difficulty, f64>>;

/// `pos[i]` labels item `i`; every bucket is present for every label.
pub fn difficulty_histogram(buckets: &[Difficulty], pos: &[String]) -> Result<DifficultyHistogram, EvalError> {
    if buckets.len() != pos.len() {
        return Err(EvalError::SizeMismatch {
            expected: buckets.len(),
            found: pos.len(),
        });
    }
    let mut counts: BTreeMap<&str, BTreeMap<Difficulty, usize>> = BTreeMap::new();
    for (b, p) in buckets.iter().zip(pos) {
        *counts.entry(p).or_default().entry(*b).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(p, by_bucket)| {
            let total: usize = by_bucket.values().sum();
            let pct = Difficulty::ALL
                .iter()
                .map(|d| {
                    let c = by_bucket.get(d).copied().unwrap_or(0);
                    (*d, 100.0 * c as f64 / total as f64)
                })
                .collect();
            (p.to_string(), pct)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[bool]) -> ItemScores {
        ItemScores::from_correct(c)
    }

    #[test]
    fn oracle_examples() {
        let a = s(&[true, false, true, false]);
        assert_eq!(oracle(&[&a]).unwrap(), 0.5);
        let b = s(&[false, true, false, true]);
        assert_eq!(oracle(&[&a, &b]).unwrap(), 1.0);
        assert_eq!(oracle(&[]), Err(EvalError::EmptySet));
        assert!(matches!(oracle(&[&a, &s(&[true])]), Err(EvalError::SizeMismatch { .. })));
    }

    #[test]
    fn buckets() {
        assert_eq!(Difficulty::classify(10, 10), Difficulty::VeryEasy);
        assert_eq!(Difficulty::classify(0, 10), Difficulty::VeryHard);
        assert_eq!(Difficulty::classify(1, 10), Difficulty::Hard);
        assert_eq!(Difficulty::classify(2, 10), Difficulty::Hard);
        assert_eq!(Difficulty::classify(3, 10), Difficulty::Medium);
        assert_eq!(Difficulty::classify(7, 10), Difficulty::Medium);
        assert_eq!(Difficulty::classify(8, 10), Difficulty::Easy);
        assert_eq!(Difficulty::classify(9, 10), Difficulty::Easy);
        assert_eq!(Difficulty::classify(1, 1), Difficulty::VeryEasy);
    }

    #[test]
    fn per_item_and_histogram() {
        let a = s(&[true, true, false, false]);
        let b = s(&[true, false, false, true]);
        let d = difficulty(&[&a, &b]).unwrap();
        assert_eq!(
            d,
            vec![
                Difficulty::VeryEasy,
                Difficulty::Medium,
                Difficulty::VeryHard,
                Difficulty::Medium
            ]
        );
        let pos: Vec<String> = ["V", "V", "N", "N"].iter().map(|s| s.to_string()).collect();
        let h = difficulty_histogram(&d, &pos).unwrap();
        assert_eq!(h["V"][&Difficulty::VeryEasy], 50.0);
        assert_eq!(h["N"][&Difficulty::VeryHard], 50.0);
        assert_eq!(h["N"][&Difficulty::Easy], 0.0);
        assert_eq!(h["V"].values().sum::<f64>(), 100.0);
    }
}
