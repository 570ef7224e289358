//! Deduplication, seeded train/dev/test splitting with a lemma-atomic
//! training cap, and per-split data-quality statistics.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{derive_seed, SplitMix64};
use crate::unimorph::{Dataset, Entry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("invalid split spec: {0}")]
    InvalidSpec(String),
    #[error("dataset of {size} entries is too small: the {split} split would be empty")]
    TooSmall { size: usize, split: &'static str },
    #[error("cap {cap} is smaller than the smallest paradigm ({smallest} entries)")]
    CapTooSmall { cap: usize, smallest: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub dev_fraction: f64,
    pub test_fraction: f64,
    pub train_cap: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.70,
            dev_fraction: 0.10,
            test_fraction: 0.20,
            train_cap: 100_000,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        SplitSpec {
            seed,
            ..SplitSpec::default()
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        for (name, f) in [
            ("train", self.train_fraction),
            ("dev", self.dev_fraction),
            ("test", self.test_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(DataError::InvalidSpec(format!(
                    "{name} fraction {f} outside (0, 1)"
                )));
            }
        }
        let sum = self.train_fraction + self.dev_fraction + self.test_fraction;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DataError::InvalidSpec(format!("fractions sum to {sum}")));
        }
        if self.train_cap == 0 {
            return Err(DataError::InvalidSpec("train cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Identity of an entry for deduplication: lemma, form, and the
/// order-insensitive tag set.
fn triple_key(e: &Entry) -> (&str, Option<&str>, String) {
    (e.lemma.as_str(), e.form(), e.bundle.set_key())
}

fn cell_key(e: &Entry) -> (&str, String) {
    (e.lemma.as_str(), e.bundle.set_key())
}

/// Keeps the first occurrence of every (lemma, form, bundle) triple.
/// Returns the deduplicated dataset and the number of entries dropped.
pub fn deduplicate(d: &Dataset) -> (Dataset, usize) {
    let mut seen = HashSet::new();
    let kept: Vec<Entry> = d
        .iter()
        .filter(|e| seen.insert(triple_key(e)))
        .cloned()
        .collect();
    let dropped = d.len() - kept.len();
    (Dataset::new(d.language(), kept), dropped)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub dev: Dataset,
    pub test: Dataset,
    /// Training entries removed by the cap (0 when the cap was inactive).
    pub capped: usize,
}

/// Number of entries each split receives: dev and test get their rounded
/// shares, train gets the remainder.
pub fn split_sizes(n: usize, spec: &SplitSpec) -> (usize, usize, usize) {
    let dev = (n as f64 * spec.dev_fraction).round() as usize;
    let test = (n as f64 * spec.test_fraction).round() as usize;
    let train = n.saturating_sub(dev + test);
    (train, dev, test)
}

/// Randomly partitions `d` into train/dev/test.
///
/// Assignment follows a seeded shuffle; within each split the input order is
/// kept. If train exceeds `spec.train_cap`, it is cut down with
/// [`subsample_by_lemma`] under a seed derived from `spec.seed`.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<Split, DataError> {
    spec.validate()?;
    let n = d.len();
    let (n_train, n_dev, n_test) = split_sizes(n, spec);
    for (split, size) in [("train", n_train), ("dev", n_dev), ("test", n_test)] {
        if size == 0 {
            return Err(DataError::TooSmall { size: n, split });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::new(spec.seed).shuffle(&mut order);
    // 0 = train, 1 = dev, 2 = test
    let mut assignment = vec![0u8; n];
    for &i in &order[n_train..n_train + n_dev] {
        assignment[i] = 1;
    }
    for &i in &order[n_train + n_dev..] {
        assignment[i] = 2;
    }

    let mut parts = [Vec::new(), Vec::new(), Vec::new()];
    for (e, &a) in d.iter().zip(&assignment) {
        parts[a as usize].push(e.clone());
    }
    let [train, dev, test] = parts;
    let mut train = Dataset::new(d.language(), train);
    let mut capped = 0;
    if train.len() > spec.train_cap {
        let before = train.len();
        train = subsample_by_lemma(&train, spec.train_cap, derive_seed(spec.seed, "train-cap"))?;
        capped = before - train.len();
    }
    Ok(Split {
        train,
        dev: Dataset::new(d.language(), dev),
        test: Dataset::new(d.language(), test),
        capped,
    })
}

/// Shrinks `d` to at most `cap` entries while keeping paradigms whole.
///
/// Lemmas are visited in a seeded random order and a lemma's full paradigm is
/// admitted whenever it still fits; lemmas that do not fit are skipped and
/// later (smaller) ones are still tried. Output keeps the input order.
pub fn subsample_by_lemma(d: &Dataset, cap: usize, seed: u64) -> Result<Dataset, DataError> {
    if d.len() <= cap {
        return Ok(d.clone());
    }
    let mut sizes: Vec<(&str, usize)> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for e in d {
        let i = *slot.entry(e.lemma.as_str()).or_insert_with(|| {
            sizes.push((e.lemma.as_str(), 0));
            sizes.len() - 1
        });
        sizes[i].1 += 1;
    }
    let smallest = sizes.iter().map(|&(_, n)| n).min().unwrap_or(0);
    if smallest > cap {
        return Err(DataError::CapTooSmall { cap, smallest });
    }

    SplitMix64::new(seed).shuffle(&mut sizes);
    let mut admitted = HashSet::new();
    let mut total = 0;
    for (lemma, size) in sizes {
        if total + size <= cap {
            total += size;
            admitted.insert(lemma);
        }
        if total == cap {
            break;
        }
    }
    let kept = d
        .iter()
        .filter(|e| admitted.contains(e.lemma.as_str()))
        .cloned()
        .collect();
    Ok(Dataset::new(d.language(), kept))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitStat {
    pub size: usize,
    pub inconsistency_pct: f64,
    /// Only for dev and test.
    pub contradiction_pct: Option<f64>,
    /// Only for dev and test.
    pub in_vocabulary_pct: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub train: SplitStat,
    pub dev: SplitStat,
    pub test: SplitStat,
}

impl SplitStats {
    pub const TSV_HEADER: &'static str = "language\ttrain\tdev\ttest\tinconsistency_train\tinconsistency_dev\tinconsistency_test\tcontradiction_dev\tcontradiction_test\tin_vocabulary_dev\tin_vocabulary_test";

    /// One row in the column order of the data-quality tables; percentages
    /// with one decimal.
    pub fn tsv_row(&self, language: &str) -> String {
        let pct = |p: f64| format!("{p:.1}");
        let opt = |p: Option<f64>| pct(p.unwrap_or(0.0));
        [
            language.to_string(),
            self.train.size.to_string(),
            self.dev.size.to_string(),
            self.test.size.to_string(),
            pct(self.train.inconsistency_pct),
            pct(self.dev.inconsistency_pct),
            pct(self.test.inconsistency_pct),
            opt(self.dev.contradiction_pct),
            opt(self.test.contradiction_pct),
            opt(self.dev.in_vocabulary_pct),
            opt(self.test.in_vocabulary_pct),
        ]
        .join("\t")
    }
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

type FormsByCell<'a> = HashMap<(&'a str, String), HashSet<Option<&'a str>>>;

fn forms_by_cell(d: &Dataset) -> FormsByCell<'_> {
    let mut map: FormsByCell<'_> = HashMap::new();
    for e in d {
        map.entry(cell_key(e)).or_default().insert(e.form());
    }
    map
}

/// Share of entries whose (lemma, bundle) cell has more than one distinct
/// form in the same split. Every member of such a cell counts.
pub fn inconsistency_pct(d: &Dataset) -> f64 {
    let cells = forms_by_cell(d);
    let count = d.iter().filter(|e| cells[&cell_key(e)].len() > 1).count();
    percent(count, d.len())
}

/// Share of eval entries whose cell occurs in train without the entry's form
/// among the train forms.
pub fn contradiction_pct(train: &Dataset, eval: &Dataset) -> f64 {
    let cells = forms_by_cell(train);
    let count = eval
        .iter()
        .filter(|e| {
            cells
                .get(&cell_key(e))
                .is_some_and(|forms| !forms.contains(&e.form()))
        })
        .count();
    percent(count, eval.len())
}

/// Share of eval entries whose lemma is a lemma somewhere in train.
pub fn in_vocabulary_pct(train: &Dataset, eval: &Dataset) -> f64 {
    let lemmas: HashSet<&str> = train.iter().map(|e| e.lemma.as_str()).collect();
    let count = eval.iter().filter(|e| lemmas.contains(e.lemma.as_str())).count();
    percent(count, eval.len())
}

pub fn compute_stats(train: &Dataset, dev: &Dataset, test: &Dataset) -> SplitStats {
    let eval = |d: &Dataset| SplitStat {
        size: d.len(),
        inconsistency_pct: inconsistency_pct(d),
        contradiction_pct: Some(contradiction_pct(train, d)),
        in_vocabulary_pct: Some(in_vocabulary_pct(train, d)),
    };
    SplitStats {
        train: SplitStat {
            size: train.len(),
            inconsistency_pct: inconsistency_pct(train),
            contradiction_pct: None,
            in_vocabulary_pct: None,
        },
        dev: eval(dev),
        test: eval(test),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[(&str, &str, &str)]) -> Dataset {
        Dataset::new(
            "x",
            rows.iter()
                .map(|(l, f, t)| Entry::triple(l, f, t).unwrap())
                .collect(),
        )
    }

    fn numbered(n: usize) -> Dataset {
        Dataset::new(
            "x",
            (0..n)
                .map(|i| Entry::triple(&format!("l{i}"), &format!("f{i}"), "V").unwrap())
                .collect(),
        )
    }

    #[test]
    fn dedup_examples() {
        let (d, dropped) = deduplicate(&ds(&[("a", "X", "T"), ("a", "X", "T")]));
        assert_eq!((d.len(), dropped), (1, 1));
        let (d, dropped) = deduplicate(&ds(&[("a", "X", "T"), ("a", "Y", "T")]));
        assert_eq!((d.len(), dropped), (2, 0));
        let (d, dropped) = deduplicate(&Dataset::empty("x"));
        assert_eq!((d.len(), dropped), (0, 0));
        // tag order does not make a new triple
        let (d, _) = deduplicate(&ds(&[("a", "X", "V;PST"), ("a", "X", "PST;V")]));
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        let spec = SplitSpec::default();
        assert_eq!(split_sizes(100, &spec), (70, 10, 20));
        assert_eq!(split_sizes(10, &spec), (7, 1, 2));
        let s = split(&numbered(10), &spec).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (7, 1, 2));
    }

    #[test]
    fn split_is_seeded() {
        let d = numbered(100);
        let a = split(&d, &SplitSpec::with_seed(1)).unwrap();
        let b = split(&d, &SplitSpec::with_seed(1)).unwrap();
        let c = split(&d, &SplitSpec::with_seed(2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.dev, c.dev);
    }

    #[test]
    fn split_too_small() {
        assert!(matches!(
            split(&numbered(3), &SplitSpec::default()),
            Err(DataError::TooSmall { .. })
        ));
        assert!(split(&numbered(0), &SplitSpec::default()).is_err());
    }

    #[test]
    fn spec_validation() {
        let bad = SplitSpec {
            train_fraction: 0.5,
            ..SplitSpec::default()
        };
        assert!(bad.validate().is_err());
        let zero_cap = SplitSpec {
            train_cap: 0,
            ..SplitSpec::default()
        };
        assert!(zero_cap.validate().is_err());
    }

    #[test]
    fn cap_applies_to_train_only() {
        let d = numbered(100);
        let spec = SplitSpec {
            train_cap: 50,
            ..SplitSpec::with_seed(9)
        };
        let s = split(&d, &spec).unwrap();
        assert_eq!(s.train.len(), 50);
        assert_eq!(s.capped, 20);
        assert_eq!((s.dev.len(), s.test.len()), (10, 20));
    }

    #[test]
    fn subsample_exact_fit_and_identity() {
        let d = ds(&[
            ("a", "a1", "A"),
            ("a", "a2", "B"),
            ("a", "a3", "C"),
            ("b", "b1", "A"),
            ("b", "b2", "B"),
        ]);
        assert_eq!(subsample_by_lemma(&d, 5, 0).unwrap(), d);
        assert_eq!(subsample_by_lemma(&d, 100, 0).unwrap(), d);
        assert_eq!(
            subsample_by_lemma(&d, 1, 0),
            Err(DataError::CapTooSmall {
                cap: 1,
                smallest: 2
            })
        );
    }

    #[test]
    fn subsample_never_splits_a_paradigm() {
        let d = ds(&[
            ("a", "a1", "A"),
            ("a", "a2", "B"),
            ("a", "a3", "C"),
            ("b", "b1", "A"),
            ("b", "b2", "B"),
            ("b", "b3", "C"),
        ]);
        // Oracle: the admissible subsets of whole paradigms with size <= 4
        // and no room for another lemma are exactly {a} and {b}.
        let paradigm = |l: &str| -> Vec<Entry> {
            d.iter().filter(|e| e.lemma == l).cloned().collect()
        };
        let admissible = [paradigm("a"), paradigm("b")];
        let mut seen = HashSet::new();
        for seed in 0..32 {
            let out = subsample_by_lemma(&d, 4, seed).unwrap();
            assert_eq!(out.len(), 3);
            let pos = admissible
                .iter()
                .position(|p| p.as_slice() == out.entries())
                .expect("output is one whole paradigm");
            seen.insert(pos);
        }
        assert_eq!(seen.len(), 2, "both lemmas get picked for some seed");
    }

    // Brute-force reading of the definitions, independent of the HashMap
    // grouping used above.
    fn brute_inconsistency(d: &[Entry]) -> f64 {
        let bad = d
            .iter()
            .filter(|e| {
                d.iter().any(|o| {
                    o.lemma == e.lemma && o.bundle.set_key() == e.bundle.set_key() && o.form != e.form
                })
            })
            .count();
        100.0 * bad as f64 / d.len() as f64
    }

    #[test]
    fn stats_examples() {
        let train = ds(&[("a", "X", "T"), ("a", "Y", "T"), ("b", "Z", "U"), ("c", "W", "S")]);
        let oracle = brute_inconsistency(train.entries());
        assert_eq!(oracle, 50.0);
        assert_eq!(inconsistency_pct(&train), oracle);

        let train2 = ds(&[("a", "X", "T")]);
        let dev = ds(&[("a", "Q", "T")]);
        let s = compute_stats(&train2, &dev, &ds(&[("z", "Q", "T")]));
        assert_eq!(s.dev.contradiction_pct, Some(100.0));
        assert_eq!(s.dev.in_vocabulary_pct, Some(100.0));
        assert_eq!(s.test.contradiction_pct, Some(0.0));
        assert_eq!(s.test.in_vocabulary_pct, Some(0.0));
        assert_eq!(s.train.contradiction_pct, None);
        assert_eq!((s.train.size, s.dev.size, s.test.size), (1, 1, 1));
    }

    #[test]
    fn matching_train_form_is_not_a_contradiction() {
        let train = ds(&[("a", "X", "T"), ("a", "Y", "T")]);
        let dev = ds(&[("a", "Y", "T"), ("a", "Z", "T")]);
        assert_eq!(contradiction_pct(&train, &dev), 50.0);
    }

    #[test]
    fn distinct_cells_have_no_inconsistency() {
        let d = numbered(20);
        assert_eq!(inconsistency_pct(&d), 0.0);
        assert_eq!(inconsistency_pct(&Dataset::empty("x")), 0.0);
    }

    #[test]
    fn tsv_row_format() {
        let train = ds(&[("a", "X", "T"), ("a", "Y", "T"), ("b", "Z", "U"), ("c", "W", "S")]);
        let dev = ds(&[("a", "Q", "T")]);
        let s = compute_stats(&train, &dev, &dev);
        assert_eq!(
            s.tsv_row("xxx"),
            "xxx\t4\t1\t1\t50.0\t0.0\t0.0\t100.0\t100.0\t100.0\t100.0"
        );
        assert_eq!(SplitStats::TSV_HEADER.split('\t').count(), 11);
    }
}
