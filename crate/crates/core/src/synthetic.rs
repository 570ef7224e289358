//! Synthetic data for tests, demos, and benchmarks.
//!
//! None of these are real languages: they are small generated corpora whose
//! morphology is known exactly, plus a six-system ranking fixture over four
//! languages whose correctness vectors induce a known tier pattern.

use std::collections::{BTreeMap, HashSet};

use crate::evalkit::SystemRun;
use crate::rng::SplitMix64;
use crate::unimorph::{Dataset, Entry, FeatureBundle};

const STEM_CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p'];
const STEM_VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];
// Affixes draw from letters that never occur in stems.
const AFFIX_LETTERS: &[char] = &['q', 'r', 's', 't', 'v', 'w', 'x', 'y', 'z'];

fn bundles(n: usize) -> Vec<FeatureBundle> {
    // Distinct, valid tag bundles: V plus a synthetic slot tag.
    (0..n)
        .map(|k| format!("V;LGSPEC{k}").parse().expect("valid bundle"))
        .collect()
}

fn random_stem(rng: &mut SplitMix64, syllables: usize) -> String {
    let mut s = String::new();
    for _ in 0..syllables {
        s.push(*rng.choose(STEM_CONSONANTS).expect("non-empty"));
        s.push(*rng.choose(STEM_VOWELS).expect("non-empty"));
    }
    s.push(*rng.choose(STEM_CONSONANTS).expect("non-empty"));
    s
}

fn distinct_stems(rng: &mut SplitMix64, count: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let syllables = 2 + rng.index(2);
        let s = random_stem(rng, syllables);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

fn random_affix(rng: &mut SplitMix64, len: usize) -> String {
    (0..len)
        .map(|_| *rng.choose(AFFIX_LETTERS).expect("non-empty"))
        .collect()
}

fn distinct_affixes(rng: &mut SplitMix64, count: usize) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let len = 1 + rng.index(3);
        let a = random_affix(rng, len);
        if seen.insert(a.clone()) {
            out.push(a);
        }
    }
    out
}

/// Builds train/test sets from a per-bundle inflection function. Train
/// cycles through the bundles so each one is seen at least once when
/// `n_train >= n_bundles`; lemmas of train and test are disjoint.
fn language<F>(
    code: &str,
    n_bundles: usize,
    n_train: usize,
    n_test: usize,
    rng: &mut SplitMix64,
    inflect: F,
) -> (Dataset, Dataset)
where
    F: Fn(&str, usize) -> String,
{
    let bs = bundles(n_bundles);
    let stems = distinct_stems(rng, n_train + n_test);
    let make = |i: usize, k: usize| Entry {
        lemma: stems[i].clone(),
        form: Some(inflect(&stems[i], k)),
        bundle: bs[k].clone(),
    };
    let train = (0..n_train).map(|i| make(i, i % n_bundles)).collect();
    let test = (n_train..n_train + n_test)
        .map(|i| make(i, rng.index(n_bundles)))
        .collect();
    (Dataset::new(code, train), Dataset::new(code, test))
}

/// Forms are `lemma + suffix(bundle)`.
pub fn suffixing_language(n_bundles: usize, n_train: usize, n_test: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = SplitMix64::new(seed);
    let suffixes = distinct_affixes(&mut rng, n_bundles);
    language("sfx", n_bundles, n_train, n_test, &mut rng, |l, k| {
        format!("{l}{}", suffixes[k])
    })
}

/// Forms are `prefix(bundle) + lemma + suffix(bundle)`.
pub fn prefix_suffix_language(n_bundles: usize, n_train: usize, n_test: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = SplitMix64::new(seed);
    let prefixes = distinct_affixes(&mut rng, n_bundles);
    let suffixes = distinct_affixes(&mut rng, n_bundles);
    language("pfx", n_bundles, n_train, n_test, &mut rng, |l, k| {
        format!("{}{l}{}", prefixes[k], suffixes[k])
    })
}

/// Forms differ from lemmas only in their first vowel, which is rotated by
/// a bundle-specific amount through `a e i o u`.
pub fn ablaut_language(n_bundles: usize, n_train: usize, n_test: usize, seed: u64) -> (Dataset, Dataset) {
    let mut rng = SplitMix64::new(seed);
    language("abl", n_bundles, n_train, n_test, &mut rng, |l, k| {
        let shift = 1 + k % (STEM_VOWELS.len() - 1);
        let mut done = false;
        l.chars()
            .map(|c| match STEM_VOWELS.iter().position(|&v| v == c) {
                Some(p) if !done => {
                    done = true;
                    STEM_VOWELS[(p + shift) % STEM_VOWELS.len()]
                }
                _ => c,
            })
            .collect()
    })
}

/// Per-language, per-system correct-item counts of the four-language,
/// six-system ranking fixture.
///
/// Every language has `ITEMS` test items and system `s` is correct on the
/// first `count` of them. Systems in one intended tier differ by at most a
/// handful of items; tiers are 200 items apart. The intended ranks are
///
/// | lang | uiuc | trm-single | CULing | deepspin | NYU-CUB | IMS |
/// |------|------|------------|--------|----------|---------|-----|
/// | cly  | 1    | 1          | 3      | 3        | 3       | 6   |
/// | ctp  | 1    | 1          | 1      | 4        | 4       | 4   |
/// | czn  | 1    | 1          | 1      | 1        | 1       | 1   |
/// | zpv  | 1    | 1          | 1      | 1        | 1       | 1   |
pub const RANK_FIXTURE: &[(&str, &[(&str, usize)])] = &[
    (
        "cly",
        &[
            ("uiuc", 900),
            ("trm-single", 899),
            ("CULing", 700),
            ("deepspin", 699),
            ("NYU-CUB", 698),
            ("IMS", 500),
        ],
    ),
    (
        "ctp",
        &[
            ("CULing", 900),
            ("uiuc", 899),
            ("trm-single", 898),
            ("IMS", 700),
            ("deepspin", 699),
            ("NYU-CUB", 698),
        ],
    ),
    (
        "czn",
        &[
            ("deepspin", 900),
            ("uiuc", 899),
            ("IMS", 898),
            ("NYU-CUB", 897),
            ("CULing", 896),
            ("trm-single", 895),
        ],
    ),
    (
        "zpv",
        &[
            ("NYU-CUB", 900),
            ("CULing", 899),
            ("deepspin", 898),
            ("uiuc", 897),
            ("trm-single", 896),
            ("IMS", 895),
        ],
    ),
];

pub const RANK_FIXTURE_ITEMS: usize = 1000;

/// Gold test set and one run per system for each fixture language.
///
/// Gold item `i` is `(l{i}, f{i}, V)`; a wrong prediction appends `x`.
pub fn rank_fixture() -> BTreeMap<String, (Dataset, Vec<SystemRun>)> {
    RANK_FIXTURE
        .iter()
        .map(|(lang, systems)| {
            let gold = Dataset::new(
                *lang,
                (0..RANK_FIXTURE_ITEMS)
                    .map(|i| Entry::triple(&format!("l{i}"), &format!("f{i}"), "V").expect("valid"))
                    .collect(),
            );
            let runs = systems
                .iter()
                .map(|(system, correct)| SystemRun {
                    system: system.to_string(),
                    language: lang.to_string(),
                    predictions: (0..RANK_FIXTURE_ITEMS)
                        .map(|i| {
                            if i < *correct {
                                format!("f{i}")
                            } else {
                                format!("f{i}x")
                            }
                        })
                        .collect(),
                })
                .collect();
            (lang.to_string(), (gold, runs))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_shaped() {
        let (tr, te) = suffixing_language(20, 500, 200, 1);
        assert_eq!((tr.len(), te.len()), (500, 200));
        assert_eq!(suffixing_language(20, 500, 200, 1).0, tr);
        let train_bundles: HashSet<_> = tr.iter().map(|e| e.bundle.clone()).collect();
        assert_eq!(train_bundles.len(), 20);

        let (tr, _) = prefix_suffix_language(5, 10, 5, 2);
        for e in &tr {
            let f = e.form().unwrap();
            assert!(f.contains(&e.lemma) && !f.starts_with(&e.lemma) && !f.ends_with(&e.lemma));
        }

        let (tr, _) = ablaut_language(4, 20, 5, 3);
        for e in &tr {
            let f = e.form().unwrap();
            assert_eq!(f.chars().count(), e.lemma.chars().count());
            assert_ne!(f, e.lemma);
        }
    }

    #[test]
    fn fixture_sizes() {
        let f = rank_fixture();
        assert_eq!(f.len(), 4);
        for (gold, runs) in f.values() {
            assert_eq!(runs.len(), 6);
            assert!(runs.iter().all(|r| r.predictions.len() == gold.len()));
        }
    }
}
