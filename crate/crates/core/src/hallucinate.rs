//! Data hallucination: lemma/form pairs are aligned character by character,
//! and long stretches shared by both strings are overwritten with random
//! characters of the language's alphabet. The affixes around them survive, so
//! the new pair still shows the original inflectional change.

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::unimorph::{Dataset, Entry};

/// Redraws allowed per entry when a replacement would change how the pair
/// aligns.
const MAX_REDRAWS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HallucinationError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("entry has no form")]
    MissingForm,
    #[error("no entry has a shared segment of at least {min_shared_len} characters")]
    NothingHallucinable { min_shared_len: usize },
    #[error("gave up after {attempts} attempts with {produced} of {requested} triples")]
    RetriesExhausted {
        attempts: usize,
        produced: usize,
        requested: usize,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Character range in the lemma.
    pub lemma_span: Range<usize>,
    /// Character range in the form.
    pub form_span: Range<usize>,
    pub lemma: String,
    pub form: String,
    pub shared: bool,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.lemma_span.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemma_span.is_empty() && self.form_span.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub segments: Vec<Segment>,
}

impl Alignment {
    /// Texts of the unaligned stretches, in order.
    pub fn non_shared(&self) -> Vec<(&str, &str)> {
        self.segments
            .iter()
            .filter(|s| !s.shared)
            .map(|s| (s.lemma.as_str(), s.form.as_str()))
            .collect()
    }

    pub fn shared(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.shared)
    }
}

/// Longest-common-subsequence alignment of two strings.
///
/// Runs of consecutive aligned characters become shared segments; whatever
/// lies between them becomes one non-shared segment (either side may be
/// empty). Among optimal alignments, matches are taken as early as possible.
pub fn align(lemma: &str, form: &str) -> Alignment {
    let a: Vec<char> = lemma.chars().collect();
    let b: Vec<char> = form.chars().collect();
    let (n, m) = (a.len(), b.len());
    // suffix[i][j] = LCS length of a[i..] and b[j..]
    let mut suffix = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[i][j] = if a[i] == b[j] {
                suffix[i + 1][j + 1] + 1
            } else {
                suffix[i + 1][j].max(suffix[i][j + 1])
            };
        }
    }

    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] && suffix[i][j] == suffix[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if suffix[i + 1][j] >= suffix[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }

    let text = |cs: &[char], r: &Range<usize>| cs[r.clone()].iter().collect::<String>();
    let mut segments = Vec::new();
    let mut push = |lr: Range<usize>, fr: Range<usize>, shared: bool| {
        if lr.is_empty() && fr.is_empty() {
            return;
        }
        segments.push(Segment {
            lemma: text(&a, &lr),
            form: text(&b, &fr),
            lemma_span: lr,
            form_span: fr,
            shared,
        });
    };
    let (mut li, mut fi) = (0, 0);
    let mut k = 0;
    while k < pairs.len() {
        let (si, sj) = pairs[k];
        let mut run = 1;
        while k + run < pairs.len() && pairs[k + run] == (si + run, sj + run) {
            run += 1;
        }
        push(li..si, fi..sj, false);
        push(si..si + run, sj..sj + run, true);
        li = si + run;
        fi = sj + run;
        k += run;
    }
    push(li..n, fi..m, false);
    Alignment { segments }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallucinationConfig {
    /// Shared segments at least this long are replaced.
    pub min_shared_len: usize,
    pub target_count: usize,
    pub seed: u64,
    /// When false, each replacement is one character shorter, equal, or one
    /// longer than the segment it replaces (chosen uniformly).
    pub preserve_length: bool,
}

impl Default for HallucinationConfig {
    fn default() -> Self {
        HallucinationConfig {
            min_shared_len: 4,
            target_count: 0,
            seed: 0,
            preserve_length: true,
        }
    }
}

impl HallucinationConfig {
    pub fn validate(&self) -> Result<(), HallucinationError> {
        if self.min_shared_len < 2 {
            return Err(HallucinationError::InvalidConfig(
                "min_shared_len must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// At least one shared segment was rewritten.
    Replaced,
    /// No shared segment reaches the threshold; entry returned as is.
    BelowThreshold,
    /// Every draw changed the pair's alignment; entry returned as is.
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hallucinated {
    pub entry: Entry,
    pub outcome: Outcome,
}

/// Whether `e` has a shared segment long enough to be replaced.
pub fn is_hallucinable(e: &Entry, min_shared_len: usize) -> bool {
    e.form()
        .is_some_and(|f| align(&e.lemma, f).shared().any(|s| s.len() >= min_shared_len))
}

/// Rewrites every qualifying shared segment of `e` with random characters.
///
/// The same replacement goes into lemma and form. A draw is accepted only if
/// re-aligning the new pair reproduces the source's non-shared segments, so
/// the affixes are guaranteed to be preserved; after [`MAX_REDRAWS`] failed
/// draws the entry is returned unchanged with [`Outcome::Unstable`].
pub fn hallucinate_entry(
    e: &Entry,
    alphabet: &[char],
    cfg: &HallucinationConfig,
    rng: &mut SplitMix64,
) -> Result<Hallucinated, HallucinationError> {
    cfg.validate()?;
    if alphabet.is_empty() {
        return Err(HallucinationError::EmptyAlphabet);
    }
    let form = e.form().ok_or(HallucinationError::MissingForm)?;
    let alignment = align(&e.lemma, form);
    if !alignment.shared().any(|s| s.len() >= cfg.min_shared_len) {
        return Ok(Hallucinated {
            entry: e.clone(),
            outcome: Outcome::BelowThreshold,
        });
    }
    let expected = alignment.non_shared();
    for _ in 0..MAX_REDRAWS {
        let mut lemma = String::new();
        let mut new_form = String::new();
        for seg in &alignment.segments {
            if seg.shared && seg.len() >= cfg.min_shared_len {
                let len = if cfg.preserve_length {
                    seg.len()
                } else {
                    seg.len() + rng.index(3) - 1
                };
                let replacement: String = (0..len).map(|_| alphabet[rng.index(alphabet.len())]).collect();
                lemma.push_str(&replacement);
                new_form.push_str(&replacement);
            } else {
                lemma.push_str(&seg.lemma);
                new_form.push_str(&seg.form);
            }
        }
        if align(&lemma, &new_form).non_shared() == expected {
            return Ok(Hallucinated {
                entry: Entry {
                    lemma,
                    form: Some(new_form),
                    bundle: e.bundle.clone(),
                },
                outcome: Outcome::Replaced,
            });
        }
    }
    Ok(Hallucinated {
        entry: e.clone(),
        outcome: Outcome::Unstable,
    })
}

/// Generates `cfg.target_count` new triples from `d`.
///
/// Source entries are visited cyclically in a seeded random order. Outputs
/// that coincide with a real entry or with an earlier output are discarded
/// and drawn again, up to 100 attempts per requested triple. The originals
/// are not part of the result.
pub fn augment(d: &Dataset, cfg: &HallucinationConfig) -> Result<Dataset, HallucinationError> {
    let generated = augment_with_sources(d, cfg)?;
    Ok(Dataset::new(
        d.language(),
        generated.into_iter().map(|(_, e)| e).collect(),
    ))
}

/// Like [`augment`], pairing each new triple with the index of its source
/// entry in `d`.
pub fn augment_with_sources(
    d: &Dataset,
    cfg: &HallucinationConfig,
) -> Result<Vec<(usize, Entry)>, HallucinationError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.target_count);
    if cfg.target_count == 0 {
        return Ok(out);
    }
    let mut sources: Vec<usize> = (0..d.len())
        .filter(|&i| is_hallucinable(&d.entries()[i], cfg.min_shared_len))
        .collect();
    if sources.is_empty() {
        return Err(HallucinationError::NothingHallucinable {
            min_shared_len: cfg.min_shared_len,
        });
    }
    let alphabet: Vec<char> = d.alphabet().iter().copied().collect();
    let mut rng = SplitMix64::new(cfg.seed);
    rng.shuffle(&mut sources);

    let mut seen: HashSet<Entry> = d.iter().cloned().collect();
    let budget = cfg.target_count.saturating_mul(100);
    let mut attempts = 0;
    while out.len() < cfg.target_count {
        if attempts == budget {
            return Err(HallucinationError::RetriesExhausted {
                attempts,
                produced: out.len(),
                requested: cfg.target_count,
            });
        }
        let source = sources[attempts % sources.len()];
        attempts += 1;
        let h = hallucinate_entry(&d.entries()[source], &alphabet, cfg, &mut rng)?;
        if h.outcome == Outcome::Replaced && seen.insert(h.entry.clone()) {
            out.push((source, h.entry));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// LCS length by exhaustive subsequence enumeration of the shorter string.
    fn brute_lcs_len(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let is_subseq = |s: &[char], t: &[char]| {
            let mut it = t.iter();
            s.iter().all(|c| it.any(|d| d == c))
        };
        let mut best = 0;
        for mask in 0u32..(1 << a.len()) {
            let sub: Vec<char> = (0..a.len()).filter(|i| mask & (1 << i) != 0).map(|i| a[i]).collect();
            if sub.len() > best && is_subseq(&sub, &b) {
                best = sub.len();
            }
        }
        best
    }

    fn check_alignment_invariants(lemma: &str, form: &str) {
        let al = align(lemma, form);
        let lemma_cat: String = al.segments.iter().map(|s| s.lemma.as_str()).collect();
        let form_cat: String = al.segments.iter().map(|s| s.form.as_str()).collect();
        assert_eq!(lemma_cat, lemma);
        assert_eq!(form_cat, form);
        let shared: usize = al.shared().map(Segment::len).sum();
        assert_eq!(shared, brute_lcs_len(lemma, form), "{lemma} {form}");
        for s in al.shared() {
            assert_eq!(s.lemma, s.form);
        }
    }

    #[test]
    fn align_examples() {
        let al = align("walk", "walked");
        assert_eq!(al.segments.len(), 2);
        assert!(al.segments[0].shared && al.segments[0].lemma == "walk");
        assert_eq!(al.non_shared(), vec![("", "ed")]);

        let al = align("abc", "xyz");
        assert_eq!(al.segments.len(), 1);
        assert_eq!(al.non_shared(), vec![("abc", "xyz")]);

        let al = align("x", "x");
        assert_eq!(al.segments.len(), 1);
        assert!(al.segments[0].shared);

        for (l, f) in [
            ("walk", "walked"),
            ("singen", "gesungen"),
            ("understand", "understood"),
            ("abcabc", "cbacba"),
            ("ka42", "ka4"),
        ] {
            check_alignment_invariants(l, f);
        }
    }

    fn entry(l: &str, f: &str, t: &str) -> Entry {
        Entry::triple(l, f, t).unwrap()
    }

    #[test]
    fn replaces_stem_and_keeps_affixes() {
        let e = entry("walking", "walked", "V;PST");
        let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz".chars().collect();
        let mut rng = SplitMix64::new(42);
        let h = hallucinate_entry(&e, &alphabet, &HallucinationConfig::default(), &mut rng).unwrap();
        assert_eq!(h.outcome, Outcome::Replaced);
        let (l, f) = (&h.entry.lemma, h.entry.form().unwrap());
        assert_eq!(l.chars().count(), 7);
        assert_eq!(f.chars().count(), 6);
        assert_eq!(&l[..4], &f[..4]);
        assert!(l.ends_with("ing") && f.ends_with("ed"));
        assert_eq!(align(l, f).non_shared(), align("walking", "walked").non_shared());
        assert_eq!(h.entry.bundle, e.bundle);

        let mut again = SplitMix64::new(42);
        let h2 = hallucinate_entry(&e, &alphabet, &HallucinationConfig::default(), &mut again).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn below_threshold_is_unchanged() {
        let e = entry("go", "went", "V;PST");
        let h = hallucinate_entry(&e, &['a'], &HallucinationConfig::default(), &mut SplitMix64::new(0)).unwrap();
        assert_eq!(h.outcome, Outcome::BelowThreshold);
        assert_eq!(h.entry, e);
    }

    #[test]
    fn empty_alphabet_and_bad_config() {
        let e = entry("walk", "walked", "V");
        assert_eq!(
            hallucinate_entry(&e, &[], &HallucinationConfig::default(), &mut SplitMix64::new(0)),
            Err(HallucinationError::EmptyAlphabet)
        );
        let cfg = HallucinationConfig {
            min_shared_len: 1,
            ..HallucinationConfig::default()
        };
        assert!(hallucinate_entry(&e, &['a'], &cfg, &mut SplitMix64::new(0)).is_err());
    }

    #[test]
    fn jitter_changes_length_by_at_most_one() {
        let e = entry("abcdefgh", "abcdefghxy", "V");
        let cfg = HallucinationConfig {
            preserve_length: false,
            ..HallucinationConfig::default()
        };
        let alphabet: Vec<char> = "abcdefghxy".chars().collect();
        let mut rng = SplitMix64::new(1);
        let mut lens = HashSet::new();
        for _ in 0..50 {
            let h = hallucinate_entry(&e, &alphabet, &cfg, &mut rng).unwrap();
            if h.outcome == Outcome::Replaced {
                let l = h.entry.lemma.chars().count();
                assert!((7..=9).contains(&l));
                assert_eq!(h.entry.form().unwrap().chars().count(), l + 2);
                lens.insert(l);
            }
        }
        assert!(lens.len() > 1);
    }

    fn regular() -> Dataset {
        Dataset::new(
            "x",
            ["talk", "walk", "jump", "climb", "paint"]
                .iter()
                .flat_map(|l| {
                    [entry(l, &format!("{l}ed"), "V;PST"), entry(l, &format!("{l}ing"), "V;V.PTCP;PRS")]
                })
                .collect(),
        )
    }

    #[test]
    fn augment_examples() {
        let d = regular();
        let zero = augment(&d, &HallucinationConfig::default()).unwrap();
        assert!(zero.is_empty());

        let cfg = HallucinationConfig {
            target_count: 50,
            seed: 3,
            ..HallucinationConfig::default()
        };
        let out = augment(&d, &cfg).unwrap();
        assert_eq!(out.len(), 50);
        let real: HashSet<&Entry> = d.iter().collect();
        let bundles: HashSet<String> = d.iter().map(|e| e.bundle.to_string()).collect();
        let mut uniq = HashSet::new();
        for e in &out {
            assert!(!real.contains(e));
            assert!(bundles.contains(&e.bundle.to_string()));
            assert!(uniq.insert(e));
        }
        assert_eq!(augment(&d, &cfg).unwrap(), out);

        let suppletive = Dataset::new("x", vec![entry("go", "went", "V;PST"), entry("be", "was", "V;PST")]);
        assert_eq!(
            augment(&suppletive, &cfg),
            Err(HallucinationError::NothingHallucinable { min_shared_len: 4 })
        );
    }
}
