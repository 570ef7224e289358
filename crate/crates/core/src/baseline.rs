//! Non-neural reinflection baseline.
//!
//! Every training pair is split around its longest common substring (the
//! stem) into a prefix change and a ladder of suffix changes of increasing
//! context. Rules are counted per feature bundle; at prediction time the
//! most specific applicable suffix rule is applied, followed by the most
//! frequent applicable prefix rule.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evalkit::SystemRun;
use crate::unimorph::{Dataset, Entry, FeatureBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

/// Rewrite of a word edge: `input_affix` is replaced by `output_affix`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffixRule {
    pub kind: AffixKind,
    #[serde(rename = "in")]
    pub input_affix: String,
    #[serde(rename = "out")]
    pub output_affix: String,
}

impl AffixRule {
    pub fn prefix(input: &str, output: &str) -> Self {
        AffixRule {
            kind: AffixKind::Prefix,
            input_affix: input.to_owned(),
            output_affix: output.to_owned(),
        }
    }

    pub fn suffix(input: &str, output: &str) -> Self {
        AffixRule {
            kind: AffixKind::Suffix,
            input_affix: input.to_owned(),
            output_affix: output.to_owned(),
        }
    }

    pub fn applies_to(&self, word: &str) -> bool {
        match self.kind {
            AffixKind::Prefix => word.starts_with(&self.input_affix),
            AffixKind::Suffix => word.ends_with(&self.input_affix),
        }
    }

    /// Rewrites `word`, or returns `None` when the rule does not match.
    pub fn apply(&self, word: &str) -> Option<String> {
        match self.kind {
            AffixKind::Prefix => word
                .strip_prefix(self.input_affix.as_str())
                .map(|rest| format!("{}{rest}", self.output_affix)),
            AffixKind::Suffix => word
                .strip_suffix(self.input_affix.as_str())
                .map(|rest| format!("{rest}{}", self.output_affix)),
        }
    }
}

impl fmt::Display for AffixRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AffixKind::Prefix => write!(f, "{}* -> {}*", self.input_affix, self.output_affix),
            AffixKind::Suffix => write!(f, "*{} -> *{}", self.input_affix, self.output_affix),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedRules {
    pub prefix: AffixRule,
    /// Ordered from least to most specific (shortest to longest input).
    pub suffixes: Vec<AffixRule>,
}

/// Longest common contiguous substring of `a` and `b` as char ranges
/// `(start_in_a, start_in_b, len)`. Ties prefer the leftmost start in `a`,
/// then the leftmost start in `b`.
pub fn longest_common_substring(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    // prev[j] = length of the common run ending at a[i-1], b[j-1]
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            cur[j] = if a[i - 1] == b[j - 1] { prev[j - 1] + 1 } else { 0 };
            let len = cur[j];
            if len == 0 {
                continue;
            }
            let cand = (i - len, j - len, len);
            if len > best.2 || (len == best.2 && (cand.0, cand.1) < (best.0, best.1)) {
                best = cand;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Splits a lemma/form pair into its prefix rule and suffix-rule ladder.
pub fn extract_rules(lemma: &str, form: &str) -> ExtractedRules {
    let l: Vec<char> = lemma.chars().collect();
    let f: Vec<char> = form.chars().collect();
    let (ls, fs, len) = longest_common_substring(&l, &f);
    if len == 0 {
        return ExtractedRules {
            prefix: AffixRule::prefix("", ""),
            suffixes: vec![AffixRule::suffix(lemma, form)],
        };
    }
    let text = |cs: &[char]| cs.iter().collect::<String>();
    let prefix = AffixRule::prefix(&text(&l[..ls]), &text(&f[..fs]));
    let lemma_tail = &l[ls + len..];
    let form_tail = &f[fs + len..];
    let stem = &l[ls..ls + len];
    let suffixes = (0..=len)
        .rev()
        .map(|k| {
            let ctx = text(&stem[k..]);
            AffixRule::suffix(
                &format!("{ctx}{}", text(lemma_tail)),
                &format!("{ctx}{}", text(form_tail)),
            )
        })
        .collect();
    ExtractedRules { prefix, suffixes }
}

/// How competing applicable suffix rules are ranked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionOrder {
    /// Longest input affix, then frequency.
    #[default]
    LongestFirst,
    /// Frequency, then longest input affix.
    FrequencyFirst,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleTable {
    pub prefix: BTreeMap<(String, String), u64>,
    pub suffix: BTreeMap<(String, String), u64>,
}

impl RuleTable {
    fn add(&mut self, rules: &ExtractedRules) {
        let p = &rules.prefix;
        *self
            .prefix
            .entry((p.input_affix.clone(), p.output_affix.clone()))
            .or_insert(0) += 1;
        for s in &rules.suffixes {
            *self
                .suffix
                .entry((s.input_affix.clone(), s.output_affix.clone()))
                .or_insert(0) += 1;
        }
    }
}

/// Per-bundle rule frequencies learned from a training set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleModel {
    pub by_bundle: BTreeMap<FeatureBundle, RuleTable>,
    pub training_size: usize,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training entry {index} has no form")]
    MissingForm { index: usize },
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub fn train(d: &Dataset) -> Result<RuleModel, ModelError> {
    let mut model = RuleModel {
        by_bundle: BTreeMap::new(),
        training_size: d.len(),
    };
    for (index, e) in d.iter().enumerate() {
        let form = e.form().ok_or(ModelError::MissingForm { index })?;
        let rules = extract_rules(&e.lemma, form);
        model.by_bundle.entry(e.bundle.clone()).or_default().add(&rules);
    }
    Ok(model)
}

fn pick_suffix<'a>(
    table: &'a BTreeMap<(String, String), u64>,
    word: &str,
    order: SelectionOrder,
) -> Option<&'a (String, String)> {
    table
        .iter()
        .filter(|((input, _), _)| word.ends_with(input.as_str()))
        .min_by(|((ia, oa), fa), ((ib, ob), fb)| {
            let by_len = ib.chars().count().cmp(&ia.chars().count());
            let by_freq = fb.cmp(fa);
            let primary = match order {
                SelectionOrder::LongestFirst => by_len.then(by_freq),
                SelectionOrder::FrequencyFirst => by_freq.then(by_len),
            };
            primary.then_with(|| oa.cmp(ob))
        })
        .map(|(k, _)| k)
}

fn pick_prefix<'a>(
    table: &'a BTreeMap<(String, String), u64>,
    word: &str,
) -> Option<&'a (String, String)> {
    table
        .iter()
        .filter(|((input, _), _)| word.starts_with(input.as_str()))
        .min_by(|((ia, oa), fa), ((ib, ob), fb)| {
            fb.cmp(fa)
                .then_with(|| ib.chars().count().cmp(&ia.chars().count()))
                .then_with(|| oa.cmp(ob))
        })
        .map(|(k, _)| k)
}

impl RuleModel {
    pub fn predict(&self, lemma: &str, bundle: &FeatureBundle) -> String {
        self.predict_with(lemma, bundle, SelectionOrder::LongestFirst)
    }

    /// Applies the selected suffix rule, then the selected prefix rule.
    /// Unseen bundles, or bundles with no applicable rule, leave the lemma
    /// unchanged.
    pub fn predict_with(&self, lemma: &str, bundle: &FeatureBundle, order: SelectionOrder) -> String {
        let Some(table) = self.by_bundle.get(bundle) else {
            return lemma.to_owned();
        };
        let mut word = lemma.to_owned();
        if let Some((input, output)) = pick_suffix(&table.suffix, &word, order) {
            word = format!("{}{output}", &word[..word.len() - input.len()]);
        }
        if let Some((input, output)) = pick_prefix(&table.prefix, &word) {
            word = format!("{output}{}", &word[input.len()..]);
        }
        word
    }

    pub fn predict_dataset(&self, system: &str, blind: &Dataset, order: SelectionOrder) -> SystemRun {
        SystemRun {
            system: system.to_owned(),
            language: blind.language().to_owned(),
            predictions: blind
                .iter()
                .map(|e| self.predict_with(&e.lemma, &e.bundle, order))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        let file = ModelFile::from(self);
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// Output of [`RuleModel::predict_dataset`] as predicted triples.
pub fn run_to_dataset(blind: &Dataset, run: &SystemRun) -> Dataset {
    Dataset::new(
        blind.language(),
        blind
            .iter()
            .zip(&run.predictions)
            .map(|(e, p)| Entry {
                lemma: e.lemma.clone(),
                form: Some(p.clone()),
                bundle: e.bundle.clone(),
            })
            .collect(),
    )
}

pub const MODEL_FORMAT: &str = "reinflect-affix-rules";
pub const MODEL_VERSION: u32 = 1;

/// On-disk JSON layout, version 1:
///
/// ```json
/// {"format": "reinflect-affix-rules", "version": 1, "language": "eng",
///  "training_size": 3,
///  "bundles": [{"bundle": "V;PST",
///               "prefix": [{"in": "", "out": "", "count": 3}],
///               "suffix": [{"in": "", "out": "ed", "count": 3}, ...]}]}
/// ```
///
/// Bundles and rules are listed in sorted order so the file is stable.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    training_size: usize,
    bundles: Vec<BundleRules>,
}

#[derive(Serialize, Deserialize)]
struct BundleRules {
    bundle: FeatureBundle,
    prefix: Vec<CountedRule>,
    suffix: Vec<CountedRule>,
}

#[derive(Serialize, Deserialize)]
struct CountedRule {
    #[serde(rename = "in")]
    input: String,
    #[serde(rename = "out")]
    output: String,
    count: u64,
}

fn counted(table: &BTreeMap<(String, String), u64>) -> Vec<CountedRule> {
    table
        .iter()
        .map(|((i, o), &count)| CountedRule {
            input: i.clone(),
            output: o.clone(),
            count,
        })
        .collect()
}

fn uncounted(rules: Vec<CountedRule>) -> Result<BTreeMap<(String, String), u64>, ModelError> {
    let mut table = BTreeMap::new();
    for r in rules {
        if r.count == 0 {
            return Err(ModelError::Format(format!("rule {:?} has count 0", r.input)));
        }
        if table.insert((r.input, r.output), r.count).is_some() {
            return Err(ModelError::Format("rule listed twice".into()));
        }
    }
    Ok(table)
}

impl From<&RuleModel> for ModelFile {
    fn from(m: &RuleModel) -> Self {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            training_size: m.training_size,
            bundles: m
                .by_bundle
                .iter()
                .map(|(b, t)| BundleRules {
                    bundle: b.clone(),
                    prefix: counted(&t.prefix),
                    suffix: counted(&t.suffix),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelFile> for RuleModel {
    type Error = ModelError;

    fn try_from(f: ModelFile) -> Result<Self, ModelError> {
        if f.format != MODEL_FORMAT || f.version != MODEL_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported model {} v{}",
                f.format, f.version
            )));
        }
        let mut by_bundle = BTreeMap::new();
        for b in f.bundles {
            let table = RuleTable {
                prefix: uncounted(b.prefix)?,
                suffix: uncounted(b.suffix)?,
            };
            if by_bundle.insert(b.bundle, table).is_some() {
                return Err(ModelError::Format("bundle listed twice".into()));
            }
        }
        Ok(RuleModel {
            by_bundle,
            training_size: f.training_size,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive longest-common-substring oracle: try every substring of
    /// `a` in (start, length) order and look for it anywhere in `b`.
    fn brute_lcs(a: &str, b: &str) -> (usize, usize, usize) {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut best = (0, 0, 0);
        for len in (1..=a.len().min(b.len())).rev() {
            for i in 0..=a.len() - len {
                for j in 0..=b.len() - len {
                    if a[i..i + len] == b[j..j + len] {
                        return (i, j, len);
                    }
                }
            }
            best = (0, 0, 0);
        }
        best
    }

    fn suffix_pairs(r: &ExtractedRules) -> Vec<(String, String)> {
        r.suffixes
            .iter()
            .map(|s| (s.input_affix.clone(), s.output_affix.clone()))
            .collect()
    }

    #[test]
    fn lcs_matches_brute_force() {
        for (a, b) in [
            ("understand", "understood"),
            ("walk", "walked"),
            ("abcab", "cabab"),
            ("gehen", "gegangen"),
            ("xyz", "abc"),
            ("ka42", "ka4"),
        ] {
            let ac: Vec<char> = a.chars().collect();
            let bc: Vec<char> = b.chars().collect();
            assert_eq!(longest_common_substring(&ac, &bc), brute_lcs(a, b), "{a} {b}");
        }
    }

    #[test]
    fn understand_understood() {
        assert_eq!(brute_lcs("understand", "understood"), (0, 0, 7));
        let r = extract_rules("understand", "understood");
        assert_eq!(r.prefix, AffixRule::prefix("", ""));
        let expected: Vec<(String, String)> = (0..=7)
            .rev()
            .map(|k| {
                let ctx = &"underst"[k..];
                (format!("{ctx}and"), format!("{ctx}ood"))
            })
            .collect();
        assert_eq!(suffix_pairs(&r), expected);
        assert_eq!(r.suffixes[0], AffixRule::suffix("and", "ood"));
        assert_eq!(r.suffixes[1], AffixRule::suffix("tand", "tood"));
        assert_eq!(r.suffixes[7], AffixRule::suffix("understand", "understood"));
    }

    #[test]
    fn walk_walked() {
        let r = extract_rules("walk", "walked");
        let want = [("", "ed"), ("k", "ked"), ("lk", "lked"), ("alk", "alked"), ("walk", "walked")];
        assert_eq!(
            suffix_pairs(&r),
            want.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>()
        );
    }

    #[test]
    fn identity_and_disjoint_pairs() {
        let r = extract_rules("x", "x");
        assert_eq!(suffix_pairs(&r), vec![("".into(), "".into()), ("x".into(), "x".into())]);
        let r = extract_rules("go", "went");
        assert_eq!(r.prefix, AffixRule::prefix("", ""));
        assert_eq!(r.suffixes, vec![AffixRule::suffix("go", "went")]);
    }

    #[test]
    fn prefix_change_is_extracted() {
        let r = extract_rules("spielen", "gespielt");
        assert_eq!(r.prefix, AffixRule::prefix("", "ge"));
        assert_eq!(r.suffixes[0], AffixRule::suffix("en", "t"));
    }

    fn ds(rows: &[(&str, &str, &str)]) -> Dataset {
        Dataset::new(
            "x",
            rows.iter()
                .map(|(l, f, t)| Entry::triple(l, f, t).unwrap())
                .collect(),
        )
    }

    #[test]
    fn training_tallies_per_bundle() {
        let m = train(&ds(&[
            ("walk", "walked", "V;PST"),
            ("jump", "jumped", "V;PST"),
            ("play", "played", "V;PST"),
        ]))
        .unwrap();
        let t = &m.by_bundle[&"V;PST".parse().unwrap()];
        assert_eq!(t.suffix[&("".into(), "ed".into())], 3);
        assert_eq!(m.training_size, 3);

        let empty = train(&Dataset::empty("x")).unwrap();
        assert!(empty.by_bundle.is_empty());
        assert_eq!(empty.training_size, 0);

        let two = train(&ds(&[("walk", "walked", "V;PST"), ("cat", "cats", "N;PL")])).unwrap();
        assert_eq!(two.by_bundle.len(), 2);
        let n = &two.by_bundle[&"N;PL".parse().unwrap()];
        assert!(n.suffix.keys().all(|(i, _)| i.is_empty() || "cat".ends_with(i.as_str())));
    }

    #[test]
    fn predict_examples() {
        let pst: FeatureBundle = "V;PST".parse().unwrap();
        let m = train(&ds(&[("walk", "walked", "V;PST")])).unwrap();
        // Hand trace: only "" -> "ed" applies to "jump"; prefix "" -> "".
        assert_eq!(m.predict("jump", &pst), "jumped");
        assert_eq!(m.predict("jump", &"N;PL".parse().unwrap()), "jump");

        let m = train(&ds(&[("understand", "understood", "V;PST")])).unwrap();
        assert_eq!(m.predict("understand", &pst), "understood");
        // "stand" matches the rungs up to "stand" -> "stood".
        assert_eq!(m.predict("stand", &pst), "stood");
        assert_eq!(m.predict("xyz", &pst), "xyz");
    }

    #[test]
    fn frequency_first_flips_the_choice() {
        let pst: FeatureBundle = "V;PST".parse().unwrap();
        let m = train(&ds(&[
            ("sing", "sang", "V;PST"),
            ("walk", "walked", "V;PST"),
            ("talk", "talked", "V;PST"),
            ("bring", "brought", "V;PST"),
        ]))
        .unwrap();
        // Hand trace. sing/sang splits around "ng" (prefix si -> sa);
        // bring/brought around "br", giving suffix rungs "ing", "ring",
        // "bring". Longest applicable to "ring" is "ring" -> "rought", and
        // the prefix table is dominated by "" -> "" (count 3).
        assert_eq!(m.predict_with("ring", &pst, SelectionOrder::LongestFirst), "rought");
        // Frequency first: "" -> "ed" has count 2.
        assert_eq!(m.predict_with("ring", &pst, SelectionOrder::FrequencyFirst), "ringed");
    }

    #[test]
    fn predict_dataset_keeps_order() {
        let m = train(&ds(&[("walk", "walked", "V;PST")])).unwrap();
        let blind = ds(&[("b", "-", "V;PST"), ("a", "-", "N")]).blind();
        let run = m.predict_dataset("baseline", &blind, SelectionOrder::default());
        assert_eq!(run.predictions, vec!["bed".to_string(), "a".to_string()]);
        let empty = m.predict_dataset("baseline", &Dataset::empty("x"), SelectionOrder::default());
        assert!(empty.predictions.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let m = train(&ds(&[
            ("walk", "walked", "V;PST"),
            ("spielen", "gespielt", "V.PTCP;PST"),
        ]))
        .unwrap();
        let text = m.to_json().unwrap();
        assert!(text.contains("\"format\": \"reinflect-affix-rules\""));
        assert_eq!(RuleModel::from_json(&text).unwrap(), m);
        assert!(RuleModel::from_json("{\"format\":\"x\",\"version\":1,\"training_size\":0,\"bundles\":[]}").is_err());
    }
}
