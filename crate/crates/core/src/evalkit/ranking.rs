use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bootstrap::paired_bootstrap_on;
pub use super::bootstrap::Metric;
use super::{BootstrapConfig, EvalError, ItemScores};
use crate::rng::derive_seed;

/// How a candidate is admitted to the current significance tier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tiering {
    /// Not significantly different from the tier's leader.
    #[default]
    Leader,
    /// Not significantly different from any member of the tier.
    Pairwise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanguageRanking {
    /// Systems from best to worst by the metric.
    pub order: Vec<String>,
    pub tiers: Vec<Vec<String>>,
    pub ranks: BTreeMap<String, u32>,
    /// Every test run while forming tiers: (leader or member, candidate, p).
    pub tests: Vec<(String, String, f64)>,
}

/// Seed for one system pair, independent of argument order.
fn pair_seed(seed: u64, a: &str, b: &str) -> u64 {
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    derive_seed(seed, &format!("{x}\u{1f}{y}"))
}

pub fn rank_language(
    runs: &BTreeMap<String, ItemScores>,
    cfg: &BootstrapConfig,
    metric: Metric,
) -> Result<BTreeMap<String, u32>, EvalError> {
    Ok(rank_language_detailed(runs, cfg, metric, Tiering::Leader)?.ranks)
}

/// Groups systems into significance tiers and gives them competition ranks.
///
/// Systems are sorted by the metric (ties by name). The best unplaced system
/// opens a tier; each following system joins it while the bootstrap finds no
/// significant difference, and the first one that differs opens the next
/// tier. A tier that starts after `t` systems gets rank `t + 1`.
///
/// Each pair is tested with a seed derived from `cfg.seed` and the two
/// system names, so results do not depend on evaluation order.
pub fn rank_language_detailed(
    runs: &BTreeMap<String, ItemScores>,
    cfg: &BootstrapConfig,
    metric: Metric,
    tiering: Tiering,
) -> Result<LanguageRanking, EvalError> {
    cfg.validate()?;
    let mut order: Vec<(&String, i64)> = runs
        .iter()
        .map(|(name, s)| (name, metric.utilities(s).iter().sum::<i64>()))
        .collect();
    if order.is_empty() {
        return Err(EvalError::EmptySet);
    }
    order.sort_by(|(na, ua), (nb, ub)| ub.cmp(ua).then_with(|| na.cmp(nb)));
    let order: Vec<&String> = order.into_iter().map(|(n, _)| n).collect();

    let mut tests = Vec::new();
    let mut same = |x: &String, y: &String| -> Result<bool, EvalError> {
        let pair_cfg = BootstrapConfig {
            seed: pair_seed(cfg.seed, x, y),
            ..cfg.clone()
        };
        let r = paired_bootstrap_on(&runs[x], &runs[y], &pair_cfg, metric)?;
        tests.push((x.clone(), y.clone(), r.p));
        Ok(!r.significant)
    };

    let mut tiers: Vec<Vec<String>> = Vec::new();
    for name in &order {
        let joins = match tiers.last() {
            None => false,
            Some(tier) => match tiering {
                Tiering::Leader => same(&tier[0], name)?,
                Tiering::Pairwise => {
                    let mut all = true;
                    for member in tier {
                        if !same(member, name)? {
                            all = false;
                            break;
                        }
                    }
                    all
                }
            },
        };
        if joins {
            tiers.last_mut().expect("tier exists").push((*name).clone());
        } else {
            tiers.push(vec![(*name).clone()]);
        }
    }

    let mut ranks = BTreeMap::new();
    let mut placed = 0u32;
    for tier in &tiers {
        for name in tier {
            ranks.insert(name.clone(), placed + 1);
        }
        placed += tier.len() as u32;
    }
    Ok(LanguageRanking {
        order: order.into_iter().cloned().collect(),
        tiers,
        ranks,
        tests,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub per_language: BTreeMap<String, BTreeMap<String, u32>>,
    /// Position `r` holds the number of languages where the system ranked `r + 1`.
    pub count_vectors: BTreeMap<String, Vec<u32>>,
    pub final_order: Vec<String>,
    /// Competition position in the final order; equal count vectors share one.
    pub final_positions: BTreeMap<String, u32>,
    pub mean_rank: BTreeMap<String, f64>,
}

impl RankTable {
    /// Systems grouped by shared final position, best first.
    pub fn final_groups(&self) -> Vec<Vec<String>> {
        let mut groups: Vec<Vec<String>> = Vec::new();
        let mut last = None;
        for name in &self.final_order {
            let pos = self.final_positions[name];
            if last == Some(pos) {
                groups.last_mut().expect("group exists").push(name.clone());
            } else {
                groups.push(vec![name.clone()]);
                last = Some(pos);
            }
        }
        groups
    }
}

/// Combines per-language ranks into one ordering by how often each system
/// placed first, then second, and so on. Identical count vectors stay tied;
/// for display they are ordered by `mean_accuracy` (when given) and name.
pub fn aggregate_ranks(
    per_language: &BTreeMap<String, BTreeMap<String, u32>>,
    mean_accuracy: Option<&BTreeMap<String, f64>>,
) -> Result<RankTable, EvalError> {
    let systems: BTreeSet<&String> = per_language.values().flat_map(|r| r.keys()).collect();
    if systems.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let width = per_language
        .values()
        .flat_map(|r| r.values())
        .copied()
        .max()
        .unwrap_or(1)
        .max(systems.len() as u32) as usize;

    let mut count_vectors = BTreeMap::new();
    let mut mean_rank = BTreeMap::new();
    for system in &systems {
        let mut counts = vec![0u32; width];
        let mut total = 0u64;
        for (language, ranks) in per_language {
            let rank = *ranks.get(*system).ok_or_else(|| EvalError::MissingLanguage {
                system: (*system).clone(),
                language: language.clone(),
            })?;
            counts[rank as usize - 1] += 1;
            total += u64::from(rank);
        }
        count_vectors.insert((*system).clone(), counts);
        mean_rank.insert((*system).clone(), total as f64 / per_language.len() as f64);
    }

    let acc = |s: &String| mean_accuracy.and_then(|m| m.get(s)).copied().unwrap_or(0.0);
    let mut final_order: Vec<String> = systems.into_iter().cloned().collect();
    final_order.sort_by(|a, b| {
        count_vectors[b]
            .cmp(&count_vectors[a])
            .then_with(|| acc(b).total_cmp(&acc(a)))
            .then_with(|| a.cmp(b))
    });
    let mut final_positions = BTreeMap::new();
    for (i, name) in final_order.iter().enumerate() {
        let pos = match i {
            0 => 1,
            _ if count_vectors[name] == count_vectors[&final_order[i - 1]] => {
                final_positions[&final_order[i - 1]]
            }
            _ => i as u32 + 1,
        };
        final_positions.insert(name.clone(), pos);
    }
    Ok(RankTable {
        per_language: per_language.clone(),
        count_vectors,
        final_order,
        final_positions,
        mean_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(n_correct: usize, n: usize) -> ItemScores {
        ItemScores::from_correct(&(0..n).map(|i| i < n_correct).collect::<Vec<_>>())
    }

    fn runs(spec: &[(&str, usize)], n: usize) -> BTreeMap<String, ItemScores> {
        spec.iter().map(|(s, c)| (s.to_string(), scores(*c, n))).collect()
    }

    #[test]
    fn single_system_ranks_first() {
        let r = rank_language(&runs(&[("only", 3)], 10), &BootstrapConfig::default(), Metric::Accuracy).unwrap();
        assert_eq!(r["only"], 1);
    }

    #[test]
    fn competition_numbering() {
        let r = rank_language(
            &runs(&[("a", 900), ("b", 900), ("c", 500), ("d", 500), ("e", 500), ("f", 100)], 1000),
            &BootstrapConfig::with_seed(5),
            Metric::Accuracy,
        )
        .unwrap();
        let mut got: Vec<u32> = r.values().copied().collect();
        got.sort();
        assert_eq!(got, vec![1, 1, 3, 3, 3, 6]);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(
            rank_language(&BTreeMap::new(), &BootstrapConfig::default(), Metric::Accuracy),
            Err(EvalError::EmptySet)
        );
    }

    #[test]
    fn leader_vs_pairwise() {
        // b is indistinguishable from a, c from b but not from a.
        let n = 400;
        let mut rs = BTreeMap::new();
        rs.insert("a".to_string(), scores(300, n));
        rs.insert("b".to_string(), scores(292, n));
        rs.insert("c".to_string(), scores(284, n));
        let cfg = BootstrapConfig::with_seed(1);
        let leader = rank_language_detailed(&rs, &cfg, Metric::Accuracy, Tiering::Leader).unwrap();
        let pairwise = rank_language_detailed(&rs, &cfg, Metric::Accuracy, Tiering::Pairwise).unwrap();
        // Nested correctness vectors: a-c differ on 16 items, all in a's favour.
        assert_eq!(leader.ranks["a"], 1);
        assert!(pairwise.tiers.len() >= leader.tiers.len());
    }

    fn table(rows: &[(&str, &[(&str, u32)])]) -> BTreeMap<String, BTreeMap<String, u32>> {
        rows.iter()
            .map(|(lang, r)| {
                (
                    lang.to_string(),
                    r.iter().map(|(s, k)| (s.to_string(), *k)).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn aggregation_by_count_vectors() {
        let t = table(&[
            ("l1", &[("x", 1), ("y", 2), ("z", 3)]),
            ("l2", &[("x", 3), ("y", 1), ("z", 1)]),
        ]);
        let agg = aggregate_ranks(&t, None).unwrap();
        assert_eq!(agg.count_vectors["x"], vec![1, 0, 1]);
        assert_eq!(agg.count_vectors["y"], vec![1, 1, 0]);
        // y and z: y has a 2nd place where z has a 3rd.
        assert_eq!(agg.final_order, vec!["y", "x", "z"]);
        assert_eq!(agg.mean_rank["x"], 2.0);
    }

    #[test]
    fn one_language_and_full_ties() {
        let t = table(&[("l1", &[("x", 1), ("y", 1), ("z", 3)])]);
        let agg = aggregate_ranks(&t, None).unwrap();
        assert_eq!(agg.final_order, vec!["x", "y", "z"]);
        assert_eq!(agg.final_groups(), vec![vec!["x", "y"], vec!["z"]]);

        let t = table(&[("l1", &[("x", 1), ("y", 1)]), ("l2", &[("x", 1), ("y", 1)])]);
        let agg = aggregate_ranks(&t, None).unwrap();
        assert_eq!(agg.final_groups().len(), 1);
        assert!(agg.final_positions.values().all(|&p| p == 1));
    }

    #[test]
    fn missing_language() {
        let t = table(&[("l1", &[("x", 1), ("y", 2)]), ("l2", &[("x", 1)])]);
        assert_eq!(
            aggregate_ranks(&t, None),
            Err(EvalError::MissingLanguage {
                system: "y".into(),
                language: "l2".into()
            })
        );
    }

    #[test]
    fn display_ties_use_accuracy_then_name() {
        let t = table(&[("l1", &[("a", 1), ("b", 1)])]);
        let acc: BTreeMap<String, f64> = [("a".to_string(), 0.5), ("b".to_string(), 0.7)].into();
        let agg = aggregate_ranks(&t, Some(&acc)).unwrap();
        assert_eq!(agg.final_order, vec!["b", "a"]);
        assert_eq!(agg.final_positions["a"], 1);
    }
}
