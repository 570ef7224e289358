//! evaluate, rank, oracle, difficulty

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use reinflect::evalkit::{
    accuracy, aggregate_ranks, difficulty as buckets_of, difficulty_histogram, mean_distance, oracle as union_oracle,
    rank_language_detailed, score_run, BootstrapConfig, Difficulty, EvalError, ItemScores, Metric, SystemRun, Tiering,
};
use reinflect::rng::derive_seed;
use serde_json::json;

use crate::io::{discover, emit, load, usage, Forms, Loaded};
use crate::manifest::default_location;
use crate::{Ctx, Done};

#[derive(Args)]
pub struct SystemArgs {
    /// Directory of gold `<lang>.<ext>` files
    #[arg(long)]
    gold: PathBuf,
    /// One system's prediction directory, as DIR or NAME=DIR (repeatable)
    #[arg(long = "pred", value_name = "[NAME=]DIR")]
    preds: Vec<String>,
    /// Directory whose subdirectories are system prediction directories
    #[arg(long, value_name = "DIR")]
    pred_root: Option<PathBuf>,
    /// File extension of gold and prediction files
    #[arg(long, default_value = "tst")]
    ext: String,
    /// Only these languages (comma-separated)
    #[arg(long, value_delimiter = ',')]
    languages: Vec<String>,
}

struct Scored {
    language: String,
    gold: Loaded,
    /// Aligned with the system list; `None` where a system has no file.
    cells: Vec<Option<ItemScores>>,
}

struct Scores {
    systems: Vec<String>,
    rows: Vec<Scored>,
}

fn system_dirs(args: &SystemArgs) -> Result<Vec<(String, PathBuf)>> {
    let mut out: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut add = |name: String, dir: PathBuf| {
        if out.insert(name.clone(), dir).is_some() {
            return Err(usage(format!("system {name} given twice")));
        }
        Ok(())
    };
    for p in &args.preds {
        let (name, dir) = match p.split_once('=') {
            Some((n, d)) => (n.to_owned(), PathBuf::from(d)),
            None => {
                let dir = PathBuf::from(p);
                let name = dir
                    .file_name()
                    .and_then(|n| n.to_str())
                    .ok_or_else(|| usage(format!("cannot name system directory {p}")))?
                    .to_owned();
                (name, dir)
            }
        };
        add(name, dir)?;
    }
    if let Some(root) = &args.pred_root {
        let mut subdirs: Vec<PathBuf> = std::fs::read_dir(root)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        subdirs.retain(|p| p.is_dir());
        subdirs.sort();
        for dir in subdirs {
            let name = dir.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_owned();
            add(name, dir)?;
        }
    }
    if out.is_empty() {
        return Err(usage("no systems: give --pred or --pred-root"));
    }
    Ok(out.into_iter().collect())
}

fn score_file(ctx: &Ctx, gold: &Loaded, system: &str, path: &Path) -> Result<ItemScores> {
    let lang = gold.data.language();
    let pred = load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?;
    if pred.data.len() != gold.data.len() {
        let e = EvalError::SizeMismatch {
            expected: gold.data.len(),
            found: pred.data.len(),
        };
        return Err(anyhow!("{}: {e} (gold {})", path.display(), gold.path.display()));
    }
    for (i, (g, p)) in gold.data.iter().zip(pred.data.iter()).enumerate() {
        if g.lemma != p.lemma {
            return Err(anyhow!(
                "{}: lemma {:?} does not match gold {:?} at {}",
                pred.at(i),
                p.lemma,
                g.lemma,
                gold.at(i)
            ));
        }
    }
    let run = SystemRun {
        system: system.to_owned(),
        language: lang.to_owned(),
        predictions: pred.data.iter().map(|e| e.form().unwrap_or_default().to_owned()).collect(),
    };
    score_run(&gold.data, &run).map_err(|e| match e {
        EvalError::MissingGold { index } => anyhow!("{}: gold entry has no form", gold.at(index)),
        e => anyhow!("{}: {e}", path.display()),
    })
}

fn load_scores(ctx: &Ctx, args: &SystemArgs) -> Result<Scores> {
    let systems = system_dirs(args)?;
    let mut langs = discover(&args.gold, &args.ext)?;
    if !args.languages.is_empty() {
        let wanted: BTreeSet<&str> = args.languages.iter().map(String::as_str).collect();
        let have: BTreeSet<&str> = langs.iter().map(|(l, _)| l.as_str()).collect();
        if let Some(missing) = wanted.difference(&have).next() {
            return Err(anyhow!("{}: no gold file for language {missing}", args.gold.display()));
        }
        langs.retain(|(l, _)| wanted.contains(l.as_str()));
    }
    if langs.is_empty() {
        return Err(anyhow!("{}: no *.{} files", args.gold.display(), args.ext));
    }
    let rows = langs
        .par_iter()
        .map(|(lang, path)| -> Result<Scored> {
            let gold = load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?;
            let cells = systems
                .iter()
                .map(|(name, dir)| {
                    let p = dir.join(format!("{lang}.{}", args.ext));
                    if p.is_file() {
                        score_file(ctx, &gold, name, &p).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Scored {
                language: lang.clone(),
                gold,
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Scores {
        systems: systems.into_iter().map(|(n, _)| n).collect(),
        rows,
    })
}

impl Scores {
    /// Every system must have predictions for every language.
    fn require_complete(&self) -> Result<()> {
        for row in &self.rows {
            for (name, cell) in self.systems.iter().zip(&row.cells) {
                if cell.is_none() {
                    return Err(EvalError::MissingLanguage {
                        system: name.clone(),
                        language: row.language.clone(),
                    }
                    .into());
                }
            }
        }
        Ok(())
    }

    fn complete_row(&self, row: &Scored) -> BTreeMap<String, ItemScores> {
        self.systems
            .iter()
            .zip(&row.cells)
            .filter_map(|(n, c)| c.clone().map(|c| (n.clone(), c)))
            .collect()
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    systems: SystemArgs,
    /// Report TSV (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

pub const EVALUATE_HEADER: &str = "language\tsystem\tn\tcorrect\taccuracy\tmean_levenshtein";

pub fn evaluate(ctx: &Ctx, args: &EvaluateArgs) -> Result<Done> {
    let scores = load_scores(ctx, &args.systems)?;
    let mut text = format!("{EVALUATE_HEADER}\n");
    for row in &scores.rows {
        for (name, cell) in scores.systems.iter().zip(&row.cells) {
            match cell {
                Some(s) => writeln!(
                    text,
                    "{}\t{name}\t{}\t{}\t{}\t{:.3}",
                    row.language,
                    s.len(),
                    s.correct_count(),
                    pct(accuracy(s)?),
                    mean_distance(s)?
                )?,
                None => log::warn!("{name}: no predictions for {}", row.language),
            }
        }
    }
    emit(&ctx.files, args.output.as_deref(), &text)?;
    let mut done = Done::new(json!({ "ext": args.systems.ext }));
    done.manifest = args.output.as_deref().map(|p| default_location(p, "evaluate", false));
    Ok(done)
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Accuracy,
    Distance,
}

#[derive(Args)]
pub struct RankArgs {
    #[command(flatten)]
    systems: SystemArgs,
    /// Bootstrap settings as comma-separated key=value pairs:
    /// samples, ratio, alpha, seed
    #[arg(long, default_value = "")]
    config: String,
    #[arg(long, value_enum, default_value = "accuracy")]
    metric: MetricArg,
    /// Admit a system to a tier only if it ties with every member, not just the leader
    #[arg(long)]
    pairwise: bool,
    /// Per-language rank TSV (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the final table as TSV here
    #[arg(long)]
    final_table: Option<PathBuf>,
}

pub fn parse_bootstrap_config(spec: &str) -> Result<BootstrapConfig> {
    let mut cfg = BootstrapConfig::default();
    for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("--config: expected key=value, got {pair:?}")))?;
        let bad = || usage(format!("--config: bad value for {key}: {value:?}"));
        match key.trim() {
            "samples" => cfg.samples = value.trim().parse().map_err(|_| bad())?,
            "ratio" => cfg.ratio = value.trim().parse().map_err(|_| bad())?,
            "alpha" => cfg.alpha = value.trim().parse().map_err(|_| bad())?,
            "seed" => cfg.seed = value.trim().parse().map_err(|_| bad())?,
            other => return Err(usage(format!("--config: unknown key {other:?}"))),
        }
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

pub const RANK_HEADER: &str = "language\tsystem\taccuracy\tmean_levenshtein\ttier\trank";

pub fn rank(ctx: &Ctx, args: &RankArgs) -> Result<Done> {
    let cfg = parse_bootstrap_config(&args.config)?;
    let metric = match args.metric {
        MetricArg::Accuracy => Metric::Accuracy,
        MetricArg::Distance => Metric::Distance,
    };
    let tiering = if args.pairwise { Tiering::Pairwise } else { Tiering::Leader };
    let scores = load_scores(ctx, &args.systems)?;
    scores.require_complete()?;

    let rankings = scores
        .rows
        .par_iter()
        .map(|row| {
            let lang_cfg = BootstrapConfig {
                seed: derive_seed(cfg.seed, &row.language),
                ..cfg.clone()
            };
            let runs = scores.complete_row(row);
            rank_language_detailed(&runs, &lang_cfg, metric, tiering)
                .map(|r| (runs, r))
                .map_err(|e| anyhow!("{}: {e}", row.language))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_language = BTreeMap::new();
    let mut acc_sum: BTreeMap<String, f64> = BTreeMap::new();
    let mut text = format!("{RANK_HEADER}\n");
    for (row, (runs, ranking)) in scores.rows.iter().zip(&rankings) {
        for (t, tier) in ranking.tiers.iter().enumerate() {
            for name in tier {
                let s = &runs[name];
                let a = accuracy(s)?;
                *acc_sum.entry(name.clone()).or_default() += a;
                writeln!(
                    text,
                    "{}\t{name}\t{}\t{:.3}\t{}\t{}",
                    row.language,
                    pct(a),
                    mean_distance(s)?,
                    t + 1,
                    ranking.ranks[name]
                )?;
            }
        }
        per_language.insert(row.language.clone(), ranking.ranks.clone());
    }
    let n_lang = scores.rows.len() as f64;
    let mean_acc: BTreeMap<String, f64> = acc_sum.into_iter().map(|(k, v)| (k, v / n_lang)).collect();
    let table = aggregate_ranks(&per_language, Some(&mean_acc))?;

    let width = table.count_vectors.values().map(Vec::len).max().unwrap_or(0);
    let mut fin = String::from("position\tsystem");
    for r in 1..=width {
        write!(fin, "\t#{r}")?;
    }
    fin.push_str("\tmean_rank\tmean_accuracy\n");
    for name in &table.final_order {
        write!(fin, "{}\t{name}", table.final_positions[name])?;
        for c in &table.count_vectors[name] {
            write!(fin, "\t{c}")?;
        }
        writeln!(fin, "\t{:.2}\t{}", table.mean_rank[name], pct(mean_acc[name]))?;
    }

    emit(&ctx.files, args.output.as_deref(), &text)?;
    match &args.final_table {
        Some(p) => ctx.files.write(p, fin.as_bytes())?,
        None if args.output.is_some() => print!("{fin}"),
        None => print!("\n{fin}"),
    }
    let mut done = Done::new(json!({
        "bootstrap": cfg,
        "language_seeds": "derive_seed(seed, language)",
        "metric": match metric { Metric::Accuracy => "accuracy", Metric::Distance => "distance" },
        "tiering": tiering,
        "systems": scores.systems,
        "languages": scores.rows.iter().map(|r| r.language.as_str()).collect::<Vec<_>>(),
    }));
    done.manifest = args
        .output
        .as_deref()
        .or(args.final_table.as_deref())
        .map(|p| default_location(p, "rank", false));
    Ok(done)
}

#[derive(Args)]
pub struct OracleArgs {
    #[command(flatten)]
    systems: SystemArgs,
    /// Files listing system names, one per line; each file is one group
    #[arg(long, value_delimiter = ',')]
    groups: Vec<PathBuf>,
    /// Output TSV (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn read_group(ctx: &Ctx, path: &Path, known: &[String]) -> Result<(String, Vec<usize>)> {
    let name = crate::io::language_of(path)?;
    let text = ctx.files.read_string(path)?;
    let mut members = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let idx = known
            .iter()
            .position(|k| k == s)
            .ok_or_else(|| anyhow!("{}: line {}: unknown system {s:?}", path.display(), i + 1))?;
        members.push(idx);
    }
    if members.is_empty() {
        return Err(anyhow!("{}: group lists no systems", path.display()));
    }
    Ok((name, members))
}

pub fn oracle(ctx: &Ctx, args: &OracleArgs) -> Result<Done> {
    let scores = load_scores(ctx, &args.systems)?;
    scores.require_complete()?;
    let mut groups = args
        .groups
        .iter()
        .map(|p| read_group(ctx, p, &scores.systems))
        .collect::<Result<Vec<_>>>()?;
    groups.push(("all".to_owned(), (0..scores.systems.len()).collect()));

    let mut text = String::from("language");
    for (name, _) in &groups {
        write!(text, "\t{name}")?;
    }
    text.push('\n');
    for row in &scores.rows {
        text.push_str(&row.language);
        for (_, members) in &groups {
            let runs: Vec<&ItemScores> = members.iter().filter_map(|&i| row.cells[i].as_ref()).collect();
            write!(text, "\t{}", pct(union_oracle(&runs)?))?;
        }
        text.push('\n');
    }
    emit(&ctx.files, args.output.as_deref(), &text)?;
    let mut done = Done::new(json!({
        "groups": groups.iter().map(|(n, m)| (n.clone(), m.iter().map(|&i| scores.systems[i].clone()).collect::<Vec<_>>())).collect::<BTreeMap<_, _>>(),
    }));
    done.manifest = args.output.as_deref().map(|p| default_location(p, "oracle", false));
    Ok(done)
}

#[derive(Args)]
pub struct DifficultyArgs {
    #[command(flatten)]
    systems: SystemArgs,
    /// Per-item bucket TSV (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Bucket percentages per part of speech, pooled over languages
    #[arg(long)]
    histogram: Option<PathBuf>,
}

pub const DIFFICULTY_HEADER: &str = "language\titem\tlemma\ttags\tpos\tcorrect\tsystems\tbucket";

pub fn difficulty(ctx: &Ctx, args: &DifficultyArgs) -> Result<Done> {
    let scores = load_scores(ctx, &args.systems)?;
    scores.require_complete()?;
    let mut text = format!("{DIFFICULTY_HEADER}\n");
    let mut all_buckets: Vec<Difficulty> = Vec::new();
    let mut all_pos: Vec<String> = Vec::new();
    for row in &scores.rows {
        let runs: Vec<&ItemScores> = row.cells.iter().flatten().collect();
        let buckets = buckets_of(&runs)?;
        for (i, (e, b)) in row.gold.data.iter().zip(&buckets).enumerate() {
            let correct = runs.iter().filter(|r| r.correct()[i]).count();
            let pos = ctx.schema.pos_of(&e.bundle).unwrap_or("UNK").to_owned();
            writeln!(
                text,
                "{}\t{}\t{}\t{}\t{pos}\t{correct}\t{}\t{b}",
                row.language,
                i + 1,
                e.lemma,
                e.bundle,
                runs.len()
            )?;
            all_pos.push(pos);
        }
        all_buckets.extend(buckets);
    }
    emit(&ctx.files, args.output.as_deref(), &text)?;
    if let Some(path) = &args.histogram {
        let hist = difficulty_histogram(&all_buckets, &all_pos)?;
        let mut h = String::from("pos\titems");
        for d in Difficulty::ALL {
            write!(h, "\t{d}")?;
        }
        h.push('\n');
        for (pos, by_bucket) in &hist {
            write!(h, "{pos}\t{}", all_pos.iter().filter(|p| *p == pos).count())?;
            for d in Difficulty::ALL {
                write!(h, "\t{:.2}", by_bucket[&d])?;
            }
            h.push('\n');
        }
        ctx.files.write(path, h.as_bytes())?;
    }
    let mut done = Done::new(json!({ "systems": scores.systems }));
    done.manifest = args
        .output
        .as_deref()
        .or(args.histogram.as_deref())
        .map(|p| default_location(p, "difficulty", false));
    Ok(done)
}
