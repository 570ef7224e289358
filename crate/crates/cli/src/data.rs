//! validate, canonicalize, split, stats

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::Args;
use log::info;
use rayon::prelude::*;
use reinflect::datakit::{compute_stats, deduplicate, split, SplitSpec, SplitStats};
use reinflect::unimorph::{canonicalize_dataset, validate_dataset, Dataset, FindingKind};
use serde_json::json;

use crate::io::{discover, emit, load, usage, write_dataset, Forms, Inputs};
use crate::manifest::default_location;
use crate::{Ctx, Done};

#[derive(Args)]
pub struct ValidateArgs {
    /// TSV files, or directories whose files are all checked
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Treat non-canonical tag order and repeated tags as errors too
    #[arg(long)]
    strict: bool,
}

fn is_error(kind: &FindingKind, strict: bool) -> bool {
    strict || matches!(kind, FindingKind::DuplicateCategory { .. } | FindingKind::EmptyField { .. })
}

pub fn validate(ctx: &Ctx, args: &ValidateArgs) -> Result<Done> {
    let mut paths = Vec::new();
    for input in &args.inputs {
        if input.is_dir() {
            let mut inner: Vec<PathBuf> = std::fs::read_dir(input)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            inner.retain(|p| p.is_file());
            inner.sort();
            paths.extend(inner);
        } else {
            paths.push(input.clone());
        }
    }
    let mut errors = 0;
    println!("file\tentries\terrors\twarnings");
    for path in &paths {
        let lang = crate::io::language_of(path)?;
        let loaded = load(&ctx.files, path, &lang, Forms::Sniff, ctx.nfc)?;
        let report = validate_dataset(&loaded.data, &ctx.schema);
        let (mut e, mut w) = (0, 0);
        for f in &report.findings {
            let text = f.to_string();
            let msg = text.split_once(": ").map_or(text.as_str(), |(_, m)| m);
            if is_error(&f.kind, args.strict) {
                e += 1;
                eprintln!("{}: error: {msg}", loaded.at(f.index));
            } else {
                w += 1;
                eprintln!("{}: warning: {msg}", loaded.at(f.index));
            }
        }
        println!("{}\t{}\t{e}\t{w}", path.display(), loaded.data.len());
        errors += e;
    }
    if errors > 0 {
        return Err(anyhow!("{errors} validation error(s)"));
    }
    Ok(Done::new(json!({ "strict": args.strict })))
}

#[derive(Args)]
pub struct CanonicalizeArgs {
    /// TSV file with two or three columns
    input: PathBuf,
    /// Output file (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

pub fn canonicalize(ctx: &Ctx, args: &CanonicalizeArgs) -> Result<Done> {
    let lang = crate::io::language_of(&args.input)?;
    let loaded = load(&ctx.files, &args.input, &lang, Forms::Sniff, ctx.nfc)?;
    let forms = loaded.data.has_all_forms() && !loaded.data.is_empty();
    let d = canonical(ctx, &loaded)?;
    let text = reinflect::unimorph::serialize_dataset(&d, forms)?;
    emit(&ctx.files, args.output.as_deref(), &text)?;
    let mut done = Done::new(json!({}));
    done.manifest = args.output.as_deref().map(|p| default_location(p, "canonicalize", false));
    Ok(done)
}

/// Bundles of `loaded` in canonical order, or a line-numbered error.
pub fn canonical(ctx: &Ctx, loaded: &crate::io::Loaded) -> Result<Dataset> {
    canonicalize_dataset(loaded.data.clone(), &ctx.schema).map_err(|(i, e)| anyhow!("{}: {e}", loaded.at(i)))
}

#[derive(Args)]
pub struct SplitArgs {
    /// One TSV file, or a directory of `<lang>.<ext>` files
    input: PathBuf,
    /// Output directory for `<lang>.trn`, `.dev`, `.tst` and `.tst.blind`
    #[arg(short, long)]
    output: PathBuf,
    /// Seed for the shuffle and the train cap
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    dev_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Largest allowed training set; larger ones are subsampled by lemma
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
    /// Keep repeated triples instead of dropping them before splitting
    #[arg(long)]
    keep_duplicates: bool,
    /// Language code for single-file input (default: file name up to the first dot)
    #[arg(long)]
    lang: Option<String>,
    /// Extension of input files in directory mode
    #[arg(long, default_value = "tsv")]
    ext: String,
}

pub fn split_cmd(ctx: &Ctx, args: &SplitArgs) -> Result<Done> {
    let spec = SplitSpec {
        train_fraction: args.train_fraction,
        dev_fraction: args.dev_fraction,
        test_fraction: args.test_fraction,
        train_cap: args.cap,
        seed: args.seed,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let inputs = Inputs::resolve(&args.input, &args.ext, args.lang.as_deref())?;
    inputs
        .items
        .par_iter()
        .map(|(lang, path)| -> Result<()> {
            let loaded = load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?;
            let data = if args.keep_duplicates {
                loaded.data
            } else {
                let (d, dropped) = deduplicate(&loaded.data);
                if dropped > 0 {
                    info!("{lang}: dropped {dropped} repeated triples");
                }
                d
            };
            let s = split(&data, &spec).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            if s.capped > 0 {
                info!("{lang}: cap dropped {} training entries", s.capped);
            }
            let out = |ext: &str| args.output.join(format!("{lang}.{ext}"));
            write_dataset(&ctx.files, &out("trn"), &s.train, true)?;
            write_dataset(&ctx.files, &out("dev"), &s.dev, true)?;
            write_dataset(&ctx.files, &out("tst"), &s.test, true)?;
            write_dataset(&ctx.files, &out("tst.blind"), &s.test.blind(), false)
        })
        .collect::<Result<Vec<()>>>()?;
    let mut done = Done::new(json!({
        "seed": args.seed,
        "train_fraction": args.train_fraction,
        "dev_fraction": args.dev_fraction,
        "test_fraction": args.test_fraction,
        "cap": args.cap,
        "deduplicate": !args.keep_duplicates,
        "languages": inputs.items.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>(),
    }));
    done.manifest = Some(default_location(&args.output, "split", true));
    Ok(done)
}

#[derive(Args)]
pub struct StatsArgs {
    /// Directories holding `<lang>.trn` and optionally `<lang>.dev` and `<lang>.tst`
    #[arg(required = true)]
    dirs: Vec<PathBuf>,
    /// Output TSV (standard output if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn load_or_empty(ctx: &Ctx, path: &Path, lang: &str) -> Result<Dataset> {
    if path.exists() {
        Ok(load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?.data)
    } else {
        Ok(Dataset::empty(lang))
    }
}

pub fn stats(ctx: &Ctx, args: &StatsArgs) -> Result<Done> {
    let mut langs = Vec::new();
    for dir in &args.dirs {
        for (lang, trn) in discover(dir, "trn")? {
            langs.push((lang, trn, dir.clone()));
        }
    }
    if langs.is_empty() {
        return Err(anyhow!("no *.trn files found"));
    }
    langs.sort();
    let rows = langs
        .par_iter()
        .map(|(lang, trn, dir)| -> Result<String> {
            let train = load(&ctx.files, trn, lang, Forms::Required, ctx.nfc)?.data;
            let dev = load_or_empty(ctx, &dir.join(format!("{lang}.dev")), lang)?;
            let test = load_or_empty(ctx, &dir.join(format!("{lang}.tst")), lang)?;
            Ok(compute_stats(&train, &dev, &test).tsv_row(lang))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut text = format!("{}\n", SplitStats::TSV_HEADER);
    for r in rows {
        text.push_str(&r);
        text.push('\n');
    }
    emit(&ctx.files, args.output.as_deref(), &text)?;
    let mut done = Done::new(json!({}));
    done.manifest = args.output.as_deref().map(|p| default_location(p, "stats", false));
    Ok(done)
}
