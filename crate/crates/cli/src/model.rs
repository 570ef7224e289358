//! train-baseline, predict, hallucinate

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Args;
use log::info;
use rayon::prelude::*;
use reinflect::baseline::{run_to_dataset, train, RuleModel, SelectionOrder};
use reinflect::hallucinate::{augment, HallucinationConfig};
use serde_json::json;

use crate::data::canonical;
use crate::io::{load, write_dataset, Forms, Inputs};
use crate::manifest::default_location;
use crate::{Ctx, Done};

#[derive(Args)]
pub struct TrainArgs {
    /// Training TSV, or a directory of `<lang>.trn` files
    input: PathBuf,
    /// Model file, or a directory for `<lang>.model.json` in batch mode
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    lang: Option<String>,
    /// Key rules on bundles exactly as written instead of in canonical tag order
    #[arg(long)]
    no_canonicalize: bool,
}

pub fn train_baseline(ctx: &Ctx, args: &TrainArgs) -> Result<Done> {
    let inputs = Inputs::resolve(&args.input, "trn", args.lang.as_deref())?;
    inputs
        .items
        .par_iter()
        .map(|(lang, path)| -> Result<()> {
            let loaded = load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?;
            let data = if args.no_canonicalize {
                loaded.data
            } else {
                canonical(ctx, &loaded)?
            };
            let model = train(&data).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            info!("{lang}: {} bundles", model.by_bundle.len());
            let out = inputs.output(&args.output, lang, "model.json");
            ctx.files.write(&out, model.to_json()?.as_bytes())
        })
        .collect::<Result<Vec<()>>>()?;
    let mut done = Done::new(json!({ "canonicalize": !args.no_canonicalize }));
    done.manifest = Some(default_location(&args.output, "train-baseline", inputs.batch));
    Ok(done)
}

#[derive(Args)]
pub struct PredictArgs {
    /// Blind TSV (lemma, tags), or a directory of `<lang>.tst.blind` files
    input: PathBuf,
    /// Model file, or a directory of `<lang>.model.json` in batch mode
    #[arg(long)]
    model: PathBuf,
    /// Prediction TSV, or a directory for `<lang>.tst` in batch mode
    #[arg(short, long)]
    output: PathBuf,
    /// Prefer the most frequent applicable suffix rule over the longest
    #[arg(long)]
    freq_first: bool,
    #[arg(long)]
    no_canonicalize: bool,
    #[arg(long)]
    lang: Option<String>,
}

pub fn predict(ctx: &Ctx, args: &PredictArgs) -> Result<Done> {
    let inputs = Inputs::resolve(&args.input, "tst.blind", args.lang.as_deref())?;
    let order = if args.freq_first {
        SelectionOrder::FrequencyFirst
    } else {
        SelectionOrder::LongestFirst
    };
    inputs
        .items
        .par_iter()
        .map(|(lang, path)| -> Result<()> {
            let model_path = inputs.output(&args.model, lang, "model.json");
            let text = ctx.files.read_string(&model_path)?;
            let model = RuleModel::from_json(&text).map_err(|e| anyhow!("{}: {e}", model_path.display()))?;
            let loaded = load(&ctx.files, path, lang, Forms::Sniff, ctx.nfc)?;
            let blind = loaded.data.blind();
            let keyed = if args.no_canonicalize {
                blind.clone()
            } else {
                canonical(ctx, &loaded)?.blind()
            };
            let run = model.predict_dataset("baseline", &keyed, order);
            let out = inputs.output(&args.output, lang, "tst");
            write_dataset(&ctx.files, &out, &run_to_dataset(&blind, &run), true)
        })
        .collect::<Result<Vec<()>>>()?;
    let mut done = Done::new(json!({
        "selection": if args.freq_first { "frequency_first" } else { "longest_first" },
        "canonicalize": !args.no_canonicalize,
    }));
    done.manifest = Some(default_location(&args.output, "predict", inputs.batch));
    Ok(done)
}

#[derive(Args)]
pub struct HallucinateArgs {
    /// Training TSV, or a directory of `<lang>.trn` files
    input: PathBuf,
    /// Output TSV, or a directory for `<lang>.hall` in batch mode
    #[arg(short, long)]
    output: PathBuf,
    /// Number of new triples per language
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shortest shared segment that gets replaced
    #[arg(long, default_value_t = 4)]
    min_shared: usize,
    /// Let replacements be one character shorter or longer than the original
    #[arg(long)]
    jitter: bool,
    #[arg(long)]
    lang: Option<String>,
}

pub fn hallucinate(ctx: &Ctx, args: &HallucinateArgs) -> Result<Done> {
    let cfg = HallucinationConfig {
        min_shared_len: args.min_shared,
        target_count: args.n,
        seed: args.seed,
        preserve_length: !args.jitter,
    };
    cfg.validate().map_err(|e| crate::io::usage(e.to_string()))?;
    let inputs = Inputs::resolve(&args.input, "trn", args.lang.as_deref())?;
    inputs
        .items
        .par_iter()
        .map(|(lang, path)| -> Result<()> {
            let loaded = load(&ctx.files, path, lang, Forms::Required, ctx.nfc)?;
            let extra = augment(&loaded.data, &cfg).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            let out = inputs.output(&args.output, lang, "hall");
            write_dataset(&ctx.files, &out, &extra, true)
        })
        .collect::<Result<Vec<()>>>()?;
    let mut done = Done::new(serde_json::to_value(&cfg)?);
    done.manifest = Some(default_location(&args.output, "hallucinate", inputs.batch));
    Ok(done)
}
