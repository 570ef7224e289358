mod data;
mod eval;
mod io;
mod manifest;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use reinflect::Schema;
use serde_json::{json, Value};

use crate::io::{Files, UsageError};
use crate::manifest::RunManifest;

#[derive(Parser)]
#[command(name = "reinflect", version, about = "Morphological reinflection data, baseline and evaluation tools")]
struct Cli {
    /// Worker threads for per-language work (default: one per core)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Tag category schema (default: built-in)
    #[arg(long, global = true, env = "REINFLECT_SCHEMA", value_name = "PATH")]
    schema: Option<PathBuf>,
    /// NFC-normalize lemmas and forms when reading
    #[arg(long, global = true)]
    nfc: bool,
    /// Write the run manifest here instead of next to the main output
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
    /// More log output (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check tag bundles against the schema
    Validate(data::ValidateArgs),
    /// Rewrite tag bundles in canonical category order
    Canonicalize(data::CanonicalizeArgs),
    /// Split a corpus into train, dev and test
    Split(data::SplitArgs),
    /// Size, inconsistency, contradiction and in-vocabulary statistics
    Stats(data::StatsArgs),
    /// Learn affix rules per tag bundle
    TrainBaseline(model::TrainArgs),
    /// Inflect a blind file with a trained rule model
    Predict(model::PredictArgs),
    /// Generate extra training triples with random stems
    Hallucinate(model::HallucinateArgs),
    /// Accuracy and mean edit distance per language and system
    Evaluate(eval::EvaluateArgs),
    /// Significance tiers per language and the aggregated ranking
    Rank(eval::RankArgs),
    /// Share of items solved by at least one system of each group
    Oracle(eval::OracleArgs),
    /// Per-item difficulty by how many systems get it right
    Difficulty(eval::DifficultyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Canonicalize(_) => "canonicalize",
            Command::Split(_) => "split",
            Command::Stats(_) => "stats",
            Command::TrainBaseline(_) => "train-baseline",
            Command::Predict(_) => "predict",
            Command::Hallucinate(_) => "hallucinate",
            Command::Evaluate(_) => "evaluate",
            Command::Rank(_) => "rank",
            Command::Oracle(_) => "oracle",
            Command::Difficulty(_) => "difficulty",
        }
    }
}

/// Shared state of one invocation.
pub struct Ctx {
    pub files: Files,
    pub schema: Schema,
    pub nfc: bool,
}

/// What a command reports back for its manifest.
pub struct Done {
    pub config: Value,
    /// Default manifest location; `None` when everything went to stdout.
    pub manifest: Option<PathBuf>,
}

impl Done {
    pub fn new(config: Value) -> Self {
        Done { config, manifest: None }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(io::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let files = Files::default();
    let schema = match &cli.schema {
        Some(p) => Schema::parse(&files.read_string(p)?).map_err(|e| anyhow!("{}: {e}", p.display()))?,
        None => Schema::builtin(),
    };
    let ctx = Ctx {
        files,
        schema,
        nfc: cli.nfc,
    };
    let done = match &cli.command {
        Command::Validate(a) => data::validate(&ctx, a),
        Command::Canonicalize(a) => data::canonicalize(&ctx, a),
        Command::Split(a) => data::split_cmd(&ctx, a),
        Command::Stats(a) => data::stats(&ctx, a),
        Command::TrainBaseline(a) => model::train_baseline(&ctx, a),
        Command::Predict(a) => model::predict(&ctx, a),
        Command::Hallucinate(a) => model::hallucinate(&ctx, a),
        Command::Evaluate(a) => eval::evaluate(&ctx, a),
        Command::Rank(a) => eval::rank(&ctx, a),
        Command::Oracle(a) => eval::oracle(&ctx, a),
        Command::Difficulty(a) => eval::difficulty(&ctx, a),
    }?;
    if let Some(path) = cli.manifest.clone().or(done.manifest) {
        let config = json!({
            "command": done.config,
            "schema": cli.schema.as_ref().map(|p| p.display().to_string()),
            "nfc": cli.nfc,
        });
        let argv = std::env::args().skip(1).collect();
        RunManifest::new(cli.command.name(), argv, config, &ctx.files).write(&path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
