//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. With `--json`,
//! each command writes one JSON document to stdout; a human summary always
//! goes to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::finetune::Task;
use crate::metrics::{evaluate, EvalOptions, EvalTask, DEFAULT_TAU};
use crate::objective::{Objective, StagePlan};
use crate::order::DEFAULT_OVERLAP_THRESHOLD;
use crate::pipeline::{
    default_threads, run, run_finetune, stats_files, subsample_files, validate_files, FinetuneRunConfig,
    PipelineConfig, THREADS_ENV,
};
use crate::shuffle::DEFAULT_BUFFER;

#[derive(Debug, Parser)]
#[command(name = "scenetext", version, about = "Scene-text corpus builder and evaluator")]
pub struct Cli {
    /// Print a machine-readable JSON result to stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads (default: $SCENETEXT_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Log progress (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check records against the schema and report violations.
    Validate(InputArgs),
    /// Corpus statistics over valid records.
    Stats(InputArgs),
    /// Build sharded pre-training datasets, one per objective stage.
    BuildPretrain(BuildPretrainArgs),
    /// Build a VQA or captioning fine-tuning dataset.
    BuildFinetune(BuildFinetuneArgs),
    /// Keep a seeded, nested fraction of records.
    Subsample(SubsampleArgs),
    /// Score predictions against gold annotations.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input JSONL files (optionally .zst).
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Ocr,
    Splitocr,
    Cap,
    Splitcap,
}

impl From<ObjectiveArg> for Objective {
    fn from(a: ObjectiveArg) -> Self {
        match a {
            ObjectiveArg::Ocr => Objective::Ocr,
            ObjectiveArg::Splitocr => Objective::SplitOcr,
            ObjectiveArg::Cap => Objective::Cap,
            ObjectiveArg::Splitcap => Objective::SplitCap,
        }
    }
}

/// A comma-separated objective list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageList(pub Vec<Objective>);

fn parse_stages(s: &str) -> std::result::Result<StageList, String> {
    StagePlan::parse(s, "")
        .map(|p| StageList(p.objectives()))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct BuildPretrainArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long)]
    pub out_dir: PathBuf,

    /// Single objective (shorthand for a one-stage plan).
    #[arg(long, value_enum, conflicts_with = "stages")]
    pub objective: Option<ObjectiveArg>,

    /// Comma-separated stage plan, e.g. `splitocr,cap`.
    #[arg(long, value_parser = parse_stages)]
    pub stages: Option<StageList>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Subsample fraction in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub fraction: f64,

    #[arg(long, default_value_t = 1)]
    pub shards: usize,

    /// Examples per record per objective; split points are re-drawn each pass.
    #[arg(long, default_value_t = 1)]
    pub passes: u32,

    #[arg(long, default_value_t = DEFAULT_OVERLAP_THRESHOLD)]
    pub overlap_threshold: f64,

    #[arg(long, default_value = "read:")]
    pub ocr_prompt: String,

    #[arg(long, default_value = "caption:")]
    pub caption_prompt: String,

    /// Pre-training image resolution tag (metadata only).
    #[arg(long)]
    pub resolution: Option<u32>,

    /// zstd-compress shards.
    #[arg(long)]
    pub zstd: bool,

    #[arg(long, default_value_t = DEFAULT_BUFFER)]
    pub shuffle_buffer: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Vqa,
    Caption,
}

#[derive(Debug, Args)]
pub struct BuildFinetuneArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long)]
    pub out_dir: PathBuf,

    #[arg(long, value_enum)]
    pub task: TaskArg,

    /// Drop OCR tokens from the model input.
    #[arg(long)]
    pub no_ocr_input: bool,

    #[arg(long, default_value_t = DEFAULT_OVERLAP_THRESHOLD)]
    pub overlap_threshold: f64,

    #[arg(long, default_value = "answer:")]
    pub vqa_prompt: String,

    #[arg(long, default_value = "caption:")]
    pub caption_prompt: String,
}

#[derive(Debug, Args)]
pub struct SubsampleArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output JSONL (`.zst` suffix compresses).
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub fraction: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EvalTaskArg {
    Vqa,
    VqaAnls,
    Caption,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_enum)]
    pub task: EvalTaskArg,

    /// Predictions JSONL: {"example_id", "prediction"}.
    #[arg(long)]
    pub pred: PathBuf,

    /// Gold JSONL: {"example_id", "answers"} or {"example_id", "references"|"target"}.
    #[arg(long)]
    pub gold: PathBuf,

    /// ANLS threshold.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,

    /// Also write the report JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Omit per-item scores from the report.
    #[arg(long)]
    pub no_per_item: bool,
}

fn emit<T: Serialize>(json: bool, value: &T) -> Result<()> {
    if json {
        let mut out = std::io::stdout().lock();
        serde_json::to_writer(&mut out, value)?;
        let _ = writeln!(out);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let threads = cli.threads.unwrap_or_else(default_threads);
    match cli.command {
        Command::Validate(a) => {
            let s = validate_files(&a.inputs)?;
            eprintln!(
                "{} records, {} eligible, {} invalid, {} parse / {} schema errors",
                s.counts.records, s.eligible_records, s.counts.invalid_records, s.counts.parse_errors, s.counts.schema_errors
            );
            for (code, n) in &s.counts.violations {
                eprintln!("  {code}: {n}");
            }
            emit(cli.json, &s)
        }
        Command::Stats(a) => {
            let (stats, counts) = stats_files(&a.inputs)?;
            eprintln!(
                "{} records, empty-OCR fraction {:.4}, eligible {:?}",
                stats.records,
                stats.empty_ocr_fraction(),
                stats.eligible
            );
            emit(
                cli.json,
                &json!({ "stats": stats, "empty_ocr_fraction": stats.empty_ocr_fraction(), "ingest": counts }),
            )
        }
        Command::BuildPretrain(a) => {
            let stages = match (a.objective, a.stages) {
                (Some(o), _) => vec![o.into()],
                (None, Some(s)) => s.0,
                (None, None) => vec![Objective::SplitOcr],
            };
            let config = PipelineConfig {
                inputs: a.input.inputs,
                stages,
                seed: a.seed,
                fraction: a.fraction,
                shards: a.shards,
                passes: a.passes,
                overlap_threshold: a.overlap_threshold,
                ocr_prompt: a.ocr_prompt,
                caption_prompt: a.caption_prompt,
                resolution: a.resolution,
                compress: a.zstd,
                shuffle_buffer: a.shuffle_buffer,
                threads,
                ..Default::default()
            };
            let out = run(&config, &a.out_dir)?;
            for s in &out.manifest.stages {
                eprintln!("{}: {} examples, {} shard(s)", s.dataset, s.examples, s.shards.len());
            }
            eprintln!("manifest {} (sha256 {})", out.manifest_path.display(), out.manifest_hash);
            emit(
                cli.json,
                &json!({
                    "manifest_path": out.manifest_path,
                    "manifest_hash": out.manifest_hash,
                    "manifest": out.manifest,
                }),
            )
        }
        Command::BuildFinetune(a) => {
            let config = FinetuneRunConfig {
                inputs: a.input.inputs,
                task: match a.task {
                    TaskArg::Vqa => Task::Vqa,
                    TaskArg::Caption => Task::Caption,
                },
                ocr_included: !a.no_ocr_input,
                vqa_prompt: a.vqa_prompt,
                caption_prompt: a.caption_prompt,
                overlap_threshold: a.overlap_threshold,
                threads,
                ..Default::default()
            };
            let out = run_finetune(&config, &a.out_dir)?;
            eprintln!(
                "{} {} examples -> {}",
                out.manifest.output.examples,
                config.task,
                a.out_dir.join(&out.manifest.output.path).display()
            );
            emit(
                cli.json,
                &json!({
                    "manifest_path": out.manifest_path,
                    "manifest_hash": out.manifest_hash,
                    "manifest": out.manifest,
                }),
            )
        }
        Command::Subsample(a) => {
            let s = subsample_files(&a.input.inputs, &a.out, a.fraction, a.seed)?;
            eprintln!("kept {} of {} records", s.records_kept, s.records_read);
            emit(
                cli.json,
                &json!({ "summary": s, "fraction": a.fraction, "seed": a.seed, "out": a.out }),
            )
        }
        Command::Evaluate(a) => {
            let task = match a.task {
                EvalTaskArg::Vqa => EvalTask::Vqa,
                EvalTaskArg::VqaAnls => EvalTask::VqaAnls,
                EvalTaskArg::Caption => EvalTask::Caption,
            };
            let report = evaluate(
                &a.pred,
                &a.gold,
                task,
                EvalOptions {
                    tau: a.tau,
                    per_item: !a.no_per_item,
                },
            )?;
            eprintln!("{}", report.summary());
            if let Some(path) = &a.report {
                std::fs::write(path, serde_json::to_vec_pretty(&report)?)
                    .map_err(|e| crate::error::Error::io(path, e))?;
            }
            emit(cli.json, &report)
        }
    }
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_env("RUST_LOG").try_init();
    log::debug!("{THREADS_ENV}={:?}", std::env::var(THREADS_ENV).ok());

    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
