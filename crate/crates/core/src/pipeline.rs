//! End-to-end corpus builds.
//!
//! `run` streams the inputs once: parse, validate, subsample, collect
//! statistics, and build every stage's examples for every pass. Each stage is
//! shuffled with bounded memory and written as round-robin JSONL shards, and
//! a manifest records the effective configuration, counts and shard hashes.
//!
//! Outputs are a pure function of the inputs and the configuration: records
//! are processed in parallel batches, but every random decision is keyed by
//! `(seed, image_id)` and the final order by `(seed, example_id)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_image_id, parse_record, Record, StreamValidator};
use crate::error::{Error, Ineligible, Result};
use crate::finetune::{build_examples, FinetuneConfig, FinetuneExample, Task};
use crate::format::TextFormat;
use crate::hash::{domain, keyed_hash64};
use crate::io::{sha256_hex, HashedLines, LineWriter};
use crate::objective::{build_example, build_stage_plan, Objective, ObjectiveConfig, PretrainExample, StagePlan};
use crate::order::{check_overlap_threshold, DEFAULT_OVERLAP_THRESHOLD};
use crate::shuffle::{relative, write_shards, ExternalShuffler, DEFAULT_BUFFER};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "SCENETEXT_THREADS";

const BATCH: usize = 8192;

/// Default worker count: `SCENETEXT_THREADS` if set, else the machine's parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// subsampling

/// Keeps a record iff `hash(seed, image_id) / 2^64 < fraction`.
///
/// The predicate is monotone in `fraction`, so subsets drawn with the same
/// seed are nested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsampler {
    seed: u64,
    threshold: Option<u64>,
}

impl Subsampler {
    pub fn new(fraction: f64, seed: u64) -> Result<Self> {
        check_fraction(fraction)?;
        let threshold = if fraction >= 1.0 {
            None
        } else {
            // Saturating float-to-int cast; monotone in `fraction`.
            Some((fraction * 18_446_744_073_709_551_616.0) as u64)
        };
        Ok(Subsampler { seed, threshold })
    }

    pub fn keeps(&self, image_id: &str) -> bool {
        self.threshold.is_none() || self.keeps_key(subsample_key(self.seed, image_id))
    }

    /// Decision for a precomputed [`subsample_key`].
    pub fn keeps_key(&self, key: u64) -> bool {
        self.threshold.is_none_or(|t| key < t)
    }
}

/// The 64-bit value compared against `fraction × 2^64`.
pub fn subsample_key(seed: u64, image_id: &str) -> u64 {
    keyed_hash64(seed, domain::SUBSAMPLE, image_id)
}

pub fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("fraction must be in (0, 1], got {fraction}")))
    }
}

/// Lazily filter a record stream.
pub fn subsample<I>(records: I, fraction: f64, seed: u64) -> Result<impl Iterator<Item = Record>>
where
    I: IntoIterator<Item = Record>,
{
    let s = Subsampler::new(fraction, seed)?;
    Ok(records.into_iter().filter(move |r| s.keeps(&r.image_id)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubsampleSummary {
    pub records_read: u64,
    pub records_kept: u64,
    pub unparseable: u64,
}

/// Copy the lines of `inputs` whose record is kept into `out`, verbatim.
pub fn subsample_files(inputs: &[PathBuf], out: &Path, fraction: f64, seed: u64) -> Result<SubsampleSummary> {
    let s = Subsampler::new(fraction, seed)?;
    let mut summary = SubsampleSummary {
        records_read: 0,
        records_kept: 0,
        unparseable: 0,
    };
    let compress = out.extension().is_some_and(|e| e == "zst");
    let mut w = LineWriter::create(out, compress)?;
    for path in inputs {
        let mut lines = HashedLines::open(path)?;
        while let Some((no, line)) = lines.next_line()? {
            summary.records_read += 1;
            match parse_image_id(&line) {
                Ok(id) if s.keeps(&id) => {
                    summary.records_kept += 1;
                    w.write_line(&line)?;
                }
                Ok(_) => {}
                Err(e) => {
                    summary.unparseable += 1;
                    warn!("{}:{no}: {e}", path.display());
                }
            }
        }
    }
    if let Err(e) = w.finish() {
        let _ = fs::remove_file(out);
        return Err(e);
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: u64,
    /// Eligible record count per objective tag.
    pub eligible: BTreeMap<String, u64>,
    /// OCR tokens per record -> number of records.
    pub ocr_token_histogram: BTreeMap<usize, u64>,
    /// Caption words per record (0 when absent) -> number of records.
    pub caption_length_histogram: BTreeMap<usize, u64>,
    pub empty_ocr_records: u64,
    pub total_ocr_tokens: u64,
}

impl DatasetStats {
    pub fn new() -> Self {
        let mut s = DatasetStats::default();
        for o in Objective::ALL {
            s.eligible.insert(o.tag().to_string(), 0);
        }
        s
    }

    pub fn observe(&mut self, record: &Record) {
        self.records += 1;
        let n_ocr = record.ocr.len();
        let caption_words = record
            .caption
            .as_deref()
            .map_or(0, |c| c.split_whitespace().count());
        *self.ocr_token_histogram.entry(n_ocr).or_default() += 1;
        *self.caption_length_histogram.entry(caption_words).or_default() += 1;
        self.total_ocr_tokens += n_ocr as u64;
        if n_ocr == 0 {
            self.empty_ocr_records += 1;
        }
        for o in Objective::ALL {
            let ok = if o.is_caption_objective() {
                caption_words > 0
            } else {
                n_ocr > 0
            };
            if ok {
                *self.eligible.entry(o.tag().to_string()).or_default() += 1;
            }
        }
    }

    /// Combine partial aggregates; the result does not depend on merge order.
    pub fn merge(&mut self, other: &DatasetStats) {
        self.records += other.records;
        self.empty_ocr_records += other.empty_ocr_records;
        self.total_ocr_tokens += other.total_ocr_tokens;
        for (k, v) in &other.eligible {
            *self.eligible.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.ocr_token_histogram {
            *self.ocr_token_histogram.entry(*k).or_default() += v;
        }
        for (k, v) in &other.caption_length_histogram {
            *self.caption_length_histogram.entry(*k).or_default() += v;
        }
    }

    pub fn empty_ocr_fraction(&self) -> f64 {
        if self.records == 0 {
            0.0
        } else {
            self.empty_ocr_records as f64 / self.records as f64
        }
    }
}

pub fn compute_stats<'a>(records: impl IntoIterator<Item = &'a Record>) -> DatasetStats {
    let mut s = DatasetStats::new();
    for r in records {
        s.observe(r);
    }
    s
}

// ---------------------------------------------------------------------------
// validation over files

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestCounts {
    pub lines: u64,
    pub parse_errors: u64,
    pub schema_errors: u64,
    pub records: u64,
    pub invalid_records: u64,
    pub violations: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub file: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub counts: IngestCounts,
    pub eligible_records: u64,
    /// First few problems, for humans.
    pub issues: Vec<Issue>,
}

const MAX_ISSUES: usize = 50;

/// Parse-and-validate stream shared by every file-level entry point.
struct Ingest {
    validator: StreamValidator,
    counts: IngestCounts,
    issues: Vec<Issue>,
}

impl Ingest {
    fn new() -> Self {
        Ingest {
            validator: StreamValidator::new(),
            counts: IngestCounts::default(),
            issues: Vec::new(),
        }
    }

    fn issue(&mut self, file: &Path, line: usize, message: String) {
        warn!("{}:{line}: {message}", file.display());
        if self.issues.len() < MAX_ISSUES {
            self.issues.push(Issue {
                file: file.display().to_string(),
                line,
                message,
            });
        }
    }

    /// Parse a batch in parallel, then validate sequentially (duplicate detection is stateful).
    fn batch(&mut self, file: &Path, lines: Vec<(usize, String)>) -> Vec<Record> {
        let parsed: Vec<(usize, Result<Record>)> = lines
            .into_par_iter()
            .map(|(no, l)| (no, parse_record(&l)))
            .collect();
        let mut out = Vec::with_capacity(parsed.len());
        for (no, r) in parsed {
            self.counts.lines += 1;
            let record = match r {
                Ok(r) => r,
                Err(e) => {
                    match e {
                        Error::Parse { .. } => self.counts.parse_errors += 1,
                        _ => self.counts.schema_errors += 1,
                    }
                    self.issue(file, no, e.to_string());
                    continue;
                }
            };
            self.counts.records += 1;
            let report = self.validator.validate(&record);
            if !report.is_eligible() {
                self.counts.invalid_records += 1;
                for v in &report.violations {
                    *self.counts.violations.entry(v.code().to_string()).or_default() += 1;
                }
                let msg = report
                    .violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ");
                self.issue(file, no, format!("{}: {msg}", record.image_id));
                continue;
            }
            out.push(record);
        }
        out
    }
}

/// Stream `inputs`, calling `sink` with each batch of valid records.
fn ingest_files(
    inputs: &[PathBuf],
    mut sink: impl FnMut(Vec<Record>) -> Result<()>,
) -> Result<(Ingest, Vec<InputInfo>)> {
    let mut ingest = Ingest::new();
    let mut infos = Vec::with_capacity(inputs.len());
    for path in inputs {
        let mut lines = HashedLines::open(path)?;
        loop {
            let batch = lines.next_batch(BATCH)?;
            if batch.is_empty() {
                break;
            }
            let records = ingest.batch(path, batch);
            sink(records)?;
        }
        infos.push(InputInfo {
            path: path.display().to_string(),
            lines: lines.lines_read() as u64,
            sha256: lines.finish(),
        });
    }
    Ok((ingest, infos))
}

pub fn validate_files(inputs: &[PathBuf]) -> Result<ValidationSummary> {
    let mut eligible = 0u64;
    let (ingest, _) = ingest_files(inputs, |batch| {
        eligible += batch.len() as u64;
        Ok(())
    })?;
    Ok(ValidationSummary {
        counts: ingest.counts,
        eligible_records: eligible,
        issues: ingest.issues,
    })
}

/// Statistics over the valid records of `inputs`.
pub fn stats_files(inputs: &[PathBuf]) -> Result<(DatasetStats, IngestCounts)> {
    let mut stats = DatasetStats::new();
    let (ingest, _) = ingest_files(inputs, |batch| {
        for r in &batch {
            stats.observe(r);
        }
        Ok(())
    })?;
    Ok((stats, ingest.counts))
}

// ---------------------------------------------------------------------------
// pre-training build

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub stages: Vec<Objective>,
    pub seed: u64,
    /// Subsample fraction in (0, 1].
    pub fraction: f64,
    pub shards: usize,
    /// Examples per eligible record per objective; each pass re-draws split points.
    pub passes: u32,
    pub overlap_threshold: f64,
    pub ocr_prompt: String,
    pub caption_prompt: String,
    pub format: TextFormat,
    /// Pre-training image resolution tag; recorded, not used.
    pub resolution: Option<u32>,
    pub compress: bool,
    /// In-memory shuffle buffer (items) before spilling a sorted run to disk.
    pub shuffle_buffer: usize,
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let obj = ObjectiveConfig::default();
        PipelineConfig {
            inputs: Vec::new(),
            stages: vec![Objective::SplitOcr],
            seed: 0,
            fraction: 1.0,
            shards: 1,
            passes: 1,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            ocr_prompt: obj.ocr_prompt,
            caption_prompt: obj.caption_prompt,
            format: obj.format,
            resolution: None,
            compress: false,
            shuffle_buffer: DEFAULT_BUFFER,
            threads: default_threads(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check_fraction(self.fraction)?;
        check_overlap_threshold(self.overlap_threshold)?;
        if self.shards == 0 {
            return Err(Error::Config("shard count must be at least 1".into()));
        }
        if self.passes == 0 {
            return Err(Error::Config("passes must be at least 1".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files".into()));
        }
        build_stage_plan(&self.stages, "")?;
        Ok(())
    }

    pub fn objective_config(&self, pass: u32) -> ObjectiveConfig {
        ObjectiveConfig {
            seed: self.seed,
            pass,
            ocr_prompt: self.ocr_prompt.clone(),
            caption_prompt: self.caption_prompt.clone(),
            overlap_threshold: self.overlap_threshold,
            format: self.format.clone(),
        }
    }

    /// SHA-256 of the configuration's canonical JSON, excluding `threads`
    /// and `shuffle_buffer`, which never change the output.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("threads");
            m.remove("shuffle_buffer");
        }
        sha256_hex(v.to_string().as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub lines: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardInfo {
    /// Relative to the output directory.
    pub path: PathBuf,
    pub examples: u64,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageOutput {
    pub index: usize,
    pub objective: Objective,
    pub dataset: String,
    pub examples: u64,
    /// Skipped record count per reason, summed over passes.
    pub skipped: BTreeMap<String, u64>,
    pub shards: Vec<ShardInfo>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunCounts {
    #[serde(flatten)]
    pub ingest: IngestCounts,
    pub subsampled_out: u64,
    pub kept: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub config_hash: String,
    pub seed: u64,
    pub inputs: Vec<InputInfo>,
    pub counts: RunCounts,
    pub stats: DatasetStats,
    pub plan: StagePlan,
    pub stages: Vec<StageOutput>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    /// SHA-256 of the manifest file bytes.
    pub manifest_hash: String,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Removes everything it tracked unless disarmed.
struct Cleanup {
    paths: Vec<PathBuf>,
    armed: bool,
}

impl Drop for Cleanup {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        for p in self.paths.iter().rev() {
            let _ = if p.is_dir() {
                fs::remove_dir_all(p)
            } else {
                fs::remove_file(p)
            };
        }
    }
}

fn corpus_name(inputs: &[PathBuf]) -> String {
    inputs
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Examples for one objective and pass over a slice of records, in input order.
pub fn build_stage_examples(
    records: &[Record],
    objective: Objective,
    config: &ObjectiveConfig,
) -> Vec<std::result::Result<PretrainExample, Ineligible>> {
    records
        .par_iter()
        .map(|r| build_example(objective, r, config))
        .collect()
}

/// Execute a full pre-training corpus build into `out_dir`.
pub fn run(config: &PipelineConfig, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let plan = build_stage_plan(&config.stages, &corpus_name(&config.inputs))?;
    let pool = thread_pool(config.threads)?;
    pool.install(|| run_inner(config, plan, out_dir))
}

fn run_inner(config: &PipelineConfig, plan: StagePlan, out_dir: &Path) -> Result<RunOutcome> {
    let subsampler = Subsampler::new(config.fraction, config.seed)?;
    let pass_configs: Vec<ObjectiveConfig> = (0..config.passes).map(|p| config.objective_config(p)).collect();

    let mut shufflers: Vec<ExternalShuffler> = plan
        .stages
        .iter()
        .map(|_| ExternalShuffler::new(config.seed, config.shuffle_buffer))
        .collect();
    let mut skipped: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); plan.stages.len()];
    let mut stats = DatasetStats::new();
    let mut subsampled_out = 0u64;

    let (ingest, inputs) = ingest_files(&config.inputs, |batch| {
        let kept: Vec<Record> = batch
            .into_iter()
            .filter(|r| {
                let k = subsampler.keeps(&r.image_id);
                if !k {
                    subsampled_out += 1;
                }
                k
            })
            .collect();
        for r in &kept {
            stats.observe(r);
        }
        for (si, stage) in plan.stages.iter().enumerate() {
            for pc in &pass_configs {
                for built in build_stage_examples(&kept, stage.objective, pc) {
                    match built {
                        Ok(ex) => shufflers[si].push(&ex.example_id, ex.to_json_line())?,
                        Err(reason) => *skipped[si].entry(format!("{reason:?}")).or_default() += 1,
                    }
                }
            }
        }
        Ok(())
    })?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut cleanup = Cleanup {
        paths: Vec::new(),
        armed: true,
    };

    let mut stages = Vec::with_capacity(plan.stages.len());
    for ((stage, shuffler), skipped) in plan.stages.iter().zip(shufflers).zip(skipped) {
        let dir = out_dir.join(&stage.dataset);
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
        cleanup.paths.push(dir.clone());
        let examples = shuffler.len();
        let files = write_shards(shuffler.finish()?, &dir, config.shards, config.compress)?;
        info!("{}: {examples} examples in {} shard(s)", stage.dataset, files.len());
        stages.push(StageOutput {
            index: stage.index,
            objective: stage.objective,
            dataset: stage.dataset.clone(),
            examples,
            skipped,
            shards: files
                .into_iter()
                .map(|f| ShardInfo {
                    path: relative(&f.path, out_dir),
                    examples: f.lines,
                    bytes: f.bytes,
                    sha256: f.sha256,
                })
                .collect(),
        });
    }

    let kept = stats.records;
    let manifest = Manifest {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        config_hash: config.content_hash(),
        seed: config.seed,
        config: config.clone(),
        inputs,
        counts: RunCounts {
            ingest: ingest.counts,
            subsampled_out,
            kept,
        },
        stats,
        plan,
        stages,
    };
    let manifest_path = out_dir.join(MANIFEST_FILE);
    cleanup.paths.push(manifest_path.clone());
    let bytes = serde_json::to_vec_pretty(&manifest)?;
    fs::write(&manifest_path, &bytes).map_err(|e| Error::io(&manifest_path, e))?;
    cleanup.armed = false;

    Ok(RunOutcome {
        manifest_hash: sha256_hex(&bytes),
        manifest,
        manifest_path,
    })
}

// ---------------------------------------------------------------------------
// fine-tuning build

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneRunConfig {
    pub inputs: Vec<PathBuf>,
    pub task: Task,
    pub ocr_included: bool,
    pub vqa_prompt: String,
    pub caption_prompt: String,
    pub overlap_threshold: f64,
    pub format: TextFormat,
    pub threads: usize,
}

impl Default for FinetuneRunConfig {
    fn default() -> Self {
        let f = FinetuneConfig::default();
        FinetuneRunConfig {
            inputs: Vec::new(),
            task: Task::Vqa,
            ocr_included: true,
            vqa_prompt: f.vqa_prompt,
            caption_prompt: f.caption_prompt,
            overlap_threshold: f.overlap_threshold,
            format: f.format,
            threads: default_threads(),
        }
    }
}

impl FinetuneRunConfig {
    pub fn finetune_config(&self) -> FinetuneConfig {
        FinetuneConfig {
            vqa_prompt: self.vqa_prompt.clone(),
            caption_prompt: self.caption_prompt.clone(),
            overlap_threshold: self.overlap_threshold,
            format: self.format.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinetuneManifest {
    pub tool: String,
    pub version: String,
    pub config: FinetuneRunConfig,
    pub inputs: Vec<InputInfo>,
    pub counts: IngestCounts,
    pub skipped: BTreeMap<String, u64>,
    pub output: ShardInfo,
}

#[derive(Debug, Clone)]
pub struct FinetuneOutcome {
    pub manifest: FinetuneManifest,
    pub manifest_path: PathBuf,
    pub manifest_hash: String,
}

pub fn finetune_file_name(task: Task) -> String {
    format!("{}.jsonl", task.to_string().to_ascii_lowercase())
}

/// Build fine-tuning examples for every valid record, sorted by `example_id`.
pub fn run_finetune(config: &FinetuneRunConfig, out_dir: &Path) -> Result<FinetuneOutcome> {
    check_overlap_threshold(config.overlap_threshold)?;
    if config.inputs.is_empty() {
        return Err(Error::Config("no input files".into()));
    }
    let ft = config.finetune_config();
    let pool = thread_pool(config.threads)?;
    pool.install(|| {
        let mut examples: Vec<FinetuneExample> = Vec::new();
        let mut skipped: BTreeMap<String, u64> = BTreeMap::new();
        let (ingest, inputs) = ingest_files(&config.inputs, |batch| {
            let built: Vec<_> = batch
                .par_iter()
                .map(|r| build_examples(config.task, r, config.ocr_included, &ft))
                .collect();
            for b in built {
                match b {
                    Ok(ex) => examples.extend(ex),
                    Err(reason) => *skipped.entry(format!("{reason:?}")).or_default() += 1,
                }
            }
            Ok(())
        })?;
        examples.par_sort_by(|a, b| a.example_id.cmp(&b.example_id));

        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let out_path = out_dir.join(finetune_file_name(config.task));
        let mut cleanup = Cleanup {
            paths: vec![out_path.clone()],
            armed: true,
        };
        let mut w = LineWriter::create(&out_path, false)?;
        for ex in &examples {
            w.write_line(&ex.to_json_line())?;
        }
        let f = w.finish()?;

        let manifest = FinetuneManifest {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            config: config.clone(),
            inputs,
            counts: ingest.counts,
            skipped,
            output: ShardInfo {
                path: relative(&f.path, out_dir),
                examples: f.lines,
                bytes: f.bytes,
                sha256: f.sha256,
            },
        };
        let manifest_path = out_dir.join(MANIFEST_FILE);
        cleanup.paths.push(manifest_path.clone());
        let bytes = serde_json::to_vec_pretty(&manifest)?;
        fs::write(&manifest_path, &bytes).map_err(|e| Error::io(&manifest_path, e))?;
        cleanup.armed = false;
        Ok(FinetuneOutcome {
            manifest_hash: sha256_hex(&bytes),
            manifest,
            manifest_path,
        })
    })
}
