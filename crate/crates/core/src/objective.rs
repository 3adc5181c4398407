//! Pre-training example builders: OCR, SPLITOCR, CAP and SPLITCAP.
//!
//! SPLITOCR orders a record's OCR tokens, draws a split point `k` uniformly
//! from `0..n`, gives tokens `[0, k)` to the model as input and asks it to
//! generate tokens `[k, n)`. With `k = 0` it degenerates to plain OCR.
//! SPLITCAP does the same over the caption's words, with the full OCR as
//! extra input.
//!
//! Randomness is per record: the generator is seeded from
//! `hash(seed, objective, pass, image_id)`, so a record's example does not
//! depend on which other records are processed, in what order, or on how many
//! threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Record;
use crate::error::{Error, Ineligible, Result};
use crate::format::TextFormat;
use crate::hash::{domain, keyed_hash64};
use crate::order::{join_texts, order_tokens, OrderedOcr, DEFAULT_OVERLAP_THRESHOLD};

pub type Built = std::result::Result<PretrainExample, Ineligible>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Objective {
    Ocr,
    SplitOcr,
    Cap,
    SplitCap,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::Ocr,
        Objective::SplitOcr,
        Objective::Cap,
        Objective::SplitCap,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Objective::Ocr => "OCR",
            Objective::SplitOcr => "SPLITOCR",
            Objective::Cap => "CAP",
            Objective::SplitCap => "SPLITCAP",
        }
    }

    /// Whether this objective reads the caption (and therefore not the OCR target).
    pub fn is_caption_objective(self) -> bool {
        matches!(self, Objective::Cap | Objective::SplitCap)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Objective::ALL
            .into_iter()
            .find(|o| o.tag().eq_ignore_ascii_case(t))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown objective {t:?} (expected one of ocr, splitocr, cap, splitcap)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub seed: u64,
    /// Epoch-pass index; mixed into the per-record generator so each pass re-draws splits.
    pub pass: u32,
    pub ocr_prompt: String,
    pub caption_prompt: String,
    pub overlap_threshold: f64,
    pub format: TextFormat,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            seed: 0,
            pass: 0,
            ocr_prompt: "read:".into(),
            caption_prompt: "caption:".into(),
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            format: TextFormat::default(),
        }
    }
}

impl ObjectiveConfig {
    pub fn prompt_for(&self, objective: Objective) -> &str {
        if objective.is_caption_objective() {
            &self.caption_prompt
        } else {
            &self.ocr_prompt
        }
    }

    fn order(&self, record: &Record) -> OrderedOcr {
        order_tokens(&record.ocr, self.overlap_threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretrainExample {
    pub example_id: String,
    pub image_id: String,
    pub objective: Objective,
    pub prompt: String,
    pub input_ocr: Vec<String>,
    pub input_caption_prefix: String,
    pub target: String,
}

impl PretrainExample {
    /// Model input text: prompt, caption prefix, then the OCR segment.
    pub fn input_text(&self, format: &TextFormat) -> String {
        format.render(
            &self.prompt,
            &[self.input_caption_prefix.as_str()],
            Some(&self.input_ocr),
        )
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("example serialization is infallible")
    }
}

pub fn example_id(image_id: &str, objective: Objective, pass: u32) -> String {
    format!("{image_id}/{}/{pass}", objective.tag().to_ascii_lowercase())
}

/// The generator for one `(seed, objective, pass, image_id)`.
pub fn record_rng(config: &ObjectiveConfig, objective: Objective, image_id: &str) -> ChaCha8Rng {
    let dom = format!("{}/{}/{}", domain::SPLIT, objective.tag(), config.pass);
    ChaCha8Rng::seed_from_u64(keyed_hash64(config.seed, &dom, image_id))
}

/// Uniform split point in `0..n`. The target part `[k, n)` is never empty.
pub fn sample_split_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> std::result::Result<usize, Ineligible> {
    if n == 0 {
        return Err(Ineligible::EmptyOcr);
    }
    Ok(rng.gen_range(0..n))
}

fn base(record: &Record, objective: Objective, config: &ObjectiveConfig) -> PretrainExample {
    PretrainExample {
        example_id: example_id(&record.image_id, objective, config.pass),
        image_id: record.image_id.clone(),
        objective,
        prompt: config.prompt_for(objective).to_string(),
        input_ocr: Vec::new(),
        input_caption_prefix: String::new(),
        target: String::new(),
    }
}

/// Predict the whole ordered OCR sequence.
pub fn build_ocr(record: &Record, config: &ObjectiveConfig) -> Built {
    if record.ocr.is_empty() {
        return Err(Ineligible::EmptyOcr);
    }
    let ordered = config.order(record);
    let mut ex = base(record, Objective::Ocr, config);
    ex.target = join_texts(ordered.tokens.iter().map(|t| t.text.as_str()), &config.format.separator);
    Ok(ex)
}

pub fn build_splitocr<R: Rng + ?Sized>(record: &Record, rng: &mut R, config: &ObjectiveConfig) -> Built {
    let k = sample_split_point(record.ocr.len(), rng)?;
    build_splitocr_at(record, k, config)
}

/// SPLITOCR with a fixed split point.
///
/// Panics if `k >= record.ocr.len()` on a non-empty record.
pub fn build_splitocr_at(record: &Record, k: usize, config: &ObjectiveConfig) -> Built {
    if record.ocr.is_empty() {
        return Err(Ineligible::EmptyOcr);
    }
    let ordered = config.order(record);
    assert!(k < ordered.len(), "split point {k} out of range for {} tokens", ordered.len());
    let texts = ordered.texts();
    let mut ex = base(record, Objective::SplitOcr, config);
    ex.target = join_texts(texts[k..].iter().map(String::as_str), &config.format.separator);
    ex.input_ocr = texts[..k].to_vec();
    Ok(ex)
}

fn usable_caption(record: &Record) -> std::result::Result<&str, Ineligible> {
    match record.caption.as_deref() {
        Some(c) if !c.trim().is_empty() => Ok(c),
        _ => Err(Ineligible::MissingCaption),
    }
}

/// Caption generation conditioned on image and the full ordered OCR.
pub fn build_cap(record: &Record, config: &ObjectiveConfig) -> Built {
    let caption = usable_caption(record)?;
    let mut ex = base(record, Objective::Cap, config);
    ex.input_ocr = config.order(record).texts();
    ex.target = caption.to_string();
    Ok(ex)
}

pub fn build_splitcap<R: Rng + ?Sized>(record: &Record, rng: &mut R, config: &ObjectiveConfig) -> Built {
    let caption = usable_caption(record)?;
    let words = caption.split_whitespace().count();
    let k = rng.gen_range(0..words);
    build_splitcap_at(record, k, config)
}

/// SPLITCAP with a fixed split point over the caption's whitespace-delimited words.
///
/// The caption is re-joined with single spaces, so irregular whitespace is not preserved.
pub fn build_splitcap_at(record: &Record, k: usize, config: &ObjectiveConfig) -> Built {
    let caption = usable_caption(record)?;
    let words: Vec<&str> = caption.split_whitespace().collect();
    assert!(k < words.len(), "split point {k} out of range for {} words", words.len());
    let mut ex = base(record, Objective::SplitCap, config);
    ex.input_ocr = config.order(record).texts();
    ex.input_caption_prefix = words[..k].join(" ");
    ex.target = words[k..].join(" ");
    Ok(ex)
}

/// Build `objective`'s example for `record`, deriving randomness from the config seed.
pub fn build_example(objective: Objective, record: &Record, config: &ObjectiveConfig) -> Built {
    match objective {
        Objective::Ocr => build_ocr(record, config),
        Objective::Cap => build_cap(record, config),
        Objective::SplitOcr => {
            build_splitocr(record, &mut record_rng(config, objective, &record.image_id), config)
        }
        Objective::SplitCap => {
            build_splitcap(record, &mut record_rng(config, objective, &record.image_id), config)
        }
    }
}

/// One stage of a sequential pre-training recipe, e.g. SPLITOCR then CAP.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub index: usize,
    pub objective: Objective,
    /// Output dataset name, unique within a plan.
    pub dataset: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagePlan {
    pub corpus: String,
    pub stages: Vec<Stage>,
}

impl StagePlan {
    /// Parse a comma-separated objective list such as `"splitocr,cap"`.
    pub fn parse(stages: &str, corpus: &str) -> Result<Self> {
        let objectives = stages
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Objective>>>()?;
        build_stage_plan(&objectives, corpus)
    }

    pub fn objectives(&self) -> Vec<Objective> {
        self.stages.iter().map(|s| s.objective).collect()
    }
}

pub fn build_stage_plan(stages: &[Objective], corpus: &str) -> Result<StagePlan> {
    if stages.is_empty() {
        return Err(Error::Config("stage plan needs at least one objective".into()));
    }
    Ok(StagePlan {
        corpus: corpus.to_string(),
        stages: stages
            .iter()
            .enumerate()
            .map(|(index, &objective)| Stage {
                index,
                objective,
                dataset: format!("stage-{index}-{}", objective.tag().to_ascii_lowercase()),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BBox, OcrToken};

    fn record_with(texts: &[&str]) -> Record {
        let mut r = Record::new("img");
        r.ocr = texts
            .iter()
            .enumerate()
            .map(|(i, t)| OcrToken::new(*t, BBox::new(i as f64 * 50.0, 0.0, 40.0, 10.0).unwrap()))
            .collect();
        r
    }

    #[test]
    fn split_point_single_token_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(sample_split_point(1, &mut rng), Ok(0));
        }
        assert_eq!(sample_split_point(0, &mut rng), Err(Ineligible::EmptyOcr));
    }

    #[test]
    fn four_tokens_split_two_two() {
        let r = record_with(&["A", "B", "C", "D"]);
        let ex = build_splitocr_at(&r, 2, &ObjectiveConfig::default()).unwrap();
        assert_eq!(ex.input_ocr, ["A", "B"]);
        assert_eq!(ex.target, "C D");
        assert_eq!(ex.objective, Objective::SplitOcr);
        assert_eq!(ex.prompt, "read:");
    }

    #[test]
    fn one_token_splitocr() {
        let r = record_with(&["X"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ex = build_splitocr(&r, &mut rng, &ObjectiveConfig::default()).unwrap();
        assert!(ex.input_ocr.is_empty());
        assert_eq!(ex.target, "X");
    }

    #[test]
    fn empty_ocr_is_skipped_for_ocr_objectives_only() {
        let mut r = record_with(&[]);
        let cfg = ObjectiveConfig::default();
        assert_eq!(build_example(Objective::Ocr, &r, &cfg), Err(Ineligible::EmptyOcr));
        assert_eq!(build_example(Objective::SplitOcr, &r, &cfg), Err(Ineligible::EmptyOcr));
        r.caption = Some("a dog".into());
        let cap = build_cap(&r, &cfg).unwrap();
        assert!(cap.input_ocr.is_empty());
        assert_eq!(cap.target, "a dog");
        assert!(build_example(Objective::SplitCap, &r, &cfg).is_ok());
    }

    #[test]
    fn ocr_objective() {
        let cfg = ObjectiveConfig::default();
        let ex = build_ocr(&record_with(&["STOP", "HERE"]), &cfg).unwrap();
        assert_eq!(ex.target, "STOP HERE");
        assert!(ex.input_ocr.is_empty());
        assert_eq!(build_ocr(&record_with(&["ONLY"]), &cfg).unwrap().target, "ONLY");
    }

    #[test]
    fn cap_objective() {
        let mut r = record_with(&["STOP"]);
        let cfg = ObjectiveConfig::default();
        assert_eq!(build_cap(&r, &cfg), Err(Ineligible::MissingCaption));
        r.caption = Some("a red stop sign".into());
        let ex = build_cap(&r, &cfg).unwrap();
        assert_eq!(ex.input_ocr, ["STOP"]);
        assert_eq!(ex.target, "a red stop sign");
        assert_eq!(ex.prompt, "caption:");
    }

    #[test]
    fn splitcap_objective() {
        let mut r = record_with(&["STOP"]);
        r.caption = Some("a red stop sign".into());
        let cfg = ObjectiveConfig::default();
        let ex = build_splitcap_at(&r, 1, &cfg).unwrap();
        assert_eq!(ex.input_caption_prefix, "a");
        assert_eq!(ex.target, "red stop sign");
        assert_eq!(ex.input_ocr, ["STOP"]);

        r.caption = Some("word".into());
        let ex = build_splitcap(&r, &mut ChaCha8Rng::seed_from_u64(1), &cfg).unwrap();
        assert_eq!(ex.input_caption_prefix, "");
        assert_eq!(ex.target, "word");

        r.caption = Some("   ".into());
        assert_eq!(build_example(Objective::SplitCap, &r, &cfg), Err(Ineligible::MissingCaption));
    }

    #[test]
    fn ids_distinguish_objective_and_pass() {
        assert_eq!(example_id("a", Objective::SplitOcr, 0), "a/splitocr/0");
        assert_ne!(example_id("a", Objective::Ocr, 0), example_id("a", Objective::Ocr, 1));
    }

    #[test]
    fn objective_tags_parse() {
        assert_eq!("splitocr".parse::<Objective>().unwrap(), Objective::SplitOcr);
        assert_eq!("CAP".parse::<Objective>().unwrap(), Objective::Cap);
        assert!("bogus".parse::<Objective>().is_err());
        assert_eq!(serde_json::to_string(&Objective::SplitCap).unwrap(), "\"SPLITCAP\"");
    }

    #[test]
    fn stage_plans() {
        let p = StagePlan::parse("splitocr,cap", "web-corpus").unwrap();
        assert_eq!(p.objectives(), [Objective::SplitOcr, Objective::Cap]);
        assert_eq!(p.stages[0].dataset, "stage-0-splitocr");
        assert_eq!(p.stages[1].dataset, "stage-1-cap");
        let p = build_stage_plan(&[Objective::Ocr, Objective::Cap], "web-corpus").unwrap();
        assert_eq!(p.stages.len(), 2);
        assert!(matches!(build_stage_plan(&[], "x"), Err(Error::Config(_))));
        assert!(matches!(StagePlan::parse("splitocr,bogus", "x"), Err(Error::Config(_))));
        assert!(matches!(StagePlan::parse("", "x"), Err(Error::Config(_))));
    }

    #[test]
    fn pass_index_changes_the_draw_stream() {
        let r = record_with(&["A", "B", "C", "D", "E", "F", "G", "H"]);
        let mut cfg = ObjectiveConfig { seed: 11, ..Default::default() };
        let draws: Vec<usize> = (0..16)
            .map(|p| {
                cfg.pass = p;
                build_example(Objective::SplitOcr, &r, &cfg).unwrap().input_ocr.len()
            })
            .collect();
        assert!(draws.iter().any(|&k| k != draws[0]), "{draws:?}");
    }
}
