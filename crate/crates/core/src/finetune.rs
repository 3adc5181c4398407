//! Downstream example formatting for scene-text VQA and captioning.
//!
//! Both tasks are open-ended generation. VQA input is
//! `prompt question <delim> OCR: tokens`; captioning input is
//! `prompt <delim> OCR: tokens`. With `ocr_included = false` the OCR segment
//! is dropped entirely.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Record;
use crate::error::{Error, Ineligible, Result};
use crate::format::TextFormat;
use crate::order::{order_tokens, DEFAULT_OVERLAP_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Task {
    Vqa,
    Caption,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Vqa => "VQA",
            Task::Caption => "CAPTION",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vqa" => Ok(Task::Vqa),
            "caption" | "captioning" => Ok(Task::Caption),
            other => Err(Error::Config(format!("unknown task {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneConfig {
    pub vqa_prompt: String,
    pub caption_prompt: String,
    pub overlap_threshold: f64,
    pub format: TextFormat,
}

impl Default for FinetuneConfig {
    fn default() -> Self {
        FinetuneConfig {
            vqa_prompt: "answer:".into(),
            caption_prompt: "caption:".into(),
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            format: TextFormat::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneExample {
    pub example_id: String,
    pub image_id: String,
    pub task: Task,
    pub input_text: String,
    pub target: String,
    pub ocr_included: bool,
    /// All ground-truth answers, carried through for evaluation (VQA only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answers: Option<Vec<String>>,
}

impl FinetuneExample {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("example serialization is infallible")
    }
}

/// Most frequent answer (after trimming); ties go to the lexicographically smallest.
pub fn majority_answer(answers: &[String]) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for a in answers {
        *counts.entry(a.trim()).or_default() += 1;
    }
    // BTreeMap iterates in ascending key order, so keeping only strictly larger counts
    // leaves the smallest key among the maxima.
    let mut best: Option<(&str, usize)> = None;
    for (answer, n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((answer, n));
        }
    }
    best.map(|(a, _)| a.to_string())
}

fn ordered_ocr(record: &Record, config: &FinetuneConfig) -> Vec<String> {
    order_tokens(&record.ocr, config.overlap_threshold).texts()
}

/// One example per question; the target is the majority answer.
pub fn build_vqa_examples(
    record: &Record,
    ocr_included: bool,
    config: &FinetuneConfig,
) -> std::result::Result<Vec<FinetuneExample>, Ineligible> {
    let qa = match record.qa.as_deref() {
        Some(qa) if !qa.is_empty() => qa,
        _ => return Err(Ineligible::MissingQa),
    };
    let ocr = ocr_included.then(|| ordered_ocr(record, config));
    Ok(qa
        .iter()
        .enumerate()
        .filter_map(|(i, q)| {
            let target = majority_answer(&q.answers)?;
            Some(FinetuneExample {
                example_id: format!("{}/vqa/{i}", record.image_id),
                image_id: record.image_id.clone(),
                task: Task::Vqa,
                input_text: config
                    .format
                    .render(&config.vqa_prompt, &[q.question.trim()], ocr.as_deref()),
                target,
                ocr_included,
                answers: Some(q.answers.clone()),
            })
        })
        .collect())
}

pub fn build_caption_examples(
    record: &Record,
    ocr_included: bool,
    config: &FinetuneConfig,
) -> std::result::Result<Vec<FinetuneExample>, Ineligible> {
    let caption = match record.caption.as_deref() {
        Some(c) if !c.trim().is_empty() => c,
        _ => return Err(Ineligible::MissingCaption),
    };
    let ocr = ocr_included.then(|| ordered_ocr(record, config));
    Ok(vec![FinetuneExample {
        example_id: format!("{}/caption/0", record.image_id),
        image_id: record.image_id.clone(),
        task: Task::Caption,
        input_text: config.format.render(&config.caption_prompt, &[], ocr.as_deref()),
        target: caption.to_string(),
        ocr_included,
        answers: None,
    }])
}

pub fn build_examples(
    task: Task,
    record: &Record,
    ocr_included: bool,
    config: &FinetuneConfig,
) -> std::result::Result<Vec<FinetuneExample>, Ineligible> {
    match task {
        Task::Vqa => build_vqa_examples(record, ocr_included, config),
        Task::Caption => build_caption_examples(record, ocr_included, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BBox, OcrToken, QaAnnotation};

    fn stop_record() -> Record {
        let mut r = Record::new("img");
        r.ocr = vec![OcrToken::new("STOP", BBox::new(0.0, 0.0, 10.0, 10.0).unwrap())];
        r
    }

    fn answers(spec: &[(&str, usize)]) -> Vec<String> {
        spec.iter()
            .flat_map(|(a, n)| std::iter::repeat_n(a.to_string(), *n))
            .collect()
    }

    #[test]
    fn vqa_with_ocr() {
        let mut r = stop_record();
        r.qa = Some(vec![QaAnnotation {
            question: "what does the sign say".into(),
            answers: answers(&[("stop", 8), ("stop sign", 2)]),
        }]);
        let ex = build_vqa_examples(&r, true, &FinetuneConfig::default()).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].input_text, "answer: what does the sign say \n OCR: STOP");
        assert_eq!(ex[0].target, "stop");
        assert_eq!(ex[0].answers.as_ref().unwrap().len(), 10);
        assert_eq!(ex[0].task, Task::Vqa);

        let ex = build_vqa_examples(&r, false, &FinetuneConfig::default()).unwrap();
        assert!(!ex[0].input_text.contains("STOP"));
        assert!(ex[0].input_text.contains("what does the sign say"));
        assert!(!ex[0].ocr_included);
    }

    #[test]
    fn vqa_needs_qa() {
        let r = stop_record();
        assert_eq!(
            build_vqa_examples(&r, true, &FinetuneConfig::default()),
            Err(Ineligible::MissingQa)
        );
    }

    #[test]
    fn majority_ties_break_lexicographically() {
        assert_eq!(majority_answer(&answers(&[("b", 5), ("a", 5)])).unwrap(), "a");
        assert_eq!(majority_answer(&answers(&[("b", 6), ("a", 4)])).unwrap(), "b");
        assert_eq!(majority_answer(&answers(&[(" x ", 1), ("x", 1), ("y", 1)])).unwrap(), "x");
        assert_eq!(majority_answer(&[]), None);
    }

    #[test]
    fn caption_examples() {
        let mut r = stop_record();
        r.caption = Some("a stop sign on a pole".into());
        let cfg = FinetuneConfig::default();
        let ex = build_caption_examples(&r, true, &cfg).unwrap();
        assert_eq!(ex[0].input_text, "caption: \n OCR: STOP");
        assert_eq!(ex[0].target, "a stop sign on a pole");
        assert!(ex[0].answers.is_none());

        assert_eq!(build_caption_examples(&r, false, &cfg).unwrap()[0].input_text, "caption:");

        r.ocr.clear();
        assert_eq!(build_caption_examples(&r, true, &cfg).unwrap()[0].input_text, "caption: \n OCR: ");

        r.caption = None;
        assert_eq!(build_caption_examples(&r, true, &cfg), Err(Ineligible::MissingCaption));
    }

    #[test]
    fn vqa_question_never_leaks_into_caption_input() {
        let mut r = stop_record();
        r.caption = Some("c".into());
        r.qa = Some(vec![QaAnnotation { question: "unique question".into(), answers: answers(&[("x", 10)]) }]);
        let ex = build_caption_examples(&r, true, &FinetuneConfig::default()).unwrap();
        assert!(!ex[0].input_text.contains("unique question"));
    }

    #[test]
    fn task_parse_and_wire_names() {
        assert_eq!("vqa".parse::<Task>().unwrap(), Task::Vqa);
        assert_eq!("caption".parse::<Task>().unwrap(), Task::Caption);
        assert!("x".parse::<Task>().is_err());
        assert_eq!(serde_json::to_string(&Task::Caption).unwrap(), "\"CAPTION\"");
    }
}
