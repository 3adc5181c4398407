//! Scoring a predictions file against a gold file.
//!
//! Predictions: `{"example_id": str, "prediction": str}` per line.
//! Gold: `{"example_id": str, "answers": [str; 10]}` for VQA, and
//! `{"example_id": str, "references": [str, ...]}` or `{"example_id": str,
//! "target": str}` for captioning. Fine-tune JSONL files written by this
//! crate are valid gold files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::anls::{anls, DEFAULT_TAU};
use super::bleu::{bleu4, item_stats};
use super::caption::CaptionItem;
use super::cider::cider_per_item;
use super::rouge::rouge_l;
use super::vqa::score_prediction;
use crate::error::{Error, Result};
use crate::io::read_jsonl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EvalTask {
    /// VQA accuracy.
    Vqa,
    /// VQA accuracy and ANLS (ST-VQA style "Acc / ANLS").
    VqaAnls,
    /// BLEU@4, ROUGE-L and CIDEr-D.
    Caption,
}

impl fmt::Display for EvalTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalTask::Vqa => "VQA",
            EvalTask::VqaAnls => "VQA_ANLS",
            EvalTask::Caption => "CAPTION",
        })
    }
}

impl FromStr for EvalTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "vqa" => Ok(EvalTask::Vqa),
            "vqa_anls" | "anls" => Ok(EvalTask::VqaAnls),
            "caption" | "captioning" => Ok(EvalTask::Caption),
            other => Err(Error::Config(format!("unknown evaluation task {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub example_id: String,
    pub prediction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Gold {
    pub example_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl Gold {
    fn caption_references(&self) -> Result<Vec<String>> {
        match (&self.references, &self.target) {
            (Some(r), _) if !r.is_empty() => Ok(r.clone()),
            (_, Some(t)) => Ok(vec![t.clone()]),
            _ => Err(Error::Contract(format!(
                "gold {} has neither references nor target",
                self.example_id
            ))),
        }
    }

    fn vqa_answers(&self) -> Result<&[String]> {
        self.answers.as_deref().ok_or_else(|| {
            Error::Contract(format!("gold {} has no answers", self.example_id))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemScores {
    pub example_id: String,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub task: EvalTask,
    pub n_items: usize,
    pub aggregate: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_item: Vec<ItemScores>,
}

impl MetricReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.aggregate.get(name).copied()
    }

    /// One-line human summary, e.g. `VQA_ANLS n=2 accuracy=0.9500 anls=0.8000`.
    pub fn summary(&self) -> String {
        let mut s = format!("{} n={}", self.task, self.n_items);
        for (k, v) in &self.aggregate {
            s.push_str(&format!(" {k}={v:.4}"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub tau: f64,
    pub per_item: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tau: DEFAULT_TAU,
            per_item: true,
        }
    }
}

/// Pair predictions with gold by `example_id`, in ascending id order.
pub fn align(
    predictions: Vec<Prediction>,
    gold: Vec<Gold>,
) -> Result<Vec<(Prediction, Gold)>> {
    let mut duplicates = Vec::new();
    let mut preds = BTreeMap::new();
    for p in predictions {
        let id = p.example_id.clone();
        if preds.insert(id.clone(), p).is_some() {
            duplicates.push(id);
        }
    }
    let mut golds = BTreeMap::new();
    for g in gold {
        let id = g.example_id.clone();
        if golds.insert(id.clone(), g).is_some() {
            duplicates.push(id);
        }
    }
    let missing_gold: Vec<String> = preds.keys().filter(|k| !golds.contains_key(*k)).cloned().collect();
    let missing_prediction: Vec<String> =
        golds.keys().filter(|k| !preds.contains_key(*k)).cloned().collect();

    if preds.is_empty() || !missing_gold.is_empty() || !missing_prediction.is_empty() || !duplicates.is_empty() {
        duplicates.sort();
        duplicates.dedup();
        return Err(Error::Alignment {
            missing_gold,
            missing_prediction,
            duplicates,
        });
    }
    Ok(preds
        .into_values()
        .zip(golds.into_values())
        .collect())
}

pub fn evaluate_pairs(
    pairs: &[(Prediction, Gold)],
    task: EvalTask,
    options: EvalOptions,
) -> Result<MetricReport> {
    let n = pairs.len();
    let mut per_item: Vec<ItemScores> = pairs
        .iter()
        .map(|(p, _)| ItemScores {
            example_id: p.example_id.clone(),
            scores: BTreeMap::new(),
        })
        .collect();
    let mut aggregate = BTreeMap::new();

    match task {
        EvalTask::Vqa | EvalTask::VqaAnls => {
            let mut acc_sum = 0.0;
            let mut anls_sum = 0.0;
            for ((p, g), out) in pairs.iter().zip(per_item.iter_mut()) {
                let answers = g.vqa_answers()?;
                let acc = score_prediction(&p.prediction, answers)?;
                acc_sum += acc;
                out.scores.insert("accuracy".into(), acc);
                if task == EvalTask::VqaAnls {
                    let s = anls(&p.prediction, answers, options.tau)?;
                    anls_sum += s;
                    out.scores.insert("anls".into(), s);
                }
            }
            aggregate.insert("accuracy".into(), acc_sum / n as f64);
            if task == EvalTask::VqaAnls {
                aggregate.insert("anls".into(), anls_sum / n as f64);
            }
        }
        EvalTask::Caption => {
            let items = pairs
                .iter()
                .map(|(p, g)| CaptionItem::new(p.prediction.clone(), g.caption_references()?))
                .collect::<Result<Vec<_>>>()?;
            let ciders = cider_per_item(&items)?;
            let mut rouge_sum = 0.0;
            for ((item, c), out) in items.iter().zip(&ciders).zip(per_item.iter_mut()) {
                let r = rouge_l(item)?;
                rouge_sum += r;
                out.scores.insert("cider".into(), *c);
                out.scores.insert("rougeL".into(), r);
                out.scores.insert("bleu4".into(), item_stats(item).score());
            }
            aggregate.insert("bleu4".into(), bleu4(&items)?);
            aggregate.insert("rougeL".into(), rouge_sum / n as f64);
            aggregate.insert("cider".into(), ciders.iter().sum::<f64>() / n as f64);
        }
    }

    if !options.per_item {
        per_item.clear();
    }
    Ok(MetricReport {
        task,
        n_items: n,
        aggregate,
        per_item,
    })
}

pub fn evaluate(
    predictions: &Path,
    gold: &Path,
    task: EvalTask,
    options: EvalOptions,
) -> Result<MetricReport> {
    let preds: Vec<Prediction> = read_jsonl(predictions)?;
    let golds: Vec<Gold> = read_jsonl(gold)?;
    let pairs = align(preds, golds)?;
    evaluate_pairs(&pairs, task, options)
}
