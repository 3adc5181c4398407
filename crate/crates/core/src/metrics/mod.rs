//! Evaluation metrics for scene-text VQA and captioning.
//!
//! | task     | metrics                         |
//! |----------|---------------------------------|
//! | VQA      | accuracy                        |
//! | VQA_ANLS | accuracy, ANLS (τ = 0.5)        |
//! | CAPTION  | BLEU@4, ROUGE-L, CIDEr-D (σ = 6) |
//!
//! Caption metrics share one tokenizer (lowercase, split on
//! non-alphanumerics). VQA answers go through [`normalize_answer`]; ANLS only
//! lowercases and trims, since it scores at character level.

pub mod anls;
pub mod bleu;
pub mod caption;
pub mod cider;
pub mod evaluate;
pub mod rouge;
pub mod vqa;

pub use anls::{anls, levenshtein, similarity, DEFAULT_TAU};
pub use bleu::bleu4;
pub use caption::{tokenize, CaptionItem};
pub use cider::{cider, cider_per_item};
pub use evaluate::{align, evaluate, evaluate_pairs, EvalOptions, EvalTask, Gold, ItemScores, MetricReport, Prediction};
pub use rouge::{rouge_l, rouge_l_corpus};
pub use vqa::{accuracy_from_matches, normalize_answer, score_prediction, vqa_accuracy, VqaItem};
