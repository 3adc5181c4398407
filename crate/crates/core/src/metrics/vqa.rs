//! VQA accuracy with ten annotator answers.

use crate::error::{Error, Result};

pub const ANSWERS_PER_QUESTION: usize = 10;

const PUNCTUATION: &[char] = &['.', ',', '!', '?', '"', '\''];
const ARTICLES: &[&str] = &["a", "an", "the"];
const DIGIT_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
];

/// Answer normalization applied before VQA matching.
///
/// Lowercases, strips `.,!?"'` from both ends of each word, collapses
/// whitespace, spells `zero`..`ten` as digits and drops `a`/`an`/`the`.
pub fn normalize_answer(text: &str) -> String {
    let lower = text.to_lowercase();
    let mut out: Vec<String> = Vec::new();
    for word in lower.split_whitespace() {
        let word = word.trim_matches(PUNCTUATION);
        if word.is_empty() || ARTICLES.contains(&word) {
            continue;
        }
        match DIGIT_WORDS.iter().position(|d| *d == word) {
            Some(n) => out.push(n.to_string()),
            None => out.push(word.to_string()),
        }
    }
    out.join(" ")
}

/// A prediction with its ten ground-truth answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VqaItem {
    pub prediction: String,
    pub answers: Vec<String>,
}

impl VqaItem {
    pub fn new(prediction: impl Into<String>, answers: Vec<String>) -> Result<Self> {
        check_answer_count(answers.len())?;
        Ok(VqaItem {
            prediction: prediction.into(),
            answers,
        })
    }
}

fn check_answer_count(n: usize) -> Result<()> {
    if n == ANSWERS_PER_QUESTION {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "VQA accuracy needs exactly {ANSWERS_PER_QUESTION} answers, got {n}"
        )))
    }
}

/// Mean over the ten leave-one-out subsets of `min(matches / 3, 1)`, given
/// `matches` annotators agreeing with the prediction out of ten.
///
/// Computed as an integer numerator over 30, so equal inputs give bit-equal
/// results regardless of how the ten terms are grouped.
pub fn accuracy_from_matches(matches: usize) -> f64 {
    assert!(matches <= ANSWERS_PER_QUESTION);
    let m = matches;
    // Dropping a matching annotator leaves m-1 matches, a non-matching one leaves m.
    let with_match_dropped = m * m.saturating_sub(1).min(3);
    let with_other_dropped = (ANSWERS_PER_QUESTION - m) * m.min(3);
    (with_match_dropped + with_other_dropped) as f64 / (3 * ANSWERS_PER_QUESTION) as f64
}

pub fn vqa_accuracy(item: &VqaItem) -> Result<f64> {
    score_prediction(&item.prediction, &item.answers)
}

/// VQA accuracy of `prediction` against exactly ten `answers`.
pub fn score_prediction(prediction: &str, answers: &[String]) -> Result<f64> {
    check_answer_count(answers.len())?;
    let pred = normalize_answer(prediction);
    let matches = answers
        .iter()
        .filter(|a| normalize_answer(a) == pred)
        .count();
    Ok(accuracy_from_matches(matches))
}
