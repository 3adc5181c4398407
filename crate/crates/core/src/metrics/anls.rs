//! Levenshtein distance and ANLS.

use crate::error::{Error, Result};

pub const DEFAULT_TAU: f64 = 0.5;

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let next = (diag + usize::from(ca != cb))
                .min(row[j] + 1)
                .min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Normalized Levenshtein similarity in `[0, 1]`; two empty strings are identical.
pub fn similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (normalize(a), normalize(b));
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

/// Best thresholded similarity of `prediction` to any gold answer.
pub fn anls(prediction: &str, gold_answers: &[String], tau: f64) -> Result<f64> {
    if gold_answers.is_empty() {
        return Err(Error::Contract("ANLS needs at least one gold answer".into()));
    }
    Ok(gold_answers
        .iter()
        .map(|g| similarity(prediction, g))
        .map(|s| if s >= tau { s } else { 0.0 })
        .fold(0.0, f64::max))
}
