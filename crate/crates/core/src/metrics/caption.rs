//! Shared pieces of the captioning metrics.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A candidate caption and its references.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptionItem {
    pub candidate: String,
    pub references: Vec<String>,
}

impl CaptionItem {
    pub fn new(candidate: impl Into<String>, references: Vec<String>) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::Contract("caption item needs at least one reference".into()));
        }
        Ok(CaptionItem {
            candidate: candidate.into(),
            references,
        })
    }
}

/// Lowercase and split on anything that is not alphanumeric.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// n-gram counts for `n` in `1..=max_n`, keyed by the space-joined n-gram.
///
/// Tokens never contain spaces, so the joined key is unambiguous.
/// Ordered, so sums over the counts are reproducible bit for bit.
pub(crate) fn ngram_counts(tokens: &[String], max_n: usize) -> BTreeMap<(usize, String), usize> {
    let mut counts = BTreeMap::new();
    for n in 1..=max_n {
        for w in tokens.windows(n) {
            *counts.entry((n, w.join(" "))).or_insert(0) += 1;
        }
    }
    counts
}
