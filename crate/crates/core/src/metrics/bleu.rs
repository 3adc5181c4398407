//! Corpus-level BLEU-4.
//!
//! Clipped n-gram counts are summed over the corpus before taking the
//! precisions' geometric mean (no smoothing). The brevity penalty compares
//! the total candidate length with the sum of closest reference lengths,
//! preferring the shorter reference on ties.

use std::collections::HashMap;

use super::caption::{ngram_counts, tokenize, CaptionItem};
use crate::error::{Error, Result};

const MAX_N: usize = 4;

/// Sufficient statistics for corpus BLEU; summable across items in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_N],
    pub totals: [u64; MAX_N],
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl BleuStats {
    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_N {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
    }

    pub fn score(&self) -> f64 {
        if self.candidate_len == 0 || self.matches.contains(&0) {
            return 0.0;
        }
        let log_precision: f64 = (0..MAX_N)
            .map(|n| (self.matches[n] as f64 / self.totals[n] as f64).ln())
            .sum::<f64>()
            / MAX_N as f64;
        let (c, r) = (self.candidate_len as f64, self.reference_len as f64);
        let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
        brevity * log_precision.exp()
    }
}

pub fn item_stats(item: &CaptionItem) -> BleuStats {
    let cand = tokenize(&item.candidate);
    let refs: Vec<Vec<String>> = item.references.iter().map(|r| tokenize(r)).collect();

    let mut max_ref: HashMap<(usize, String), usize> = HashMap::new();
    for r in &refs {
        for (g, c) in ngram_counts(r, MAX_N) {
            let e = max_ref.entry(g).or_insert(0);
            *e = (*e).max(c);
        }
    }

    let mut stats = BleuStats::default();
    for ((n, g), c) in ngram_counts(&cand, MAX_N) {
        let clip = max_ref.get(&(n, g)).copied().unwrap_or(0);
        stats.matches[n - 1] += c.min(clip) as u64;
    }
    for n in 1..=MAX_N {
        stats.totals[n - 1] = (cand.len() + 1).saturating_sub(n) as u64;
    }
    stats.candidate_len = cand.len() as u64;
    stats.reference_len = refs
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| (len.abs_diff(cand.len()), len))
        .unwrap_or(0) as u64;
    stats
}

pub fn bleu4(items: &[CaptionItem]) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::Contract("BLEU needs at least one item".into()));
    }
    let mut total = BleuStats::default();
    for item in items {
        total.add(&item_stats(item));
    }
    Ok(total.score())
}
