//! CIDEr-D.
//!
//! TF-IDF weighted n-gram vectors (n = 1..4) with document frequencies taken
//! over the reference sets of the whole corpus, clipped candidate weights, and
//! a gaussian length penalty with σ = 6. Per item, the n-gram similarities are
//! averaged over n, averaged over references and scaled by 10.
//!
//! As in the widely used COCO scorer, the length fed to the penalty is the
//! number of bigrams of a sentence.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use super::caption::{ngram_counts, tokenize, CaptionItem};
use crate::error::{Error, Result};

const MAX_N: usize = 4;
pub const SIGMA: f64 = 6.0;

struct TfIdf {
    /// One weight map per n-gram order.
    weights: [BTreeMap<String, f64>; MAX_N],
    norms: [f64; MAX_N],
    length: f64,
}

struct DocFreq {
    df: HashMap<(usize, String), f64>,
    log_corpus: f64,
}

impl DocFreq {
    fn vectorize(&self, text: &str) -> TfIdf {
        let counts = ngram_counts(&tokenize(text), MAX_N);
        let mut weights: [BTreeMap<String, f64>; MAX_N] = Default::default();
        let mut norms = [0.0; MAX_N];
        let mut length = 0.0;
        for ((n, gram), tf) in counts {
            let df = self.df.get(&(n, gram.clone())).copied().unwrap_or(0.0).max(1.0).ln();
            let w = tf as f64 * (self.log_corpus - df);
            norms[n - 1] += w * w;
            if n == 2 {
                length += tf as f64;
            }
            weights[n - 1].insert(gram, w);
        }
        TfIdf {
            weights,
            norms: norms.map(f64::sqrt),
            length,
        }
    }
}

fn similarity(cand: &TfIdf, reference: &TfIdf) -> f64 {
    let delta = cand.length - reference.length;
    let penalty = (-(delta * delta) / (2.0 * SIGMA * SIGMA)).exp();
    let mut total = 0.0;
    for n in 0..MAX_N {
        let mut val: f64 = cand.weights[n]
            .iter()
            .map(|(gram, &wc)| {
                let wr = reference.weights[n].get(gram).copied().unwrap_or(0.0);
                wc.min(wr) * wr
            })
            .sum();
        if cand.norms[n] != 0.0 && reference.norms[n] != 0.0 {
            val /= cand.norms[n] * reference.norms[n];
        }
        total += val * penalty;
    }
    total / MAX_N as f64
}

/// Per-item CIDEr-D scores, each in `[0, 10]`.
pub fn cider_per_item(items: &[CaptionItem]) -> Result<Vec<f64>> {
    if items.len() < 2 {
        return Err(Error::Contract(format!(
            "CIDEr needs at least 2 items for document frequencies, got {}",
            items.len()
        )));
    }
    if let Some(i) = items.iter().position(|it| it.references.is_empty()) {
        return Err(Error::Contract(format!("caption item {i} has no references")));
    }

    let mut df: HashMap<(usize, String), f64> = HashMap::new();
    for item in items {
        let grams: HashSet<(usize, String)> = item
            .references
            .iter()
            .flat_map(|r| ngram_counts(&tokenize(r), MAX_N).into_keys())
            .collect();
        for g in grams {
            *df.entry(g).or_insert(0.0) += 1.0;
        }
    }
    let doc_freq = DocFreq {
        df,
        log_corpus: (items.len() as f64).ln(),
    };

    Ok(items
        .par_iter()
        .map(|item| {
            let cand = doc_freq.vectorize(&item.candidate);
            let sum: f64 = item
                .references
                .iter()
                .map(|r| similarity(&cand, &doc_freq.vectorize(r)))
                .sum();
            10.0 * sum / item.references.len() as f64
        })
        .collect())
}

/// Corpus CIDEr-D: the mean of the per-item scores.
pub fn cider(items: &[CaptionItem]) -> Result<f64> {
    let scores = cider_per_item(items)?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}
