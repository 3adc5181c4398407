//! ROUGE-L: LCS-based F-measure, β = 1.2, best reference per item.

use super::caption::{tokenize, CaptionItem};
use crate::error::{Error, Result};

pub const BETA: f64 = 1.2;

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

fn f_measure(lcs: usize, cand_len: usize, ref_len: usize) -> f64 {
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / cand_len as f64;
    let r = lcs as f64 / ref_len as f64;
    let b2 = BETA * BETA;
    (1.0 + b2) * p * r / (r + b2 * p)
}

pub fn rouge_l(item: &CaptionItem) -> Result<f64> {
    if item.references.is_empty() {
        return Err(Error::Contract("ROUGE-L needs at least one reference".into()));
    }
    let cand = tokenize(&item.candidate);
    Ok(item
        .references
        .iter()
        .map(|r| {
            let r = tokenize(r);
            f_measure(lcs_len(&cand, &r), cand.len(), r.len())
        })
        .fold(0.0, f64::max))
}

/// Mean ROUGE-L over items.
pub fn rouge_l_corpus(items: &[CaptionItem]) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::Contract("ROUGE-L needs at least one item".into()));
    }
    let mut sum = 0.0;
    for item in items {
        sum += rouge_l(item)?;
    }
    Ok(sum / items.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(c: &str, refs: &[&str]) -> CaptionItem {
        CaptionItem::new(c, refs.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn lcs() {
        let t = |s: &str| tokenize(s);
        assert_eq!(lcs_len(&t("a b c d"), &t("a c d")), 3);
        assert_eq!(lcs_len(&t("a b"), &t("c d")), 0);
        assert_eq!(lcs_len::<String>(&[], &t("a")), 0);
    }

    #[test]
    fn values() {
        assert_eq!(rouge_l(&item("a stop sign", &["A stop sign."])).unwrap(), 1.0);
        assert_eq!(rouge_l(&item("x y", &["a b"])).unwrap(), 0.0);
        // P = 3/4, R = 1: (1 + 1.44) * 0.75 / (1 + 1.44 * 0.75) = 1.83 / 2.08
        let f = rouge_l(&item("a b c d", &["a c d"])).unwrap();
        assert!((f - 1.83 / 2.08).abs() < 1e-12, "{f}");
        assert_eq!(rouge_l(&item("", &["a"])).unwrap(), 0.0);
    }

    #[test]
    fn best_reference_wins() {
        let f = rouge_l(&item("a b c d", &["x", "a c d", "q r"])).unwrap();
        assert!((f - 1.83 / 2.08).abs() < 1e-12);
    }
}
