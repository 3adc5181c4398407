//! Reading order for OCR tokens: top-left to bottom-right.
//!
//! Tokens are sorted by vertical center and greedily grouped into lines: a
//! token joins the current line when its vertical extent overlaps the line's
//! running extent by at least `overlap_threshold × min(token height, line
//! height)`. Each line is then read left to right and lines are emitted top
//! to bottom.
//!
//! The result depends only on the multiset of input tokens, never on their
//! input order; all remaining ties fall through to `(x, y, text)` and then to
//! the rest of the token fields.

use std::cmp::Ordering;

use serde::Serialize;

use crate::corpus::OcrToken;
use crate::error::{Error, Result};

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.5;

/// Tokens in reading order, each tagged with its 0-based line number.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OrderedOcr {
    pub tokens: Vec<OcrToken>,
    pub line_index: Vec<usize>,
}

impl OrderedOcr {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }

    pub fn line_count(&self) -> usize {
        self.line_index.last().map_or(0, |l| l + 1)
    }
}

/// Rejects thresholds outside `(0, 1]`.
pub fn check_overlap_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "overlap threshold must be in (0, 1], got {threshold}"
        )))
    }
}

// Full tiebreak after the primary key; makes the order total over distinct tokens.
fn tiebreak(a: &OcrToken, b: &OcrToken) -> Ordering {
    a.bbox
        .x
        .total_cmp(&b.bbox.x)
        .then_with(|| a.bbox.y.total_cmp(&b.bbox.y))
        .then_with(|| a.text.cmp(&b.text))
        .then_with(|| a.bbox.w.total_cmp(&b.bbox.w))
        .then_with(|| a.bbox.h.total_cmp(&b.bbox.h))
        .then_with(|| a.confidence.total_cmp(&b.confidence))
}

fn by_center(a: &OcrToken, b: &OcrToken) -> Ordering {
    a.bbox
        .center_y()
        .total_cmp(&b.bbox.center_y())
        .then_with(|| tiebreak(a, b))
}

fn overlap(a_top: f64, a_bottom: f64, b_top: f64, b_bottom: f64) -> f64 {
    (a_bottom.min(b_bottom) - a_top.max(b_top)).max(0.0)
}

/// Order `tokens` for reading. `overlap_threshold` must lie in `(0, 1]`.
pub fn order_tokens(tokens: &[OcrToken], overlap_threshold: f64) -> OrderedOcr {
    debug_assert!(check_overlap_threshold(overlap_threshold).is_ok());

    let mut sorted: Vec<&OcrToken> = tokens.iter().collect();
    sorted.sort_by(|a, b| by_center(a, b));

    let mut lines: Vec<Vec<&OcrToken>> = Vec::new();
    let (mut top, mut bottom) = (0.0_f64, 0.0_f64);
    for tok in sorted {
        let (t, b) = (tok.bbox.y, tok.bbox.bottom());
        let joins = match lines.last() {
            Some(_) => {
                let min_h = tok.bbox.h.min(bottom - top);
                overlap(t, b, top, bottom) >= overlap_threshold * min_h
            }
            None => false,
        };
        if joins {
            lines.last_mut().expect("checked above").push(tok);
            top = top.min(t);
            bottom = bottom.max(b);
        } else {
            lines.push(vec![tok]);
            top = t;
            bottom = b;
        }
    }

    let mut out = OrderedOcr {
        tokens: Vec::with_capacity(tokens.len()),
        line_index: Vec::with_capacity(tokens.len()),
    };
    for (li, mut line) in lines.into_iter().enumerate() {
        line.sort_by(|a, b| tiebreak(a, b));
        for tok in line {
            out.tokens.push(tok.clone());
            out.line_index.push(li);
        }
    }
    out
}

/// Concatenate token texts with `separator`.
pub fn join_tokens(ordered: &OrderedOcr, separator: &str) -> String {
    join_texts(ordered.tokens.iter().map(|t| t.text.as_str()), separator)
}

pub(crate) fn join_texts<'a>(texts: impl IntoIterator<Item = &'a str>, separator: &str) -> String {
    let mut out = String::new();
    for (i, t) in texts.into_iter().enumerate() {
        if i > 0 {
            out.push_str(separator);
        }
        out.push_str(t);
    }
    out
}
