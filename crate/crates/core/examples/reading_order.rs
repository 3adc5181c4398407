//! Group OCR tokens into lines and read them top-to-bottom, left-to-right.
//!
//! ```text
//! cargo run --example reading_order
//! ```

use scenetext::corpus::{BBox, OcrToken};
use scenetext::order::{join_tokens, order_tokens, DEFAULT_OVERLAP_THRESHOLD};

fn tok(text: &str, x: f64, y: f64, w: f64, h: f64) -> OcrToken {
    OcrToken::new(text, BBox::new(x, y, w, h).unwrap())
}

fn main() {
    // Detector output arrives in arbitrary order; "&" sits a few pixels lower
    // than its neighbours but still overlaps their line.
    let tokens = vec![
        tok("OPEN", 520.0, 80.0, 80.0, 30.0),
        tok("TEA", 292.0, 62.0, 90.0, 42.0),
        tok("COFFEE", 100.0, 60.0, 150.0, 44.0),
        tok("24/7", 520.0, 118.0, 60.0, 22.0),
        tok("&", 262.0, 70.0, 20.0, 40.0),
    ];

    let ordered = order_tokens(&tokens, DEFAULT_OVERLAP_THRESHOLD);
    for (t, line) in ordered.tokens.iter().zip(&ordered.line_index) {
        println!("line {line}: {:<8} x={:<5} y={}", t.text, t.bbox.x, t.bbox.y);
    }
    println!("{} lines -> {:?}", ordered.line_count(), join_tokens(&ordered, " "));

    // A strict threshold splits lines whose boxes only partly overlap.
    let strict = order_tokens(&tokens, 1.0);
    println!("threshold 1.0: {} lines -> {:?}", strict.line_count(), join_tokens(&strict, " "));
}
