//! VQA accuracy and ANLS on hand-written predictions.
//!
//! ```text
//! cargo run --example vqa_scoring
//! ```

use scenetext::metrics::{accuracy_from_matches, anls, normalize_answer, score_prediction, DEFAULT_TAU};

fn answers(spec: &[(&str, usize)]) -> Vec<String> {
    spec.iter().flat_map(|(a, n)| vec![a.to_string(); *n]).collect()
}

fn main() {
    println!("matches -> accuracy");
    for m in 0..=10 {
        println!("  {m:>2} -> {:.4}", accuracy_from_matches(m));
    }

    let gold = answers(&[("the night garden", 6), ("night garden", 3), ("garden", 1)]);
    for pred in ["The Night Garden.", "night garden", "Garden", "night gardens"] {
        println!(
            "{pred:<18} normalized={:<16?} acc={:.3} anls={:.3}",
            normalize_answer(pred),
            score_prediction(pred, &gold).unwrap(),
            anls(pred, &gold, DEFAULT_TAU).unwrap(),
        );
    }

    // ANLS forgives small OCR slips but zeroes anything below tau.
    let gold = vec!["hello".to_string()];
    for pred in ["hello", "hallo", "hxllx", "world"] {
        println!("anls({pred:?}, hello) = {:.2}", anls(pred, &gold, 0.5).unwrap());
    }

    // Anything but ten answers is rejected.
    println!("{}", score_prediction("x", &answers(&[("x", 3)])).unwrap_err());
}
