//! The four pre-training objectives on one record.
//!
//! ```text
//! cargo run --example pretrain_objectives
//! ```

use scenetext::corpus::parse_record;
use scenetext::objective::{build_example, build_splitocr_at, Objective, ObjectiveConfig};

const RECORD: &str = r#"{"image_id":"book_0004","caption":"the cover of a book titled the night garden",
 "ocr":[{"text":"GARDEN","bbox":[130,215,220,60]},{"text":"THE","bbox":[200,100,80,40]},
        {"text":"NIGHT","bbox":[140,150,200,60]},{"text":"novel","bbox":[280,598,70,24]}]}"#;

fn main() {
    let record = parse_record(&RECORD.replace('\n', "")).unwrap();
    let config = ObjectiveConfig {
        seed: 7,
        ..ObjectiveConfig::default()
    };

    for objective in Objective::ALL {
        let ex = build_example(objective, &record, &config).unwrap();
        println!("== {objective} ({})", ex.example_id);
        println!("input:  {:?}", ex.input_text(&config.format));
        println!("target: {:?}", ex.target);
    }

    // Every split point reassembles to the full OCR sequence.
    println!("== SPLITOCR at each k");
    for k in 0..record.ocr.len() {
        let ex = build_splitocr_at(&record, k, &config).unwrap();
        println!("k={k} input={:?} target={:?}", ex.input_ocr, ex.target);
    }

    // A new pass re-draws the split point.
    for pass in 0..8 {
        let c = ObjectiveConfig { pass, ..config.clone() };
        let ex = build_example(Objective::SplitOcr, &record, &c).unwrap();
        println!("pass {pass}: k={}", ex.input_ocr.len());
    }
}
