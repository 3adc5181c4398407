//! Stream validation: parse errors, schema errors and soft violations.
//!
//! ```text
//! cargo run --example validate_records
//! ```

use scenetext::corpus::{parse_record, StreamValidator};

fn main() {
    let lines = [
        r#"{"image_id":"ok","ocr":[{"text":"STOP","bbox":[10,10,40,20]}],"image_size":[100,100]}"#,
        r#"{"image_id":"ok","ocr":[]}"#,
        r#"{"image_id":"edge","ocr":[{"text":"WIDE","bbox":[90,10,40,20],"confidence":1.5}],"image_size":[100,100]}"#,
        r#"{"image_id":"neg","ocr":[{"text":"X","bbox":[0,0,-4,2]}]}"#,
        r#"{"image_id":"qa","ocr":[],"qa":[{"question":"q?","answers":[]}]}"#,
        r#"{"image_id": "cut", "ocr": ["#,
    ];
    let mut validator = StreamValidator::new();
    for (no, line) in lines.iter().enumerate() {
        match parse_record(line) {
            Ok(record) => {
                let report = validator.validate(&record);
                let codes: Vec<&str> = report.violations.iter().map(|v| v.code()).collect();
                println!("{}: {} eligible={} {codes:?}", no + 1, record.image_id, report.is_eligible());
            }
            Err(e) => println!("{}: {e}", no + 1),
        }
    }
}
