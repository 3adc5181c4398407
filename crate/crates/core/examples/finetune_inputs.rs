//! Fine-tuning examples with and without OCR in the input, and how the
//! captioning input lines up with CAP pre-training.
//!
//! ```text
//! cargo run --example finetune_inputs
//! ```

use scenetext::corpus::{parse_record, Record};
use scenetext::finetune::{build_examples, FinetuneConfig, Task};
use scenetext::objective::{build_cap, ObjectiveConfig};

const SAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sample.jsonl");

fn main() {
    let records: Vec<Record> = std::fs::read_to_string(SAMPLE)
        .unwrap()
        .lines()
        .map(|l| parse_record(l).unwrap())
        .collect();
    let ft = FinetuneConfig::default();
    let record = &records[0];

    for task in [Task::Vqa, Task::Caption] {
        for ocr in [true, false] {
            for ex in build_examples(task, record, ocr, &ft).unwrap() {
                println!("{} ocr={ocr}\n  input:  {:?}\n  target: {:?}", ex.example_id, ex.input_text, ex.target);
            }
        }
    }

    let cap = build_cap(record, &ObjectiveConfig::default()).unwrap();
    let caption = &build_examples(Task::Caption, record, true, &ft).unwrap()[0];
    println!(
        "CAP input == CAPTION input: {}",
        cap.input_text(&ft.format) == caption.input_text
    );

    // Records without the needed annotation are skipped with a reason.
    for r in &records {
        if let Err(reason) = build_examples(Task::Vqa, r, true, &ft) {
            println!("{}: skipped ({reason})", r.image_id);
        }
    }
}
