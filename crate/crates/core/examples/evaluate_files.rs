//! File-level evaluation: predictions and gold joined on `example_id`.
//!
//! ```text
//! cargo run --example evaluate_files
//! ```

use scenetext::metrics::{evaluate, EvalOptions, EvalTask};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let (pred, gold) = (dir.path().join("pred.jsonl"), dir.path().join("gold.jsonl"));
    let ten = |a: &str, b: &str| -> Vec<String> { (0..10).map(|i| if i < 7 { a } else { b }.to_string()).collect() };
    let golds = [
        serde_json::json!({"example_id": "street_0001/vqa/0", "answers": ten("stop", "stop sign")}),
        serde_json::json!({"example_id": "menu_0007/vqa/0", "answers": ten("4.50", "$4.50")}),
        serde_json::json!({"example_id": "bus_0005/vqa/0", "answers": ten("42", "forty two")}),
    ];
    let preds = [
        serde_json::json!({"example_id": "bus_0005/vqa/0", "prediction": "42"}),
        serde_json::json!({"example_id": "street_0001/vqa/0", "prediction": "Stop sign"}),
        serde_json::json!({"example_id": "menu_0007/vqa/0", "prediction": "4.60"}),
    ];
    let lines = |v: &[serde_json::Value]| v.iter().map(|x| format!("{x}\n")).collect::<String>();
    std::fs::write(&gold, lines(&golds)).unwrap();
    std::fs::write(&pred, lines(&preds)).unwrap();

    for task in [EvalTask::Vqa, EvalTask::VqaAnls] {
        let report = evaluate(&pred, &gold, task, EvalOptions::default()).unwrap();
        println!("{}", report.summary());
        for item in &report.per_item {
            println!("  {:<20} {:?}", item.example_id, item.scores);
        }
    }

    // A prediction without gold is an alignment error, not a silent skip.
    std::fs::write(&pred, lines(&preds[..2])).unwrap();
    println!("{}", evaluate(&pred, &gold, EvalTask::Vqa, EvalOptions::default()).unwrap_err());
}
