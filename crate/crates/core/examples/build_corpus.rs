//! Build a two-stage pre-training corpus (SPLITOCR, then CAP) from the sample
//! records and print the manifest summary. Running it twice gives the same hash.
//!
//! ```text
//! cargo run --example build_corpus [OUT_DIR]
//! ```

use std::path::PathBuf;

use scenetext::objective::Objective;
use scenetext::pipeline::{run, PipelineConfig};

fn main() -> scenetext::Result<()> {
    let sample = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/sample.jsonl");
    let tmp = tempfile::tempdir().unwrap();
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| tmp.path().join("corpus"));

    let config = PipelineConfig {
        inputs: vec![sample],
        stages: vec![Objective::SplitOcr, Objective::Cap],
        seed: 42,
        shards: 2,
        passes: 2,
        ..PipelineConfig::default()
    };
    let outcome = run(&config, &out)?;
    let m = &outcome.manifest;
    println!("records kept: {} of {}", m.counts.kept, m.counts.ingest.records);
    for stage in &m.stages {
        println!("{}: {} examples, skipped {:?}", stage.dataset, stage.examples, stage.skipped);
        for shard in &stage.shards {
            println!("  {} ({} examples, sha256 {}..)", shard.path.display(), shard.examples, &shard.sha256[..12]);
        }
    }
    println!("manifest sha256 {}", outcome.manifest_hash);

    let again = run(&config, &tmp.path().join("again"))?;
    println!("rebuild identical: {}", {
        let a: Vec<_> = m.stages.iter().flat_map(|s| s.shards.iter().map(|x| &x.sha256)).collect();
        let b: Vec<_> = again.manifest.stages.iter().flat_map(|s| s.shards.iter().map(|x| &x.sha256)).collect();
        a == b
    });
    Ok(())
}
