mod common;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use scenetext::objective::Objective;
use scenetext::pipeline::{run, run_finetune, FinetuneRunConfig, PipelineConfig};
use scenetext::Error;

use common::{random_record, read_tree, write_corpus};

fn corpus(dir: &Path, n: usize) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let records: Vec<_> = (0..n).map(|i| random_record(&mut rng, format!("p{i:05}"))).collect();
    let path = dir.join("corpus.jsonl");
    write_corpus(&path, &records);
    path
}

fn shard_lines(path: &Path) -> Vec<String> {
    let mut text = String::new();
    if path.extension().is_some_and(|e| e == "zst") {
        zstd::Decoder::new(std::fs::File::open(path).unwrap())
            .unwrap()
            .read_to_string(&mut text)
            .unwrap();
    } else {
        text = std::fs::read_to_string(path).unwrap();
    }
    text.lines().map(str::to_string).collect()
}

fn config(input: PathBuf) -> PipelineConfig {
    PipelineConfig {
        inputs: vec![input],
        stages: vec![Objective::SplitOcr, Objective::Cap],
        seed: 9,
        shards: 3,
        threads: 2,
        ..PipelineConfig::default()
    }
}

#[test]
fn two_stage_plan_writes_both_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let outcome = run(&config(corpus(dir.path(), 400)), &out).unwrap();
    let m = &outcome.manifest;
    assert_eq!(m.plan.objectives(), [Objective::SplitOcr, Objective::Cap]);
    let names: Vec<&str> = m.stages.iter().map(|s| s.dataset.as_str()).collect();
    assert_eq!(names, ["stage-0-splitocr", "stage-1-cap"]);

    for stage in &m.stages {
        let mut ids = BTreeSet::new();
        let mut total = 0;
        for shard in &stage.shards {
            for line in shard_lines(&out.join(&shard.path)) {
                let v: Value = serde_json::from_str(&line).unwrap();
                assert_eq!(v["objective"], stage.objective.tag());
                assert!(ids.insert(v["example_id"].as_str().unwrap().to_string()));
                total += 1;
            }
        }
        assert_eq!(total, stage.examples);
        assert_eq!(stage.examples + stage.skipped.values().sum::<u64>(), m.counts.kept);
    }
    assert_eq!(m.counts.kept, 400);

    let on_disk = std::fs::read(&outcome.manifest_path).unwrap();
    let parsed: Value = serde_json::from_slice(&on_disk).unwrap();
    assert_eq!(parsed["config_hash"], m.config_hash);
}

#[test]
fn thread_count_and_buffer_do_not_change_shards() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 600);
    let mut shards = Vec::new();
    let mut hashes = BTreeSet::new();
    for (threads, buffer) in [(1, 1 << 18), (8, 31), (3, 1000)] {
        let cfg = PipelineConfig {
            threads,
            shuffle_buffer: buffer,
            passes: 2,
            ..config(input.clone())
        };
        let out = dir.path().join(format!("t{threads}"));
        let outcome = run(&cfg, &out).unwrap();
        hashes.insert(outcome.manifest.config_hash.clone());
        let mut tree = read_tree(&out);
        tree.remove("manifest.json");
        shards.push(tree);
    }
    assert_eq!(hashes.len(), 1);
    assert_eq!(shards[0], shards[1]);
    assert_eq!(shards[0], shards[2]);
}

#[test]
fn seeds_and_passes_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 200);
    let a = run(&config(input.clone()), &dir.path().join("a")).unwrap();
    let b = run(&PipelineConfig { seed: 10, ..config(input.clone()) }, &dir.path().join("b")).unwrap();
    assert_ne!(a.manifest.config_hash, b.manifest.config_hash);
    assert_ne!(a.manifest.stages[0].shards[0].sha256, b.manifest.stages[0].shards[0].sha256);

    let two = run(&PipelineConfig { passes: 2, ..config(input) }, &dir.path().join("c")).unwrap();
    assert_eq!(two.manifest.stages[0].examples, 2 * a.manifest.stages[0].examples);
}

#[test]
fn compressed_shards_hold_the_same_examples() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 300);
    let plain = run(&config(input.clone()), &dir.path().join("plain")).unwrap();
    let zst = run(&PipelineConfig { compress: true, ..config(input) }, &dir.path().join("zst")).unwrap();
    for (p, z) in plain.manifest.stages.iter().zip(&zst.manifest.stages) {
        for (ps, zs) in p.shards.iter().zip(&z.shards) {
            assert!(zs.path.to_str().unwrap().ends_with(".jsonl.zst"));
            assert_eq!(
                shard_lines(&dir.path().join("plain").join(&ps.path)),
                shard_lines(&dir.path().join("zst").join(&zs.path))
            );
        }
    }
}

#[test]
fn subsampled_run_is_a_subset() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 1000);
    let ids = |fraction: f64, name: &str| -> BTreeSet<String> {
        let cfg = PipelineConfig {
            fraction,
            stages: vec![Objective::Ocr],
            ..config(input.clone())
        };
        let out = dir.path().join(name);
        let o = run(&cfg, &out).unwrap();
        o.manifest.stages[0]
            .shards
            .iter()
            .flat_map(|s| shard_lines(&out.join(&s.path)))
            .map(|l| serde_json::from_str::<Value>(&l).unwrap()["image_id"].as_str().unwrap().to_string())
            .collect()
    };
    let small = ids(0.2, "s");
    let large = ids(0.5, "l");
    assert!(!small.is_empty() && small.len() < large.len());
    assert!(small.is_subset(&large));
}

#[test]
fn failed_run_leaves_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 100);
    let out = dir.path().join("out");
    // A plain file where the second stage's directory goes makes the write fail.
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join("stage-1-cap"), "not a directory").unwrap();
    let err = run(&config(input.clone()), &out).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err:?}");
    assert!(!out.join("stage-0-splitocr").exists());
    assert!(!out.join("manifest.json").exists());

    let missing = run(&config(dir.path().join("nope.jsonl")), &dir.path().join("out2")).unwrap_err();
    assert!(matches!(missing, Error::Io { .. }));
    assert!(!dir.path().join("out2").exists());
}

#[test]
fn invalid_lines_are_counted_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 50);
    let mut text = std::fs::read_to_string(&input).unwrap();
    let first = text.lines().next().unwrap().to_owned();
    text.push_str("{not json\n");
    text.push_str("{\"image_id\":\"bad\",\"ocr\":[{\"text\":\"\",\"bbox\":[0,0,1,1]}]}\n");
    text.push_str(&first);
    text.push('\n');
    std::fs::write(&input, text).unwrap();
    let o = run(&config(input), &dir.path().join("out")).unwrap();
    let c = &o.manifest.counts.ingest;
    assert_eq!(c.parse_errors, 1);
    assert_eq!(c.schema_errors, 1);
    assert_eq!(o.manifest.counts.kept, 50);
}

#[test]
fn finetune_output_is_sorted_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 300);
    let cfg = FinetuneRunConfig {
        inputs: vec![input],
        threads: 4,
        ..FinetuneRunConfig::default()
    };
    let a = run_finetune(&cfg, &dir.path().join("a")).unwrap();
    let b = run_finetune(&FinetuneRunConfig { threads: 1, ..cfg.clone() }, &dir.path().join("b")).unwrap();
    assert_eq!(a.manifest.output.sha256, b.manifest.output.sha256);
    let lines = shard_lines(&dir.path().join("a/vqa.jsonl"));
    let ids: Vec<String> = lines
        .iter()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["example_id"].as_str().unwrap().to_string())
        .collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(ids.len() as u64, a.manifest.output.examples);
}
