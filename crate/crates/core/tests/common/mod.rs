#![allow(dead_code)]

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use scenetext::corpus::{BBox, ImageSize, OcrToken, QaAnnotation, Record};

pub const WORDS: &[&str] = &[
    "a", "the", "red", "stop", "sign", "bus", "street", "shop", "open", "cola", "menu", "price", "dog",
    "on", "near", "with", "book", "cover", "title", "coffee", "store", "plate", "two", "7",
];

/// Token text drawn from an uppercase-only alphabet, so it never collides with
/// prompts, questions or delimiters.
pub fn token_text<R: Rng>(rng: &mut R) -> String {
    const ALPHA: &[u8] = b"BCDFGHJKLMNPQRSTVWXZ0123456789";
    let len = rng.gen_range(3..8);
    let mut s: String = (0..len).map(|_| ALPHA[rng.gen_range(0..ALPHA.len())] as char).collect();
    // Leading letter keeps the token from looking like a number word.
    s.replace_range(0..1, "Q");
    s
}

/// A random page: a few text lines with jittered baselines, plus loose tokens.
pub fn random_layout<R: Rng>(rng: &mut R, max_tokens: usize) -> Vec<OcrToken> {
    let n = rng.gen_range(0..=max_tokens);
    let mut out = Vec::with_capacity(n);
    let lines = rng.gen_range(1..6);
    for _ in 0..n {
        let line = rng.gen_range(0..lines) as f64;
        let h = rng.gen_range(8.0..30.0);
        let y = line * 40.0 + rng.gen_range(-6.0..6.0) + 10.0;
        let x = rng.gen_range(0.0..600.0);
        let w = rng.gen_range(5.0..80.0);
        let mut t = OcrToken::new(token_text(rng), BBox::new(x, y.max(0.0), w, h).unwrap());
        t.confidence = rng.gen_range(0.0..=1.0);
        out.push(t);
    }
    // Exact duplicates and shared coordinates exercise the tie-breaks.
    if n > 1 && rng.gen_bool(0.3) {
        let dup = out[rng.gen_range(0..n)].clone();
        out.push(dup);
    }
    if n > 1 && rng.gen_bool(0.3) {
        let i = rng.gen_range(0..out.len());
        let j = rng.gen_range(0..out.len());
        out[j].bbox = out[i].bbox;
    }
    out
}

/// Tokens whose vertical intervals are pairwise disjoint (touching allowed).
pub fn stacked_layout<R: Rng>(rng: &mut R, max_tokens: usize) -> Vec<OcrToken> {
    let n = rng.gen_range(1..=max_tokens);
    let mut y = rng.gen_range(0.0..20.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let h = rng.gen_range(2.0..25.0);
        let x = rng.gen_range(0.0..500.0);
        out.push(OcrToken::new(token_text(rng), BBox::new(x, y, rng.gen_range(5.0..90.0), h).unwrap()));
        y += h + if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..15.0) };
    }
    out.shuffle(rng);
    out
}

pub fn sentence<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> String {
    (0..rng.gen_range(lo..=hi))
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn random_record<R: Rng>(rng: &mut R, image_id: String) -> Record {
    let mut r = Record::new(image_id);
    r.image_size = Some(ImageSize {
        width: 800,
        height: 600,
    });
    r.ocr = random_layout(rng, 14);
    if rng.gen_bool(0.8) {
        r.caption = Some(sentence(rng, 1, 12));
    }
    if rng.gen_bool(0.7) {
        let qa = (0..rng.gen_range(1..3))
            .map(|_| QaAnnotation {
                question: format!("what is {}", sentence(rng, 1, 4)),
                answers: (0..10).map(|_| sentence(rng, 1, 2)).collect(),
            })
            .collect();
        r.qa = Some(qa);
    }
    r
}

pub fn write_corpus(path: &Path, records: &[Record]) {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.to_json_line());
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

/// Every file under `dir`, relative path -> bytes.
pub fn read_tree(dir: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}
