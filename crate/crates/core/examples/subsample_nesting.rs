//! Hash-based subsampling: kept fractions track the target and smaller
//! subsets are contained in larger ones.
//!
//! ```text
//! cargo run --release --example subsample_nesting
//! ```

use scenetext::pipeline::{subsample_key, Subsampler};

fn main() {
    let n = 1_000_000u64;
    let fractions = [0.01, 0.03, 0.10, 0.30];
    let samplers: Vec<Subsampler> = fractions.iter().map(|&f| Subsampler::new(f, 1).unwrap()).collect();
    let mut kept = [0u64; 4];
    let mut nested = true;
    for i in 0..n {
        let key = subsample_key(1, &format!("img-{i}"));
        let picks: Vec<bool> = samplers.iter().map(|s| s.keeps_key(key)).collect();
        nested &= picks.windows(2).all(|w| !w[0] || w[1]);
        for (k, p) in kept.iter_mut().zip(&picks) {
            *k += u64::from(*p);
        }
    }
    for (f, k) in fractions.iter().zip(kept) {
        println!("fraction {f:.2}: kept {k} ({:.4})", k as f64 / n as f64);
    }
    println!("nested: {nested}");
}
