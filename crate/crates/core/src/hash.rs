//! Stable keyed hashing.
//!
//! Every seeded decision in the pipeline (subsample membership, split points,
//! shuffle position) is a function of `(seed, domain, key)` so that results do
//! not depend on arrival order or thread count. The hash is XXH3, whose output
//! is fixed across platforms and releases.

use xxhash_rust::xxh3::{xxh3_128_with_seed, Xxh3};

/// Domain tags keep the different uses of one seed statistically independent.
pub mod domain {
    pub const SUBSAMPLE: &str = "subsample";
    pub const SPLIT: &str = "split";
    pub const SHUFFLE: &str = "shuffle";
}

/// 64-bit hash of `key` under `seed` within `domain`.
pub fn keyed_hash64(seed: u64, domain: &str, key: &str) -> u64 {
    let mut h = Xxh3::with_seed(seed);
    h.update(domain.as_bytes());
    h.update(&[0]);
    h.update(key.as_bytes());
    h.digest()
}

/// 128-bit fingerprint used for duplicate detection without retaining the key.
pub fn fingerprint128(key: &str) -> u128 {
    xxh3_128_with_seed(key.as_bytes(), 0)
}
