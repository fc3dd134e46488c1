//! Deterministic seed derivation for per-party random streams.
//!
//! Every source of randomness in the workspace draws from a ChaCha stream
//! whose seed is derived from a master seed plus a label path, so parallel
//! and serial schedules see identical streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// splitmix64 finalizer; good avalanche for label mixing.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a label path.
pub fn derive(master: u64, labels: &[u64]) -> u64 {
    let mut state = mix(master);
    for &l in labels {
        state = mix(state ^ mix(l));
    }
    state
}

/// Stable numeric label for a named stream.
pub fn label(name: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64; // FNV-1a
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// ChaCha stream for a derived seed.
pub fn rng(master: u64, labels: &[u64]) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive(master, labels))
}

/// ChaCha stream addressed by a stream name plus numeric labels.
pub fn named_rng(master: u64, name: &str, labels: &[u64]) -> ChaCha20Rng {
    let mut path = Vec::with_capacity(labels.len() + 1);
    path.push(label(name));
    path.extend_from_slice(labels);
    rng(master, &path)
}
