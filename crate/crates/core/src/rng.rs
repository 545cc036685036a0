//! Deterministic seed derivation.
//!
//! Every random decision in the crate draws from a `ChaCha8Rng` whose seed is
//! derived from a master seed and a list of labels (walk type, start node,
//! walker index, replicate index, ...). Two consequences:
//!
//! * reruns with the same master seed are bit-identical,
//! * work items can be scheduled on any number of threads in any order
//!   without changing the output, because no stream is shared.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; a stable, well-mixed 64-bit permutation.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a master seed and a sequence of labels into a single 64-bit seed.
///
/// The fold is order-sensitive, so `[a, b]` and `[b, a]` yield unrelated
/// streams.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    let mut h = mix64(master);
    for &label in labels {
        h = mix64(h ^ label);
    }
    h
}

/// A `ChaCha8Rng` seeded from [`derive_seed`].
pub fn derive_rng(master: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}
