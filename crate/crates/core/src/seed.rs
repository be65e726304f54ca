//! Stable seed derivation for independent, individually reproducible
//! random substreams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random stream type used by every generator and solver.
pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Hashes `master` together with a path of stream tags.
///
/// The value depends on the tag order, so `(master, [a, b])` and
/// `(master, [b, a])` give different seeds.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(mix64(master), |acc, &t| mix64(acc ^ mix64(t)))
}

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}
