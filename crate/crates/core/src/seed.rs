//! Seed derivation and random-number generation.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] stream seeded with a
//! value obtained by [`derive`]. Derivation mixes a parent seed with a path of
//! integer tags through the SplitMix64 finalizer, so a child seed depends only on
//! its logical position (run, fold, epoch, batch, ...) and never on thread
//! scheduling. There is no global RNG state.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a path of tags.
pub fn derive(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(parent), |acc, &tag| splitmix64(acc ^ splitmix64(tag)))
}

/// 64-bit FNV-1a followed by a SplitMix64 finalizer; used to turn run ids into seeds.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tags that name the purpose of a derived stream.
pub mod tag {
    pub const INIT: u64 = 0x1000;
    pub const SHUFFLE: u64 = 0x2000;
    pub const BATCH: u64 = 0x3000;
    pub const VALIDATION: u64 = 0x4000;
    pub const TEST: u64 = 0x5000;
    pub const FOLD: u64 = 0x6000;
    pub const REFIT: u64 = 0x7000;
    pub const FORWARD: u64 = 0x8000;
}
