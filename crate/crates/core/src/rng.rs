//! Reproducible seed derivation.
//!
//! Every random draw is keyed by `(base seed, stream)` through a SplitMix64
//! mix, so trials and their sub-draws get independent ChaCha streams no
//! matter the order in which they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ExperimentRng = ChaCha8Rng;

/// Stream tag for the population covariance draw of a trial.
pub const SIGMA_STREAM: u64 = 0x5157_4d41;
/// Stream tag for the data draw of a trial.
pub const DATA_STREAM: u64 = 0x4441_5441;

#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(base) ^ stream.rotate_left(17) ^ 0x6a09_e667_f3bc_c908)
}

pub fn rng_from_seed(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}
