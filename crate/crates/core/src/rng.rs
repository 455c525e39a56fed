//! Portable, seedable random streams.
//!
//! Every Monte Carlo run in the crate draws from ChaCha8 (`rand_chacha`),
//! whose output is specified bit-for-bit and identical across platforms.
//! Trial `i` of an experiment with master seed `s` is seeded with
//! `trial_seed(s, i)`, a SplitMix64 mix of the pair. Trials are therefore
//! independent, can run in any order or in parallel, and each one can be
//! replayed alone from the seed recorded in its output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type GroverRng = ChaCha8Rng;

/// Stream for a single-run experiment.
pub fn seeded(seed: u64) -> GroverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ trial.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn trial_rng(seed: u64, trial: u64) -> GroverRng {
    seeded(trial_seed(seed, trial))
}
