//! Random number generation contract.
//!
//! Every simulation draws from a [`SimRng`] (ChaCha with 8 rounds) seeded from
//! a 64-bit value. Replicate `r` of a run with root seed `s` uses
//! [`child_seed`]`(s, r)`, which is the `(r + 1)`-th output of a SplitMix64
//! generator started at `s`. Replicates are therefore independent of the order
//! in which they are executed.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// The SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replicate `index` under `root`.
pub fn child_seed(root: u64, index: u64) -> u64 {
    splitmix64(root.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Uniform on the open interval `(0, 1)`.
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Exponential with the given rate, by inversion: `−ln(U) / rate`.
///
/// Returns `+∞` for a zero rate.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    -open01(rng).ln() / rate
}
