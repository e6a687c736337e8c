use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ssfdet::C64;

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for instance `index` of batch `batch`, independent of execution order.
pub fn instance_seed(base: u64, batch: usize, index: usize) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(batch as u64)) ^ index as u64)
}

pub fn attempt_rng(seed: u64, attempt: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed.wrapping_add(attempt as u64)))
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian with `E|z|² = 1`.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(s * normal(rng), s * normal(rng))
}
