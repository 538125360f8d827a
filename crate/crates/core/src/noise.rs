//! Reproducible Gaussian noise.
//!
//! The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64` and
//! normal deviates come from `rand_distr::StandardNormal` (ziggurat), so a
//! given seed yields the same numbers on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type NoiseRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> NoiseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One draw from N(0, sigma²).
pub fn gaussian(rng: &mut NoiseRng, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}
