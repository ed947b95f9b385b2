//! Deterministic random streams.
//!
//! Every trial owns a ChaCha8 key derived from `(master_seed, trial_index)`;
//! each consumer inside the trial (channel draw, training symbols, the noise of
//! each estimator arm) reads from its own ChaCha stream id under that key.
//! Streams are prefix-stable: drawing more values never perturbs the values
//! already drawn, so arms and grid cells that need different amounts of
//! randomness still see common random numbers.

use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Stream = ChaCha8Rng;

/// Named stream ids within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Substream {
    Channel = 0,
    Training = 1,
    TraditionalNoise = 2,
    ProposedNoise = 3,
    BoundNoise = 4,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 256-bit ChaCha key for one trial.
///
/// `base = splitmix64(master_seed) ^ splitmix64(trial_index ^ GOLDEN_GAMMA)`,
/// then the four key words are `splitmix64(base + i * GOLDEN_GAMMA)` for
/// `i = 0..4`, written little-endian.
pub fn trial_key(master_seed: u64, trial_index: u64) -> [u8; 32] {
    let base = splitmix64(master_seed) ^ splitmix64(trial_index ^ GOLDEN_GAMMA);
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        let word = splitmix64(base.wrapping_add((i as u64).wrapping_mul(GOLDEN_GAMMA)));
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    key
}

pub fn trial_stream(master_seed: u64, trial_index: u64, substream: Substream) -> Stream {
    let mut rng = ChaCha8Rng::from_seed(trial_key(master_seed, trial_index));
    rng.set_stream(substream as u64);
    rng
}

/// Plain seeded stream for tests and one-off use.
pub fn seeded(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Circularly symmetric complex Gaussian with the given total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * scale, im * scale)
}
