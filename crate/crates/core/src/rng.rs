//! Deterministic seeding and the per-arm reward tableau.
//!
//! Episode seeds are derived from `(base_seed, instance_index, run_index)`
//! with the SplitMix64 finalizer. Within an episode every arm owns its own
//! ChaCha8 stream (stream id = arm index), so the n-th reward of arm i is a
//! function of `(episode seed, i, n)` only and does not depend on what the
//! policy did with other arms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bandit::ArmDistribution;

/// Golden-ratio increment of SplitMix64.
pub const SEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `value` into `state`.
#[inline]
pub fn mix_in(state: u64, value: u64) -> u64 {
    mix64(state ^ mix64(value.wrapping_add(1).wrapping_mul(SEED_GAMMA)))
}

/// Seed of run `run_index` on instance `instance_index`.
pub fn derive_seed(base_seed: u64, instance_index: u64, run_index: u64) -> u64 {
    mix_in(mix_in(mix64(base_seed), instance_index), run_index)
}

/// Lazily materialized table `U[i][n]` of rewards: the reward of the n-th
/// pull of arm i.
pub struct RewardTableau<'a> {
    arms: &'a [ArmDistribution],
    streams: Vec<ChaCha8Rng>,
}

impl<'a> RewardTableau<'a> {
    pub fn new(arms: &'a [ArmDistribution], seed: u64) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let streams = (0..arms.len())
            .map(|i| {
                let mut rng = base.clone();
                rng.set_stream(i as u64);
                rng
            })
            .collect();
        RewardTableau { arms, streams }
    }

    /// Reward of the next pull of `arm`.
    #[inline]
    pub fn draw(&mut self, arm: usize) -> f64 {
        let u: f64 = self.streams[arm].random();
        self.arms[arm].sample_with(u)
    }
}

/// Uniform variate at `(seed, index)`, used for instance generation.
pub fn uniform_at(seed: u64, stream: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_in(seed, stream));
    rng.set_stream(index);
    rng.random()
}
