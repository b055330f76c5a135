//! Counter-based random substreams and the trial reducer.
//!
//! Every Monte Carlo trial draws from its own ChaCha stream keyed by
//! `(seed, purpose)` and selected by the trial index, so results do not
//! depend on execution order or thread count. Aggregation is restricted to
//! integer counts, which merge associatively and commutatively.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream purposes; distinct purposes never share key material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Purpose {
    Channel = 1,
    CodeTrial = 2,
    Search = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Factory for per-trial generators.
#[derive(Clone)]
pub struct TrialStreams {
    base: ChaCha8Rng,
}

impl TrialStreams {
    pub(crate) fn new(seed: u64, purpose: Purpose) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed ^ ((purpose as u64) << 56);
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        Self { base: ChaCha8Rng::from_seed(key) }
    }

    /// The generator for trial `index`; always starts at word position 0.
    pub fn trial(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

/// One circularly-symmetric complex Gaussian draw with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Combines partial accumulators; only the parallel path needs it.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
pub(crate) trait Merge {
    fn merge(&mut self, other: Self);
}

/// Runs `step` for trials `0..trials` and merges the partial accumulators.
pub(crate) fn accumulate<A, I, F>(trials: u64, init: I, step: F) -> A
where
    A: Merge + Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .fold(&init, |mut acc, t| {
                step(&mut acc, t);
                acc
            })
            .reduce(&init, |mut a, b| {
                a.merge(b);
                a
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc = init();
        for t in 0..trials {
            step(&mut acc, t);
        }
        acc
    }
}

impl Merge for Vec<u64> {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

impl Merge for Vec<Vec<u64>> {
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}
