//! SplitMix64 and the samplers built on it.
//!
//! The generator is written out by hand rather than pulled from a crate so
//! that every byte of experiment output is pinned down by the algorithm
//! itself: the same seed must produce the same artifacts on any platform, and
//! the reference outputs below can be recomputed in a few lines of any
//! language with 64-bit integers.

use num_complex::Complex64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64: state advances by a fixed odd constant, outputs are a
/// finalizer (xor-shift-multiply) of the state.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Box-Muller pair of independent standard normals.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        (r * angle.cos(), r * angle.sin())
    }

    /// Standard complex Gaussian: E|z|^2 = 1, real and imaginary parts
    /// independent N(0, 1/2).
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.next_gaussian_pair();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(a * inv_sqrt2, b * inv_sqrt2)
    }
}

/// Derives an independent per-trial seed from an experiment seed: trial `t`
/// starts a fresh stream at `seed + t * gamma` and takes one output. Trials
/// can therefore run in any order, and `mix_seed(s, 0)` equals the first
/// output of the stream seeded with `s`.
pub fn mix_seed(seed: u64, trial: u64) -> u64 {
    SplitMix64::new(seed.wrapping_add(trial.wrapping_mul(GOLDEN_GAMMA))).next_u64()
}
