//! Seeded generator for experiment inputs.
//!
//! Uniforms come from SplitMix64 (Steele, Lea & Flood, 2014): the state
//! advances by the golden-ratio increment `0x9E3779B97F4A7C15` and each output
//! is the mix `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//! z *= 0x94D049BB133111EB; z ^= z >> 31`. A uniform double takes the top 53
//! bits. Gaussians use the Box–Muller transform with `libm` so the sequence
//! does not depend on the platform's math library.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rng {
    state: u64,
    spare: Option<u64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(bits) = self.spare.take() {
            return f64::from_bits(bits);
        }
        // 1 - u lies in (0, 1], keeping the log finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * PI * u2;
        self.spare = Some((r * libm::sin(theta)).to_bits());
        r * libm::cos(theta)
    }
}

/// `n` standard-normal samples.
pub fn rng_gaussian(rng: &mut Rng, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("requested zero samples"));
    }
    Ok((0..n).map(|_| rng.gaussian()).collect())
}
