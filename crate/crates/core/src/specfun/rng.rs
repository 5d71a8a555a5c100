use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Master seed of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Seed of the `index`-th child stream. Children of the same parent are
    /// independent of one another and of the order in which they are created.
    pub fn child(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x6a09_e667_f3bc_c909)),
        ))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-caller random state. Every draw consumes a fixed number of words from
/// the underlying ChaCha8 stream, so a seed fixes the whole sequence.
#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: RngSeed) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    /// Uniform on the half-open interval [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Circularly-symmetric CN(0, 1) sample by the Box-Muller transform.
    pub fn gaussian_pair(&mut self) -> Complex64 {
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-u1.ln()).sqrt();
        Complex64::from_polar(radius, TAU * u2)
    }

    pub fn fill_gaussian(&mut self, out: &mut [Complex64]) {
        for z in out {
            *z = self.gaussian_pair();
        }
    }
}

/// Draws one CN(0, 1) sample: zero mean, unit variance, each quadrature
/// component with variance 1/2.
pub fn gaussian_pair(rng: &mut SimRng) -> Complex64 {
    rng.gaussian_pair()
}
