//! Circularly-symmetric complex Gaussian noise and deterministic stream
//! derivation for Monte-Carlo trials.
//!
//! A stream is identified by `(master_seed, label, trial_index)`. The first
//! two are hashed into a ChaCha key and the trial index selects the ChaCha
//! stream, so any trial can be regenerated independently of execution order
//! or worker count.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::linalg::CMatrix;

/// Source of i.i.d. CN(0, 1) samples.
pub trait NoiseSource {
    fn draw(&mut self) -> Complex64;

    /// Adds one independent draw to every entry, in column-major order.
    fn add_to(&mut self, m: &mut CMatrix) {
        for z in m.iter_mut() {
            *z += self.draw();
        }
    }
}

/// The zero-noise source, for noiseless checks and the infinite-SNR limit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl NoiseSource for Silent {
    fn draw(&mut self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn add_to(&mut self, _m: &mut CMatrix) {}
}

/// Unit-variance complex Gaussian samples from any RNG.
#[derive(Debug, Clone)]
pub struct ComplexGaussian<R> {
    rng: R,
}

impl<R: Rng> ComplexGaussian<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: Rng> NoiseSource for ComplexGaussian<R> {
    #[inline]
    fn draw(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }
}

pub type NoiseStream = ComplexGaussian<ChaCha8Rng>;

/// Key for a family of per-trial streams sharing a master seed and label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFamily {
    key: [u8; 32],
}

impl StreamFamily {
    pub fn new(master_seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"bsc-core/stream/v1");
        h.update(master_seed.to_le_bytes());
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        Self { key: h.finalize().into() }
    }

    pub fn stream(&self, trial_index: u64) -> NoiseStream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(trial_index);
        ComplexGaussian::new(rng)
    }
}

/// Reproducible noise stream for one trial of one experiment.
pub fn derive_stream(master_seed: u64, label: &str, trial_index: u64) -> NoiseStream {
    StreamFamily::new(master_seed, label).stream(trial_index)
}
