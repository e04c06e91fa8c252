use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::CMatrix;
use crate::error::{Error, Result};

/// Sizes and seed of a GUE Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GueConfig {
    pub n: usize,
    pub d: u32,
    pub seed: u64,
    pub samples: usize,
}

impl GueConfig {
    pub fn new(n: usize, d: u32, seed: u64, samples: usize) -> Result<Self> {
        let c = GueConfig { n, d, seed, samples };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.samples == 0 {
            return Err(Error::invalid(format!("need N >= 1 and samples >= 1, got N = {} and {} samples", self.n, self.samples)));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream for one matrix of one replica. Streams depend only on
/// the key, so replicas can be drawn in any order.
pub fn stream_seed(seed: u64, replica: u64, matrix: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ replica) ^ matrix.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Generator for the given key.
pub fn stream(seed: u64, replica: u64, matrix: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, replica, matrix))
}

/// One `N x N` GUE matrix: diagonal `N(0, 1/N)`, off-diagonal real and
/// imaginary parts `N(0, 1/(2N))`.
pub fn gue_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    let sd_diag = (1.0 / n as f64).sqrt();
    let sd_off = (0.5 / n as f64).sqrt();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let x: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex64::new(sd_diag * x, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(sd_off * re, sd_off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// The `d` matrices of replica `replica`, keyed by stream number
/// `offset + k` for `k < d`.
pub fn sample_gue_family(n: usize, d: u32, seed: u64, replica: u64, offset: u64) -> Vec<CMatrix> {
    (0..d as u64).map(|k| gue_matrix(n, &mut stream(seed, replica, offset + k))).collect()
}

/// The `d` matrices of replica `replica` for a configuration.
pub fn sample_gue(cfg: &GueConfig, replica: u64) -> Vec<CMatrix> {
    sample_gue_family(cfg.n, cfg.d, cfg.seed, replica, 0)
}
