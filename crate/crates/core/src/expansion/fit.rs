use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncalg::NcPolynomial;
use crate::rmt::{mc_trace, GueConfig, MatrixBinding, SpectralFunctionSpec};

/// Largest accepted condition number of the normal equations.
pub const MAX_CONDITION: f64 = 1e12;

/// One averaged observation at matrix size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Weighted least-squares fit of `mean(N) = sum_{g <= k} a_g N^{-2g}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub coefficients: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Covariance of the coefficients.
    pub covariance: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub chi2: f64,
    pub condition: f64,
}

/// Fits the expansion to order `k`. Observations with zero standard error are
/// weighted uniformly when all errors vanish; otherwise errors are floored
/// at the smallest positive one.
pub fn fit_expansion(obs: &[Observation], k: usize) -> Result<ExpansionFit> {
    let mut sizes: Vec<usize> = obs.iter().map(|o| o.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < k + 2 {
        return Err(Error::IllConditioned(format!("{} distinct sizes for order {k}, need {}", sizes.len(), k + 2)));
    }
    if let Some(o) = obs.iter().find(|o| o.n == 0 || !o.mean.is_finite() || !(o.stderr >= 0.0)) {
        return Err(Error::invalid(format!("bad observation {o:?}")));
    }
    let floor = obs.iter().map(|o| o.stderr).filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    let sigma = |o: &Observation| if floor.is_finite() { o.stderr.max(floor) } else { 1.0 };
    let rows = obs.len();
    // columns scaled by the largest size so the design stays O(1)
    let x = DMatrix::from_fn(rows, k + 1, |r, g| (obs[r].n as f64).powi(-2 * g as i32) / sigma(&obs[r]));
    let y = DVector::from_fn(rows, |r, _| obs[r].mean / sigma(&obs[r]));
    let col_scale = DVector::from_fn(k + 1, |g, _| x.column(g).norm());
    if col_scale.iter().any(|s| *s == 0.0) {
        return Err(Error::IllConditioned("empty design column".into()));
    }
    let xs = DMatrix::from_fn(rows, k + 1, |r, g| x[(r, g)] / col_scale[g]);
    let sv = xs.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(format!("normal equations have condition {condition:e}")));
    }
    let normal = xs.transpose() * &xs;
    let inv = normal.try_inverse().ok_or_else(|| Error::IllConditioned("singular normal equations".into()))?;
    let bs = &inv * (xs.transpose() * &y);
    let coefficients: Vec<f64> = (0..=k).map(|g| bs[g] / col_scale[g]).collect();
    let covariance: Vec<Vec<f64>> = (0..=k).map(|a| (0..=k).map(|b| inv[(a, b)] / (col_scale[a] * col_scale[b])).collect()).collect();
    let residuals: Vec<f64> = obs
        .iter()
        .map(|o| o.mean - coefficients.iter().enumerate().map(|(g, a)| a * (o.n as f64).powi(-2 * g as i32)).sum::<f64>())
        .collect();
    let chi2 = obs.iter().zip(&residuals).map(|(o, r)| (r / sigma(o)).powi(2)).sum();
    let uniform = !floor.is_finite();
    let stderrs = (0..=k).map(|g| if uniform { 0.0 } else { covariance[g][g].max(0.0).sqrt() }).collect();
    Ok(ExpansionFit { coefficients, stderrs, covariance, residuals, chi2, condition })
}

/// Monte Carlo means per size and the expansion fitted through them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McFitReport {
    pub polynomial: String,
    pub function: SpectralFunctionSpec,
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    pub observations: Vec<Observation>,
    pub fit: ExpansionFit,
}

/// Estimates `E[Tr f(P(X^N, Z^N)) / N]` for each size and fits
/// `sum_{g <= k} a_g N^{-2g}` by weighted least squares. `z_for` supplies
/// the deterministic matrices at each size. Non-identity `f` needs
/// `P(X, Z)` Hermitian, which is checked on every sample.
pub fn alpha_fit_mc(
    p: &NcPolynomial,
    f: &SpectralFunctionSpec,
    sizes: &[usize],
    samples: usize,
    k: usize,
    seed: u64,
    z_for: &dyn Fn(usize) -> MatrixBinding,
) -> Result<McFitReport> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < k + 2 {
        return Err(Error::IllConditioned(format!("{} distinct sizes for order {k}, need {}", distinct.len(), k + 2)));
    }
    let d = p.letters().iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(1);
    let mut observations = Vec::new();
    for &n in sizes {
        let cfg = GueConfig::new(n, d, seed, samples)?;
        let est = mc_trace(f, p, &cfg, &z_for(n))?;
        observations.push(Observation { n, mean: est.mean, stderr: est.stderr });
    }
    let fit = fit_expansion(&observations, k)?;
    Ok(McFitReport { polynomial: p.to_string(), function: f.clone(), order: k, seed, samples, observations, fit })
}
