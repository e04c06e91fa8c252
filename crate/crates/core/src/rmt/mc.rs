use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{eval_polynomial, normalized_trace, MatrixBinding};
use super::linalg::{trace_of_product, CMatrix};
use super::sample::{sample_gue, sample_gue_family, GueConfig};
use super::spectral::SpectralFunctionSpec;
use crate::error::{Error, Result};
use crate::ncalg::{Letter, NcPolynomial};
use crate::ncexp::{evaluate_numeric, param_cyclic_derivative, param_derivative, FPoly, ParamName, ParamSupply, ScalarExpr, Selector};
use crate::quadrature::GaussLegendre;

/// Sample mean with its jackknife standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Mean imaginary part, zero for self-adjoint observables.
    pub mean_imag: f64,
}

/// Mean and jackknife standard error.
pub fn jackknife_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let total: f64 = values.iter().sum();
    let mean = total / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let loo = values.iter().map(|v| (total - v) / (n - 1) as f64);
    let var: f64 = loo.map(|m| (m - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (mean, var.sqrt())
}

/// Unbiased sample covariance and its jackknife standard error.
pub fn jackknife_covariance(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len();
    assert_eq!(n, b.len());
    if n < 3 {
        return (0.0, 0.0);
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let cov = |m: f64, sa: f64, sb: f64, sab: f64| (sab - sa * sb / m) / (m - 1.0);
    let full = cov(n as f64, sa, sb, sab);
    let loo: Vec<f64> = (0..n).map(|i| cov((n - 1) as f64, sa - a[i], sb - b[i], sab - a[i] * b[i])).collect();
    let m = loo.iter().sum::<f64>() / n as f64;
    let var = loo.iter().map(|x| (x - m).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (full, var.sqrt())
}

fn x_width(letters: &BTreeSet<Letter>) -> u32 {
    letters.iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(0)
}

fn check_width(letters: &BTreeSet<Letter>, d: u32) -> Result<()> {
    let w = x_width(letters);
    if w > d {
        return Err(Error::invalid(format!("X{w} used with only {d} random matrices")));
    }
    Ok(())
}

/// `X_i -> xs[i-1]` together with the deterministic letters.
pub fn bind_family(xs: &[CMatrix], z: &MatrixBinding) -> MatrixBinding {
    let mut b = z.clone();
    for (k, m) in xs.iter().enumerate() {
        b.insert(Letter::x(k as u32 + 1), m.clone());
    }
    b
}

fn estimate(cfg: &GueConfig, vals: &[Complex64]) -> McEstimate {
    let re: Vec<f64> = vals.iter().map(|z| z.re).collect();
    let (mean, stderr) = jackknife_mean(&re);
    let mean_imag = vals.iter().map(|z| z.im).sum::<f64>() / vals.len() as f64;
    McEstimate { n: cfg.n, samples: cfg.samples, seed: cfg.seed, mean, stderr, mean_imag }
}

/// Per-replica values of `Tr f(P(X, Z)) / N`, in replica order.
pub fn mc_trace_values(f: &SpectralFunctionSpec, p: &NcPolynomial, cfg: &GueConfig, z: &MatrixBinding) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    f.validate()?;
    check_width(&p.letters(), cfg.d)?;
    if let Some(l) = p.letters().iter().find(|l| !l.is_x() && !z.contains_key(l)) {
        return Err(Error::UnboundLetter(l.to_string()));
    }
    (0..cfg.samples as u64)
        .into_par_iter()
        .map(|r| {
            let b = bind_family(&sample_gue(cfg, r), z);
            if f.is_identity() {
                normalized_trace(p, &b)
            } else {
                Ok(Complex64::new(f.normalized_trace(&eval_polynomial(p, &b)?)?, 0.0))
            }
        })
        .collect()
}

/// Monte Carlo estimate of `E[Tr f(P(X, Z)) / N]` over GUE `X`.
pub fn mc_trace(f: &SpectralFunctionSpec, p: &NcPolynomial, cfg: &GueConfig, z: &MatrixBinding) -> Result<McEstimate> {
    Ok(estimate(cfg, &mc_trace_values(f, p, cfg, z)?))
}

/// Complex sample mean with the standard error of its modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
}

fn complex_estimate(vals: &[Complex64]) -> ComplexEstimate {
    let (re, se_re) = jackknife_mean(&vals.iter().map(|z| z.re).collect::<Vec<_>>());
    let (im, se_im) = jackknife_mean(&vals.iter().map(|z| z.im).collect::<Vec<_>>());
    ComplexEstimate { re, im, stderr: se_re.hypot(se_im) }
}

/// Result of [`sd_matrix_residual`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdMatrixResidual {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub lhs: ComplexEstimate,
    pub rhs: ComplexEstimate,
    /// Per-replica difference, so the error accounts for the correlation.
    pub residual: ComplexEstimate,
}

impl SdMatrixResidual {
    /// `|residual| <= k stderr`, with the error floored at `floor`.
    pub fn within(&self, k: f64, floor: f64) -> bool {
        self.residual.re.hypot(self.residual.im) <= k * self.residual.stderr.max(floor)
    }
}

/// `integral over [0,1]^params of f`, tensor Gauss-Legendre.
fn integrate_over(params: &[ParamName], gl: &GaussLegendre, mut f: impl FnMut(&dyn Fn(ParamName) -> f64) -> Result<Complex64>) -> Result<Complex64> {
    let k = params.len();
    let mut idx = vec![0usize; k];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let w: f64 = idx.iter().map(|i| gl.weights[*i]).product();
        let lookup = |p: ParamName| params.iter().position(|q| *q == p).map(|j| gl.nodes[idx[j]]).unwrap_or(0.0);
        total += f(&lookup)? * w;
        let mut j = 0;
        loop {
            if j == k {
                return Ok(total);
            }
            idx[j] += 1;
            if idx[j] < gl.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Average of `e` over its parameters in `[0, 1]`.
fn averaged_matrix(e: &FPoly, b: &MatrixBinding, gl: &GaussLegendre, y: f64) -> Result<CMatrix> {
    let params: Vec<ParamName> = e.params().into_iter().collect();
    let n = super::eval::binding_dim(b)?;
    if params.is_empty() {
        return evaluate_numeric(e, b, &|_| 0.0, y);
    }
    let mut acc = CMatrix::zeros(n, n);
    let mut idx = vec![0usize; params.len()];
    loop {
        let w: f64 = idx.iter().map(|i| gl.weights[*i]).product();
        let lookup = |p: ParamName| params.iter().position(|q| *q == p).map(|j| gl.nodes[idx[j]]).unwrap_or(0.0);
        acc += evaluate_numeric(e, b, &lookup, y)? * Complex64::new(w, 0.0);
        let mut j = 0;
        loop {
            if j == params.len() {
                return Ok(acc);
            }
            idx[j] += 1;
            if idx[j] < gl.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Matrix Schwinger-Dyson residual
/// `E[tau_N(X_i Q)] - E[(tau_N (x) tau_N)(d_i Q)]` for GUE `X`.
pub fn sd_matrix_residual(q: &FPoly, i: u32, cfg: &GueConfig, z: &MatrixBinding, y: f64, nodes: usize) -> Result<SdMatrixResidual> {
    cfg.validate()?;
    let mut letters = q.letters();
    letters.insert(Letter::x(i));
    check_width(&letters, cfg.d)?;
    let p = ParamSupply::avoiding(&q.params()).fresh();
    let dq = param_derivative(q, &Selector::x(i), p);
    let xq = FPoly::letter(Letter::x(i)).mul(q);
    let gl = GaussLegendre::new(nodes.max(1));
    let n = cfg.n as f64;
    let pairs: Vec<(Complex64, Complex64)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|r| -> Result<(Complex64, Complex64)> {
            let b = bind_family(&sample_gue(cfg, r), z);
            let lhs = averaged_matrix(&xq, &b, &gl, y)?.trace() / n;
            let params: Vec<ParamName> = dq.params().into_iter().collect();
            let rhs = integrate_over(&params, &gl, |par| {
                let mut s = Complex64::new(0.0, 0.0);
                for (legs, c) in dq.terms() {
                    let ta = evaluate_numeric(&FPoly::word(legs[0].clone(), ScalarExpr::one()), &b, par, y)?.trace() / n;
                    let tb = evaluate_numeric(&FPoly::word(legs[1].clone(), ScalarExpr::one()), &b, par, y)?.trace() / n;
                    s += c.eval(par, y) * ta * tb;
                }
                Ok(s)
            })?;
            Ok((lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let lhs: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let rhs: Vec<Complex64> = pairs.iter().map(|p| p.1).collect();
    let diff: Vec<Complex64> = pairs.iter().map(|p| p.0 - p.1).collect();
    Ok(SdMatrixResidual {
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        lhs: complex_estimate(&lhs),
        rhs: complex_estimate(&rhs),
        residual: complex_estimate(&diff),
    })
}

/// Both sides of the covariance identity for `Tr P` and `Tr Q` at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub t: f64,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    pub pooled_stderr: f64,
}

impl CovarianceCheck {
    /// `|lhs - rhs| <= k * max(pooled, floor)`.
    pub fn agrees(&self, k: f64, floor: f64) -> bool {
        (self.lhs - self.rhs).abs() <= k * self.pooled_stderr.max(floor)
    }
}

/// Left side by sample covariance over `R`, right side by Monte Carlo over
/// `(R, S, T)` and Gauss-Legendre in `s` with `s_nodes` points.
pub fn covariance_identity_check(p: &FPoly, q: &FPoly, t: f64, cfg: &GueConfig, z: &MatrixBinding, s_nodes: usize) -> Result<CovarianceCheck> {
    cfg.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time {t} must be a nonnegative number")));
    }
    let mut letters = p.letters();
    letters.extend(q.letters());
    check_width(&letters, cfg.d)?;
    let d = cfg.d;
    let nf = cfg.n as f64;
    let gl = GaussLegendre::new(s_nodes.max(1));
    let pgl = GaussLegendre::new(8);
    let scale = Complex64::new((1.0 - (-t).exp()).sqrt(), 0.0);

    let mut supply = ParamSupply::avoiding(&p.params().union(&q.params()).copied().collect());
    let derivs: Vec<(FPoly, FPoly)> = (1..=d)
        .map(|i| {
            let a = param_cyclic_derivative(p, &Selector::x(i), supply.fresh());
            let b = param_cyclic_derivative(q, &Selector::x(i), supply.fresh());
            (a, b)
        })
        .collect();

    let lhs_vals: Vec<(f64, f64)> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64)> {
            let xs: Vec<CMatrix> = sample_gue_family(cfg.n, d, cfg.seed, r, 0).into_iter().map(|m| m * scale).collect();
            let b = bind_family(&xs, z);
            let a = averaged_matrix(p, &b, &pgl, 1.0)?.trace().re;
            let c = averaged_matrix(q, &b, &pgl, 1.0)?.trace().re;
            Ok((a, c))
        })
        .collect::<Result<_>>()?;
    let (la, lb): (Vec<f64>, Vec<f64>) = lhs_vals.into_iter().unzip();
    let (lhs, lhs_stderr) = jackknife_covariance(&la, &lb);

    let rhs_vals: Vec<f64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            if t == 0.0 {
                return Ok(0.0);
            }
            let rr = sample_gue_family(cfg.n, d, cfg.seed, r, d as u64);
            let ss = sample_gue_family(cfg.n, d, cfg.seed, r, 2 * d as u64);
            let tt = sample_gue_family(cfg.n, d, cfg.seed, r, 3 * d as u64);
            let mut acc = 0.0;
            for (s, w) in gl.nodes.iter().zip(&gl.weights) {
                let s = s * t;
                let a = Complex64::new(((-s).exp() - (-t).exp()).max(0.0).sqrt(), 0.0);
                let c = Complex64::new((1.0 - (-s).exp()).sqrt(), 0.0);
                let mix = |other: &[CMatrix]| -> Vec<CMatrix> { rr.iter().zip(other).map(|(x, o)| x * a + o * c).collect() };
                let bs = bind_family(&mix(&ss), z);
                let bt = bind_family(&mix(&tt), z);
                let mut inner = 0.0;
                for (dp, dq) in &derivs {
                    let mp = averaged_matrix(dp, &bs, &pgl, 1.0)?;
                    let mq = averaged_matrix(dq, &bt, &pgl, 1.0)?;
                    inner += trace_of_product(&mp, &mq).re;
                }
                acc += w * t * (-s).exp() * inner;
            }
            Ok(acc / nf)
        })
        .collect::<Result<_>>()?;
    let (rhs, rhs_stderr) = jackknife_mean(&rhs_vals);
    Ok(CovarianceCheck {
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        t,
        lhs,
        lhs_stderr,
        rhs,
        rhs_stderr,
        pooled_stderr: lhs_stderr.hypot(rhs_stderr),
    })
}
