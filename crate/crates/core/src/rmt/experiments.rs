use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{eval_polynomial, MatrixBinding};
use super::linalg::hermitian_eigenvalues;
use super::mc::bind_family;
use super::sample::{gue_matrix, sample_gue_family, stream};
use crate::error::{Error, Result};
use crate::ncalg::{Letter, NcPolynomial};

/// One point of an empirical tail curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub u: f64,
    pub tail: f64,
}

/// Empirical `P(||X|| >= D + u)` with `D = 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTail {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub d_reference: f64,
    pub points: Vec<TailPoint>,
}

fn gue_norms(n: usize, samples: usize, seed: u64) -> Vec<f64> {
    (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let ev = hermitian_eigenvalues(&gue_matrix(n, &mut stream(seed, r, 0)));
            ev[0].abs().max(ev[ev.len() - 1].abs())
        })
        .collect()
}

pub fn norm_tail_experiment(n: usize, samples: usize, seed: u64, u_grid: &[f64]) -> Result<NormTail> {
    if n == 0 || samples == 0 {
        return Err(Error::invalid("need N >= 1 and samples >= 1"));
    }
    let norms = gue_norms(n, samples, seed);
    let points = u_grid
        .iter()
        .map(|u| TailPoint { u: *u, tail: norms.iter().filter(|x| **x >= 2.0 + u).count() as f64 / samples as f64 })
        .collect();
    Ok(NormTail { n, samples, seed, d_reference: 2.0, points })
}

/// How the limiting spectrum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Image of `[-2, 2]` under a one-letter polynomial.
    Exact,
    /// No random letters: the spectrum of `P(Z)` itself.
    Deterministic,
    /// Interval hull of the spectrum of one large sample.
    Surrogate,
}

/// Interval containing the limiting spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReference {
    pub lo: f64,
    pub hi: f64,
    pub kind: ReferenceKind,
}

/// Size of the surrogate sample.
pub const SURROGATE_SIZE: usize = 1024;

fn one_letter_image(p: &NcPolynomial) -> Option<(f64, f64)> {
    let letters = p.letters();
    if letters.iter().any(|l| *l != Letter::x(1)) {
        return None;
    }
    let mut coeffs = vec![0.0; p.degree() + 1];
    for (w, c) in p.terms() {
        if !c.is_real() {
            return None;
        }
        coeffs[w.len()] += c.to_c64().re;
    }
    // dense grid; a polynomial image of an interval is an interval
    let steps = 200_000;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..=steps {
        let x = -2.0 + 4.0 * k as f64 / steps as f64;
        let v = coeffs.iter().rev().fold(0.0, |a, c| a * x + c);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Some((lo, hi))
}

/// Reference spectrum for `P` at size `n`.
pub fn spectrum_reference(p: &NcPolynomial, z_for: &dyn Fn(usize) -> MatrixBinding, n: usize, seed: u64) -> Result<SpectrumReference> {
    let has_z = p.letters().iter().any(|l| !l.is_x());
    if !has_z {
        if let Some((lo, hi)) = one_letter_image(p) {
            return Ok(SpectrumReference { lo, hi, kind: ReferenceKind::Exact });
        }
    }
    let d = p.letters().iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(0);
    let (size, kind) = if d == 0 { (n, ReferenceKind::Deterministic) } else { (SURROGATE_SIZE, ReferenceKind::Surrogate) };
    let xs = sample_gue_family(size, d, seed ^ 0x005e_ed0f_5e11, u64::MAX, 0);
    let mut b = bind_family(&xs, &z_for(size));
    if b.is_empty() {
        b.insert(Letter::x(1), super::linalg::CMatrix::zeros(size, size));
    }
    let ev = hermitian_eigenvalues(&checked_eval(p, &b)?);
    Ok(SpectrumReference { lo: ev[0], hi: ev[ev.len() - 1], kind })
}

fn checked_eval(p: &NcPolynomial, b: &MatrixBinding) -> Result<super::linalg::CMatrix> {
    let m = eval_polynomial(p, b)?;
    super::linalg::check_hermitian("P", &m, 1e-9)?;
    Ok(m)
}

/// Violation fraction at one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfinementRow {
    pub n: usize,
    pub samples: usize,
    pub margin: f64,
    pub violations: usize,
    pub fraction: f64,
    pub reference: SpectrumReference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Confinement {
    pub polynomial: String,
    pub alpha: f64,
    pub seed: u64,
    pub rows: Vec<ConfinementRow>,
}

/// Fraction of samples whose spectrum of `P(X, Z)` leaves the reference
/// interval widened by `N^{-alpha}`.
pub fn spectrum_confinement_experiment(
    p: &NcPolynomial,
    z_for: &dyn Fn(usize) -> MatrixBinding,
    sizes: &[usize],
    samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<Confinement> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::invalid(format!("exponent {alpha} outside (0, 1/2)")));
    }
    if samples == 0 || sizes.contains(&0) {
        return Err(Error::invalid("need N >= 1 and samples >= 1"));
    }
    let d = p.letters().iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(0);
    let mut rows = Vec::new();
    for &n in sizes {
        let reference = spectrum_reference(p, z_for, n, seed)?;
        let margin = (n as f64).powf(-alpha);
        let z = z_for(n);
        let bad: Vec<bool> = (0..samples as u64)
            .into_par_iter()
            .map(|r| -> Result<bool> {
                let mut b = bind_family(&sample_gue_family(n, d, seed, r, 0), &z);
                if b.is_empty() {
                    b.insert(Letter::x(1), super::linalg::CMatrix::zeros(n, n));
                }
                let ev = hermitian_eigenvalues(&checked_eval(p, &b)?);
                Ok(ev[0] <= reference.lo - margin || ev[ev.len() - 1] >= reference.hi + margin)
            })
            .collect::<Result<_>>()?;
        let violations = bad.iter().filter(|b| **b).count();
        rows.push(ConfinementRow { n, samples, margin, violations, fraction: violations as f64 / samples as f64, reference });
    }
    Ok(Confinement { polynomial: p.to_string(), alpha, seed, rows })
}

/// Distribution summary of `sqrt(N) / ln(N)^4 (||X|| - 2)` at one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuationRow {
    pub n: usize,
    pub samples: usize,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, f) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

pub fn norm_fluctuation_experiment(sizes: &[usize], samples: usize, seed: u64) -> Result<Vec<FluctuationRow>> {
    if samples == 0 || sizes.iter().any(|n| *n < 2) {
        return Err(Error::invalid("need N >= 2 and samples >= 1"));
    }
    Ok(sizes
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let scale = nf.sqrt() / nf.ln().powi(4);
            let mut v: Vec<f64> = gue_norms(n, samples, seed).into_iter().map(|x| scale * (x - 2.0)).collect();
            v.sort_by(f64::total_cmp);
            FluctuationRow { n, samples, median: quantile(&v, 0.5), q05: quantile(&v, 0.05), q95: quantile(&v, 0.95) }
        })
        .collect())
}
