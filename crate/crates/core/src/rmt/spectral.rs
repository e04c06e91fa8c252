use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{check_hermitian, hermitian_eigenvalues, spectral_apply, CMatrix};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `e^{-x^-4 - (1-x)^-4}` on `(0, 1)`, zero elsewhere.
pub fn h_bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-(x.powi(-4)) - (1.0 - x).powi(-4)).exp()
    }
}

/// `int_0^x h` for `x` in `[0, 1/2]`. Below 0.2 the bump is under 1e-270
/// and is dropped; the rest is split into panels because `h` rises steeply.
fn h_primitive_half(x: f64) -> f64 {
    const START: f64 = 0.2;
    const PANELS: usize = 16;
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    let gl = GL.get_or_init(|| GaussLegendre::new(32));
    let x = x.min(0.5);
    if x <= START {
        return 0.0;
    }
    let w = (x - START) / PANELS as f64;
    (0..PANELS).map(|k| gl.integrate(START + k as f64 * w, START + (k + 1) as f64 * w, h_bump)).sum()
}

/// Primitive of [`h_bump`], zero on the negative axis and one from 1 on.
pub fn h_step(x: f64) -> f64 {
    static TOTAL: OnceLock<f64> = OnceLock::new();
    let total = *TOTAL.get_or_init(|| 2.0 * h_primitive_half(0.5));
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if x <= 0.5 {
        (h_primitive_half(x) / total).min(0.5)
    } else {
        // h is symmetric about 1/2, so the upper half mirrors the lower one
        1.0 - h_step(1.0 - x)
    }
}

/// Scalar test functions applied to spectra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralFunctionSpec {
    /// `sum_k coeffs[k] x^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `exp(-((x - center) / width)^2)`.
    GaussianBump { center: f64, width: f64 },
    /// Smooth bump supported in `[lo, hi]`, equal to 1 at the midpoint.
    Bump { lo: f64, hi: f64 },
    /// 1 on `[lo, hi]`, 0 outside `(lo - ramp, hi + ramp)`, smooth steps built
    /// from the primitive of [`h_bump`].
    Plateau { lo: f64, hi: f64, ramp: f64 },
    /// Piecewise linear through the points, constant beyond the ends.
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl SpectralFunctionSpec {
    pub fn identity() -> Self {
        SpectralFunctionSpec::Polynomial { coeffs: vec![0.0, 1.0] }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, SpectralFunctionSpec::Polynomial { coeffs } if coeffs.len() == 2 && coeffs[0] == 0.0 && coeffs[1] == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralFunctionSpec::Polynomial { coeffs } if coeffs.is_empty() => Err(Error::invalid("polynomial without coefficients")),
            SpectralFunctionSpec::GaussianBump { width, .. } if !(*width > 0.0) => Err(Error::invalid("bump width must be positive")),
            SpectralFunctionSpec::Bump { lo, hi } if !(hi > lo) => Err(Error::invalid("bump needs lo < hi")),
            SpectralFunctionSpec::Plateau { lo, hi, ramp } if !(hi >= lo && *ramp > 0.0) => Err(Error::invalid("plateau needs lo <= hi and ramp > 0")),
            SpectralFunctionSpec::Table { nodes, values } => {
                if nodes.is_empty() || nodes.len() != values.len() {
                    return Err(Error::invalid("table needs matching, nonempty nodes and values"));
                }
                if nodes.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("table nodes must increase"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SpectralFunctionSpec::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            SpectralFunctionSpec::GaussianBump { center, width } => (-((x - center) / width).powi(2)).exp(),
            SpectralFunctionSpec::Bump { lo, hi } => h_bump((x - lo) / (hi - lo)) / h_bump(0.5),
            SpectralFunctionSpec::Plateau { lo, hi, ramp } => h_step((x - lo + ramp) / ramp) * h_step((hi + ramp - x) / ramp),
            SpectralFunctionSpec::Table { nodes, values } => {
                let k = nodes.partition_point(|t| *t <= x);
                if k == 0 {
                    values[0]
                } else if k == nodes.len() {
                    values[k - 1]
                } else {
                    let (x0, x1) = (nodes[k - 1], nodes[k]);
                    let w = (x - x0) / (x1 - x0);
                    values[k - 1] * (1.0 - w) + values[k] * w
                }
            }
        }
    }

    /// `f(m)` for Hermitian `m`.
    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        check_hermitian("matrix", m, 1e-10)?;
        Ok(spectral_apply(m, |x| Complex64::new(self.eval(x), 0.0)))
    }

    /// `Tr f(m) / N` from the eigenvalues of Hermitian `m`.
    pub fn normalized_trace(&self, m: &CMatrix) -> Result<f64> {
        check_hermitian("matrix", m, 1e-10)?;
        let ev = hermitian_eigenvalues(m);
        Ok(ev.iter().map(|x| self.eval(*x)).sum::<f64>() / ev.len() as f64)
    }
}
