use std::collections::BTreeMap;
use std::ops::Sub;

use nalgebra::DMatrix;
use num_traits::Zero;
use num_complex::Complex64;

use super::moments::{kreweras_trace, wick_moment, CovarianceSpec, MixedItem, Scalar, SemiLetter, MAX_MIXED_LETTERS};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::ncalg::{nc_derivative, Letter, NcPolynomial};

/// A tracial state on polynomials.
pub trait TraceFunctional {
    type S: Scalar + Sub<Output = Self::S>;
    fn trace(&self, p: &NcPolynomial) -> Result<Self::S>;
}

/// Exact trace of polynomials in `X` letters only, the `X` letters forming
/// a semicircular system with a rational covariance.
pub struct ExactFreeTrace {
    cov: Box<dyn Fn(Letter, Letter) -> Coeff + Send + Sync>,
}

impl ExactFreeTrace {
    /// Free semicircular system.
    pub fn free() -> Self {
        ExactFreeTrace { cov: Box::new(|a, b| if a == b { Coeff::from_int(1) } else { Coeff::default() }) }
    }

    pub fn with_covariance(cov: impl Fn(Letter, Letter) -> Coeff + Send + Sync + 'static) -> Self {
        ExactFreeTrace { cov: Box::new(cov) }
    }
}

impl TraceFunctional for ExactFreeTrace {
    type S = Coeff;

    fn trace(&self, p: &NcPolynomial) -> Result<Coeff> {
        let mut total = Coeff::default();
        for (w, c) in p.terms() {
            if let Some(l) = w.0.iter().find(|l| !l.is_x()) {
                return Err(Error::UnboundLetter(l.to_string()));
            }
            let m = wick_moment(w.len(), |a, b| (self.cov)(w.0[a], w.0[b]));
            total += c * &m;
        }
        Ok(total)
    }
}

/// Binding of `X` letters to linear combinations of semicircular letters and
/// of `Y` letters to `N x N` matrices.
#[derive(Clone, Debug)]
pub struct FreeBinding {
    semis: BTreeMap<Letter, Vec<(SemiLetter, f64)>>,
    dets: BTreeMap<Letter, DMatrix<Complex64>>,
    induced: BTreeMap<(Letter, Letter), f64>,
    n: usize,
}

impl FreeBinding {
    pub fn new(
        semis: BTreeMap<Letter, Vec<(SemiLetter, f64)>>,
        dets: BTreeMap<Letter, DMatrix<Complex64>>,
        cov: &CovarianceSpec<f64>,
    ) -> Result<Self> {
        let n = dets.values().next().map(|m| m.nrows()).unwrap_or(1);
        if let Some((l, _)) = dets.iter().find(|(_, m)| m.nrows() != n || m.ncols() != n) {
            return Err(Error::Dimension(format!("{l} is not {n}x{n}")));
        }
        // linear combinations of a semicircular system are semicircular with
        // the bilinearly induced covariance
        let mut induced = BTreeMap::new();
        for (la, ca) in &semis {
            for (lb, cb) in &semis {
                let v: f64 = ca.iter().flat_map(|(sa, a)| cb.iter().map(move |(sb, b)| a * b * cov.cov(*sa, *sb))).sum();
                induced.insert((*la, *lb), v);
            }
        }
        Ok(FreeBinding { semis, dets, induced, n })
    }

    /// `X_i -> s_i` for a free system and the given matrices for `Y`.
    pub fn free(d: u32, dets: BTreeMap<Letter, DMatrix<Complex64>>) -> Result<Self> {
        let semis = (1..=d).map(|i| (Letter::x(i), vec![(SemiLetter::new(0, i), 1.0)])).collect();
        Self::new(semis, dets, &CovarianceSpec::free())
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

impl TraceFunctional for FreeBinding {
    type S = Complex64;

    fn trace(&self, p: &NcPolynomial) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (w, c) in p.terms() {
            if w.len() > MAX_MIXED_LETTERS {
                return Err(Error::guard("mixed word length", w.len(), MAX_MIXED_LETTERS));
            }
            let mut xs: Vec<Letter> = Vec::new();
            let mut items = Vec::with_capacity(w.len());
            for l in &w.0 {
                if l.is_x() {
                    if !self.semis.contains_key(l) {
                        return Err(Error::UnboundLetter(l.to_string()));
                    }
                    xs.push(*l);
                    items.push(MixedItem::Semi(xs.len() - 1));
                } else {
                    if !self.dets.contains_key(l) {
                        return Err(Error::UnboundLetter(l.to_string()));
                    }
                    items.push(MixedItem::Det(*l));
                }
            }
            let t = kreweras_trace(
                &items,
                |a, b| Complex64::new(self.induced[&(xs[a], xs[b])], 0.0),
                |block| super::moments::normalized_trace_of_product(block.iter().map(|l| &self.dets[l]), self.n),
            )?;
            total += c.to_c64() * t;
        }
        Ok(total)
    }
}

/// `tau(P)` under a binding; see [`FreeBinding`].
pub fn trace_of_polynomial(p: &NcPolynomial, binding: &FreeBinding) -> Result<Complex64> {
    binding.trace(p)
}

/// `tau(Q x_i) - tau (x) tau(d_i Q)`, zero for a free semicircular system.
pub fn sd_residual<T: TraceFunctional>(tr: &T, q: &NcPolynomial, i: u32) -> Result<T::S> {
    let lhs = tr.trace(&(q * &NcPolynomial::x(i)))?;
    let mut rhs = T::S::zero();
    for (a, b, c) in nc_derivative(q, i).terms() {
        let ta = tr.trace(&NcPolynomial::monomial(c.clone(), a.clone()))?;
        let tb = tr.trace(&NcPolynomial::monomial(Coeff::from_int(1), b.clone()))?;
        rhs = rhs + ta * tb;
    }
    Ok(lhs - rhs)
}


