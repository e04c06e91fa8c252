use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jfamily::{build_j, JFamily};
use super::lop::{apply_full_l, split_letter};
use crate::error::{Error, Result};
use crate::freemoments::{kreweras_trace, normalized_trace_of_product, MixedItem, MAX_MIXED_LETTERS};
use crate::ncalg::{Letter, NcPolynomial};
use crate::quadrature::GaussLegendre;
use crate::rmt::{binding_dim, MatrixBinding};

/// Quadrature settings for [`alpha_polynomial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Gauss-Legendre nodes per axis.
    pub nodes: usize,
    /// Recompute with twice the nodes and compare.
    pub verify: bool,
    /// Largest accepted change under node doubling.
    pub tol: f64,
    /// Permit order 3.
    pub allow_order_three: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { nodes: 16, verify: true, tol: 1e-8, allow_order_three: false }
    }
}

/// Result of [`alpha_polynomial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub order: usize,
    /// Real part of the coefficient.
    pub value: f64,
    pub imag: f64,
    /// Node-doubling difference, zero when not verified.
    pub est_error: f64,
    pub nodes: usize,
    /// Number of time chambers, `1 * 3 * ... * (2k-1)`.
    pub chambers: u64,
    /// Words in the merged integrand.
    pub terms: usize,
}

/// A polynomial in the covariances of pairs, each covariance given by the
/// bitmask of positions where the two lists agree. Keys are sorted mask
/// multisets.
#[derive(Clone, Debug, Default, PartialEq)]
struct MaskSum(HashMap<Vec<u32>, Complex64>);

impl MaskSum {
    fn single(mask: u32) -> Self {
        MaskSum(HashMap::from([(vec![mask], Complex64::new(1.0, 0.0))]))
    }

    fn constant(c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return MaskSum::default();
        }
        MaskSum(HashMap::from([(vec![], c)]))
    }
}

impl Add for MaskSum {
    type Output = MaskSum;
    fn add(mut self, o: MaskSum) -> MaskSum {
        for (k, v) in o.0 {
            *self.0.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        self
    }
}

impl Mul for MaskSum {
    type Output = MaskSum;
    fn mul(self, o: MaskSum) -> MaskSum {
        let mut out: HashMap<Vec<u32>, Complex64> = HashMap::new();
        for (ka, va) in &self.0 {
            for (kb, vb) in &o.0 {
                let mut k = ka.clone();
                k.extend_from_slice(kb);
                k.sort_unstable();
                *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += va * vb;
            }
        }
        MaskSum(out)
    }
}

impl Zero for MaskSum {
    fn zero() -> Self {
        MaskSum::default()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl One for MaskSum {
    fn one() -> Self {
        MaskSum::constant(Complex64::new(1.0, 0.0))
    }
}

/// The order-`k` integrand: `sum over chambers of L...L(Q)`, as a polynomial
/// over the letters of `J_k`. Also returns the families.
pub fn merged_integrand(q: &NcPolynomial, d: u32, k: usize, allow_order_three: bool) -> Result<(NcPolynomial, Vec<JFamily>)> {
    let fams: Vec<JFamily> = (0..=k).map(|n| build_j(n, allow_order_three)).collect::<Result<_>>()?;
    let mut s = q.clone();
    for m in 1..=k {
        s = apply_full_l(&s, d, &fams[m - 1], &fams[m])?;
    }
    Ok((s, fams))
}

fn alphabet_width(q: &NcPolynomial) -> u32 {
    q.letters().iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(1)
}

/// Formal trace of the integrand: coefficients indexed by products of
/// pair covariances.
fn formal_trace(s: &NcPolynomial, d: u32, fam: &JFamily, z: &MatrixBinding) -> Result<Vec<(Vec<u32>, Complex64)>> {
    let n = binding_dim(z).unwrap_or(1);
    let mut total = MaskSum::default();
    for (w, c) in s.terms() {
        if w.len() > MAX_MIXED_LETTERS + 4 * fam.n {
            return Err(Error::guard("integrand word length", w.len(), MAX_MIXED_LETTERS + 4 * fam.n));
        }
        let mut xs: Vec<(usize, u32)> = Vec::new();
        let mut items = Vec::with_capacity(w.len());
        for l in &w.0 {
            if l.is_x() {
                xs.push(split_letter(d, *l));
                items.push(MixedItem::Semi(xs.len() - 1));
            } else {
                if !z.contains_key(l) {
                    return Err(Error::UnboundLetter(l.to_string()));
                }
                items.push(MixedItem::Det(*l));
            }
        }
        let mask = |a: usize, b: usize| -> MaskSum {
            let ((ka, ia), (kb, ib)) = (xs[a], xs[b]);
            if ia != ib {
                return MaskSum::default();
            }
            let m = fam.lists[ka].iter().zip(&fam.lists[kb]).enumerate().fold(0u32, |m, (p, (x, y))| if x == y { m | 1 << p } else { m });
            MaskSum::single(m)
        };
        let t = kreweras_trace(&items, mask, |block: &[Letter]| {
            MaskSum::constant(if block.is_empty() { Complex64::new(1.0, 0.0) } else { normalized_trace_of_product(block.iter().map(|l| &z[l]), n) })
        })?;
        total = total + t * MaskSum::constant(c.to_c64());
    }
    let mut out: Vec<(Vec<u32>, Complex64)> = total.0.into_iter().filter(|(_, v)| v.norm() > 0.0).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Integral over `1 >= v_1 >= ... >= v_2k >= 0` of the formal trace, where a
/// mask `m` stands for `sum_p (v_{p-1} - v_p) [bit p] + v_2k`, `v_0 = 1`.
fn integrate_simplex(terms: &[(Vec<u32>, Complex64)], k: usize, nodes: usize) -> Complex64 {
    let dim = 2 * k;
    if dim == 0 {
        return terms.iter().map(|(_, c)| c).sum();
    }
    let gl = GaussLegendre::new(nodes);
    let masks = 1usize << dim;
    let eval_at = |idx: &[usize]| -> Complex64 {
        // Duffy map from the cube onto the ordered simplex
        let mut v = vec![1.0f64; dim + 1];
        let mut jac = 1.0;
        for p in 1..=dim {
            jac *= v[p - 1] * gl.weights[idx[p - 1]];
            v[p] = v[p - 1] * gl.nodes[idx[p - 1]];
        }
        let covs: Vec<f64> = (0..masks)
            .map(|m| (1..=dim).filter(|p| m >> (p - 1) & 1 == 1).map(|p| v[p - 1] - v[p]).sum::<f64>() + v[dim])
            .collect();
        let s: Complex64 = terms.iter().map(|(key, c)| c * key.iter().map(|m| covs[*m as usize]).product::<f64>()).sum();
        s * jac
    };
    // parallel over the first axis, reduced in index order
    let parts: Vec<Complex64> = (0..nodes)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dim];
            idx[0] = first;
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                acc += eval_at(&idx);
                let mut p = dim - 1;
                loop {
                    if p == 0 {
                        return acc;
                    }
                    idx[p] += 1;
                    if idx[p] < nodes {
                        break;
                    }
                    idx[p] = 0;
                    p -= 1;
                }
            }
        })
        .collect();
    parts.into_iter().sum()
}

/// `alpha_k` of the polynomial `q`: the order-`k` coefficient of
/// `E[tau_N(q(X^N, Z))]` in powers of `1/N^2`, with `Y` letters bound in `z`.
pub fn alpha_polynomial(q: &NcPolynomial, k: usize, z: &MatrixBinding, quad: &QuadConfig) -> Result<AlphaReport> {
    let limit = if quad.allow_order_three { 3 } else { 2 };
    if k > limit {
        return Err(Error::guard("expansion order", k, limit));
    }
    if quad.nodes == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let d = alphabet_width(q);
    let (s, fams) = merged_integrand(q, d, k, quad.allow_order_three)?;
    let terms = formal_trace(&s, d, &fams[k], z)?;
    let value = integrate_simplex(&terms, k, quad.nodes);
    let mut est_error = 0.0;
    if quad.verify && k > 0 {
        let fine = integrate_simplex(&terms, k, 2 * quad.nodes);
        est_error = (fine - value).norm();
        if est_error > quad.tol {
            return Err(Error::Quadrature(est_error));
        }
    }
    Ok(AlphaReport {
        order: k,
        value: value.re,
        imag: value.im,
        est_error,
        nodes: quad.nodes,
        chambers: (1..=k as u64).map(|m| 2 * m - 1).product(),
        terms: s.num_terms(),
    })
}

/// `alpha_0, ..., alpha_kmax` of `q` with no deterministic letters.
pub fn alpha_series(q: &NcPolynomial, kmax: usize, quad: &QuadConfig) -> Result<BTreeMap<usize, AlphaReport>> {
    (0..=kmax).map(|k| Ok((k, alpha_polynomial(q, k, &MatrixBinding::new(), quad)?))).collect()
}
