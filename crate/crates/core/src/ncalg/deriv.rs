use super::letter::{Letter, Word};
use super::poly::{NcPolynomial, TensorPoly};
use crate::coeff::Coeff;

/// Noncommutative derivative with respect to every letter selected by `pred`:
/// each occurrence splits its word into `prefix (x) suffix`.
pub fn derivative_where(p: &NcPolynomial, pred: impl Fn(Letter) -> bool) -> TensorPoly {
    let mut t = TensorPoly::zero();
    for (w, c) in p.terms() {
        for (k, l) in w.0.iter().enumerate() {
            if pred(*l) {
                t.add_term(Word(w.0[..k].to_vec()), Word(w.0[k + 1..].to_vec()), c.clone());
            }
        }
    }
    t
}

/// Cyclic derivative: each occurrence contributes `suffix * prefix`.
pub fn cyclic_derivative_where(p: &NcPolynomial, pred: impl Fn(Letter) -> bool) -> NcPolynomial {
    let mut q = NcPolynomial::zero();
    for (w, c) in p.terms() {
        for (k, l) in w.0.iter().enumerate() {
            if pred(*l) {
                let mut v = w.0[k + 1..].to_vec();
                v.extend_from_slice(&w.0[..k]);
                q.add_term(Word(v), c.clone());
            }
        }
    }
    q
}

/// `d_i P` with respect to the single letter `X_i`.
pub fn nc_derivative(p: &NcPolynomial, i: u32) -> TensorPoly {
    derivative_where(p, |l| l == Letter::x(i))
}

/// `D_i P = m o d_i P` with `m(A (x) B) = BA`.
pub fn cyclic_derivative(p: &NcPolynomial, i: u32) -> NcPolynomial {
    cyclic_derivative_where(p, |l| l == Letter::x(i))
}

/// The three ways an elementary tensor acts on the algebra.
#[derive(Clone, Debug)]
pub enum TensorAction<'a> {
    /// `(A (x) B) # C = A C B`.
    Sharp(&'a NcPolynomial),
    /// `(A (x) B) ~# C = B C A`.
    TildeSharp(&'a NcPolynomial),
    /// `m(A (x) B) = B A`.
    Multiply,
}

pub fn tensor_apply(t: &TensorPoly, action: TensorAction<'_>) -> NcPolynomial {
    let mut out = NcPolynomial::zero();
    for (a, b, c) in t.terms() {
        let (a, b) = (NcPolynomial::monomial(c.clone(), a.clone()), NcPolynomial::monomial(Coeff::from_int(1), b.clone()));
        let term = match action {
            TensorAction::Sharp(x) => &(&a * x) * &b,
            TensorAction::TildeSharp(x) => &(&b * x) * &a,
            TensorAction::Multiply => &b * &a,
        };
        out = &out + &term;
    }
    out
}
