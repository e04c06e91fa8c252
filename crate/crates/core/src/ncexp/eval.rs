use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::expr::{FAtom, FPoly, FWord, MultiTensor};
use super::scalar::{ParamName, ScalarExpr};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::rmt::{binding_dim, check_hermitian, cmul, eval_polynomial, exp_i, kron, op_norm, spectral_apply, CMatrix, MatrixBinding};

const HERMITIAN_TOL: f64 = 1e-10;

struct AtomEval<'a> {
    bind: &'a MatrixBinding,
    params: &'a dyn Fn(ParamName) -> f64,
    y: f64,
    n: usize,
    memo: HashMap<FAtom, CMatrix>,
}

impl AtomEval<'_> {
    fn atom(&mut self, a: &FAtom) -> Result<CMatrix> {
        if let Some(m) = self.memo.get(a) {
            return Ok(m.clone());
        }
        let m = match a {
            FAtom::Letter(l) => self.bind.get(l).cloned().ok_or_else(|| Error::UnboundLetter(l.to_string()))?,
            FAtom::Exp(e) => {
                let theta = self.theta(&e.scale)?;
                let h = eval_polynomial(&e.base, self.bind)?;
                check_hermitian(&format!("exponent base {}", e.base), &h, HERMITIAN_TOL)?;
                exp_i(&h, theta)
            }
        };
        self.memo.insert(a.clone(), m.clone());
        Ok(m)
    }

    fn theta(&self, s: &ScalarExpr) -> Result<f64> {
        let z = s.eval(self.params, 1.0) * self.y;
        if z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
            return Err(Error::invalid(format!("exponent scale {s} is not real")));
        }
        Ok(z.re)
    }

    fn word(&mut self, w: &FWord) -> Result<CMatrix> {
        let mut acc: Option<CMatrix> = None;
        for a in w {
            let m = self.atom(a)?;
            acc = Some(match acc {
                None => m,
                Some(x) => cmul(&x, &m),
            });
        }
        Ok(acc.unwrap_or_else(|| CMatrix::identity(self.n, self.n)))
    }
}

fn check_binding(bind: &MatrixBinding) -> Result<usize> {
    let n = binding_dim(bind)?;
    for (l, m) in bind {
        if l.is_x() {
            check_hermitian(&l.to_string(), m, HERMITIAN_TOL)?;
        }
    }
    Ok(n)
}

/// Value of `e` at the bound matrices, parameters and Fourier variable `y`.
/// `X` letters must be bound to Hermitian matrices.
pub fn evaluate_numeric(e: &FPoly, bind: &MatrixBinding, params: &dyn Fn(ParamName) -> f64, y: f64) -> Result<CMatrix> {
    let n = check_binding(bind)?;
    let mut ev = AtomEval { bind, params, y, n, memo: HashMap::new() };
    let mut out = CMatrix::zeros(n, n);
    for (w, c) in e.terms() {
        out += ev.word(w)? * c.eval(params, y);
    }
    Ok(out)
}

/// Value of a multi-leg tensor as the Kronecker product of its legs.
pub fn evaluate_tensor(t: &MultiTensor, bind: &MatrixBinding, params: &dyn Fn(ParamName) -> f64, y: f64) -> Result<CMatrix> {
    let n = check_binding(bind)?;
    let mut ev = AtomEval { bind, params, y, n, memo: HashMap::new() };
    let size = n.pow(t.legs() as u32);
    let mut out = CMatrix::zeros(size, size);
    for (legs, c) in t.terms() {
        let mut acc = CMatrix::identity(1, 1);
        for w in legs {
            acc = kron(&acc, &ev.word(w)?);
        }
        out += acc * c.eval(params, y);
    }
    Ok(out)
}

/// Tensorised Gauss-Legendre integral of `f` over `[0, 1]^{params}`.
pub fn integrate_params<F>(params: &[ParamName], nodes: usize, mut f: F) -> Result<CMatrix>
where
    F: FnMut(&dyn Fn(ParamName) -> f64) -> Result<CMatrix>,
{
    let g = GaussLegendre::new(nodes);
    let k = params.len();
    let mut idx = vec![0usize; k];
    let mut acc: Option<CMatrix> = None;
    loop {
        let values: BTreeMap<ParamName, f64> = params.iter().zip(&idx).map(|(p, &i)| (*p, g.nodes[i])).collect();
        let w: f64 = idx.iter().map(|&i| g.weights[i]).product();
        let lookup = |p: ParamName| values.get(&p).copied().unwrap_or(f64::NAN);
        let v = f(&lookup)? * Complex64::new(w, 0.0);
        acc = Some(match acc {
            None => v,
            Some(a) => a + v,
        });
        // odometer over the node grid
        let mut d = 0;
        loop {
            if d == k {
                return acc.ok_or_else(|| Error::invalid("empty quadrature"));
            }
            idx[d] += 1;
            if idx[d] < nodes {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Operator-norm gap between `e^B - e^A` and the Gauss-Legendre quadrature
/// of `int_0^1 e^{aB} (B - A) e^{(1-a)A} da`.
pub fn duhamel_residual(a: &CMatrix, b: &CMatrix, quad_nodes: usize) -> Result<f64> {
    if quad_nodes < 2 {
        return Err(Error::invalid("duhamel_residual needs at least 2 nodes"));
    }
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    check_hermitian("A", a, HERMITIAN_TOL)?;
    check_hermitian("B", b, HERMITIAN_TOL)?;
    let exp_real = |m: &CMatrix, s: f64| spectral_apply(m, |x| Complex64::new((s * x).exp(), 0.0));
    let lhs = exp_real(b, 1.0) - exp_real(a, 1.0);
    let diff = b - a;
    let g = GaussLegendre::new(quad_nodes);
    let mut rhs = CMatrix::zeros(a.nrows(), a.ncols());
    for (x, w) in g.nodes.iter().zip(&g.weights) {
        rhs += cmul(&cmul(&exp_real(b, *x), &diff), &exp_real(a, 1.0 - x)) * Complex64::new(*w, 0.0);
    }
    Ok(op_norm(&(lhs - rhs)))
}
