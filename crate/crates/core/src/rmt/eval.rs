use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::linalg::{cmul, trace_of_product, CMatrix};
use crate::error::{Error, Result};
use crate::ncalg::{Letter, NcPolynomial};

/// Letters bound to square matrices of one common size.
pub type MatrixBinding = BTreeMap<Letter, CMatrix>;

/// Checks that all matrices share a size and returns it.
pub fn binding_dim(bind: &MatrixBinding) -> Result<usize> {
    let n = bind.values().next().map(|m| m.nrows()).ok_or_else(|| Error::invalid("empty matrix binding"))?;
    for (l, m) in bind {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!("{l} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
        }
    }
    Ok(n)
}

/// Products of subwords, shared between the words of a polynomial.
struct SubwordCache<'a> {
    bind: &'a MatrixBinding,
    memo: HashMap<Vec<Letter>, CMatrix>,
}

impl<'a> SubwordCache<'a> {
    fn new(bind: &'a MatrixBinding) -> Self {
        SubwordCache { bind, memo: HashMap::new() }
    }

    fn product(&mut self, w: &[Letter]) -> Result<CMatrix> {
        if w.len() == 1 {
            return self.bind.get(&w[0]).cloned().ok_or_else(|| Error::UnboundLetter(w[0].to_string()));
        }
        if let Some(m) = self.memo.get(w) {
            return Ok(m.clone());
        }
        let h = w.len() / 2;
        let m = cmul(&self.product(&w[..h])?, &self.product(&w[h..])?);
        self.memo.insert(w.to_vec(), m.clone());
        Ok(m)
    }
}

/// `P(Z)` for the bound matrices.
pub fn eval_polynomial(p: &NcPolynomial, bind: &MatrixBinding) -> Result<CMatrix> {
    let n = binding_dim(bind)?;
    let mut cache = SubwordCache::new(bind);
    let mut out = CMatrix::zeros(n, n);
    for (w, c) in p.terms() {
        let c = c.to_c64();
        if w.is_empty() {
            for i in 0..n {
                out[(i, i)] += c;
            }
            continue;
        }
        out += cache.product(&w.0)? * c;
    }
    Ok(out)
}

/// `Tr P(Z) / N` without forming the full products of the last split.
pub fn normalized_trace(p: &NcPolynomial, bind: &MatrixBinding) -> Result<Complex64> {
    let n = binding_dim(bind)?;
    let mut cache = SubwordCache::new(bind);
    let mut total = Complex64::new(0.0, 0.0);
    for (w, c) in p.terms() {
        let t = match w.len() {
            0 => Complex64::new(n as f64, 0.0),
            1 => cache.product(&w.0)?.trace(),
            len => {
                let h = len / 2;
                let a = cache.product(&w.0[..h])?;
                let b = cache.product(&w.0[h..])?;
                trace_of_product(&a, &b)
            }
        };
        total += c.to_c64() * t;
    }
    Ok(total / n as f64)
}
