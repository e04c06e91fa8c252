//! Deterministic matrices from text: `Y1=diag:1,-1;Y2=shift`. Diagonal
//! patterns repeat to fill the size; `shift` is the cyclic shift. The
//! adjoint letters `Y_{r+i}` are bound automatically.

use num_complex::Complex64;
use topexp::rmt::{CMatrix, MatrixBinding};
use topexp::{Error, Letter, Result};

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Diag(Vec<f64>),
    Shift,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZSpec {
    mats: Vec<Kind>,
}

impl ZSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut mats: Vec<(u32, Kind)> = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, def) = item.split_once('=').ok_or_else(|| Error::invalid(format!("matrix spec {item:?}: expected Yk=...")))?;
            let k: u32 = name.trim().strip_prefix('Y').and_then(|s| s.parse().ok()).ok_or_else(|| Error::invalid(format!("bad matrix name {name:?}")))?;
            let def = def.trim();
            let kind = if def == "shift" {
                Kind::Shift
            } else if let Some(vals) = def.strip_prefix("diag:") {
                let v = vals.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad diagonal entry {x:?}")))).collect::<Result<Vec<_>>>()?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("diagonal entries must be finite"));
                }
                Kind::Diag(v)
            } else {
                return Err(Error::invalid(format!("unknown matrix kind {def:?}, use diag:... or shift")));
            };
            mats.push((k, kind));
        }
        mats.sort_by_key(|m| m.0);
        for (pos, (k, _)) in mats.iter().enumerate() {
            if *k != pos as u32 + 1 {
                return Err(Error::invalid("matrices must be named Y1, ..., Yr without gaps"));
            }
        }
        Ok(ZSpec { mats: mats.into_iter().map(|m| m.1).collect() })
    }

    /// Number of letter pairs `r`.
    pub fn r(&self) -> u32 {
        self.mats.len() as u32
    }

    /// Smallest size holding every diagonal pattern once.
    pub fn natural_size(&self) -> usize {
        self.mats.iter().map(|m| if let Kind::Diag(v) = m { v.len() } else { 1 }).max().unwrap_or(1)
    }

    pub fn binding(&self, n: usize) -> MatrixBinding {
        let r = self.r();
        let mut b = MatrixBinding::new();
        for (i, m) in self.mats.iter().enumerate() {
            let a = match m {
                Kind::Diag(v) => CMatrix::from_fn(n, n, |p, q| if p == q { Complex64::new(v[p % v.len()], 0.0) } else { Complex64::new(0.0, 0.0) }),
                Kind::Shift => CMatrix::from_fn(n, n, |p, q| if q == (p + 1) % n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }),
            };
            let i = i as u32 + 1;
            b.insert(Letter::y(i + r), a.adjoint());
            b.insert(Letter::y(i), a);
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_adjoint_pairs() {
        let z = ZSpec::parse("Y2=shift; Y1=diag:1,-2").unwrap();
        assert_eq!(z.r(), 2);
        let b = z.binding(3);
        assert_eq!(b.len(), 4);
        assert_eq!(b[&Letter::y(1)][(1, 1)].re, -2.0);
        assert_eq!(b[&Letter::y(1)][(2, 2)].re, 1.0);
        assert_eq!(b[&Letter::y(4)], b[&Letter::y(2)].adjoint());
        assert!(ZSpec::parse("Y2=shift").is_err());
        assert!(ZSpec::parse("Y1=dense").is_err());
    }
}
