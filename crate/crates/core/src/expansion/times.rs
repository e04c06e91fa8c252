use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::jfamily::JFamily;
use super::lop::{j_letter, split_letter};
use crate::error::{Error, Result};
use crate::freemoments::{CovarianceSpec, FreeBinding, SemiLetter};
use crate::ncalg::Letter;
use crate::rmt::CMatrix;

/// Times `(t_1, ..., t_2n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeVector {
    pub t: Vec<f64>,
}

impl TimeVector {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() % 2 == 1 {
            return Err(Error::Dimension(format!("{} times, expected an even count", t.len())));
        }
        if let Some(x) = t.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid(format!("time {x} is not a nonnegative number")));
        }
        Ok(TimeVector { t })
    }

    /// Level `n`, half the number of times.
    pub fn level(&self) -> usize {
        self.t.len() / 2
    }

    /// Sorted times with a leading zero.
    pub fn sorted(&self) -> Vec<f64> {
        let mut s = self.t.clone();
        s.sort_by(|a, b| a.total_cmp(b));
        s.insert(0, 0.0);
        s
    }

    /// `t_2n >= t_2n-2 >= ... >= t_2 >= 0` and `t_2s >= t_2s-1` for all `s`.
    pub fn in_simplex(&self) -> bool {
        let n = self.level();
        (1..=n).all(|s| self.t[2 * s - 1] >= self.t[2 * s - 2]) && (2..=n).all(|s| self.t[2 * s - 1] >= self.t[2 * s - 3])
    }

    /// Square roots of the interval weights, then the weight of the base
    /// system.
    pub fn weights(&self) -> (Vec<f64>, f64) {
        let s = self.sorted();
        let w = (1..s.len()).map(|l| ((-s[l - 1]).exp() - (-s[l]).exp()).max(0.0).sqrt()).collect();
        (w, (-s[s.len() - 1] / 2.0).exp())
    }
}

/// Semicircular letters realising `x^T_{i,I}`: copy `s` is family `s`,
/// the base system is family 0.
pub fn xt_semis(times: &TimeVector, fam: &JFamily, d: u32) -> Result<BTreeMap<Letter, Vec<(SemiLetter, f64)>>> {
    if times.level() != fam.n {
        return Err(Error::Dimension(format!("{} times for level {}", times.t.len(), fam.n)));
    }
    let (w, base) = times.weights();
    let mut out = BTreeMap::new();
    for (k, list) in fam.lists.iter().enumerate() {
        for i in 1..=d {
            let mut comb: Vec<(SemiLetter, f64)> = list.iter().zip(&w).map(|(s, c)| (SemiLetter::new(*s, i), *c)).collect();
            comb.push((SemiLetter::new(0, i), base));
            out.insert(j_letter(d, k, i), comb);
        }
    }
    Ok(out)
}

/// Covariance of the family `x^T`: for `X_{i,I}` and `X_{i',J}`,
/// `delta_{ii'} (sum_{l,l'} w_l w_l' [I_l = J_l'] + e^{-t_2n})`.
/// Letters are addressed by [`xt_index`]: `family` is the list number.
pub fn xt_covariance(times: &TimeVector, fam: &JFamily) -> Result<CovarianceSpec<f64>> {
    if times.level() != fam.n {
        return Err(Error::Dimension(format!("{} times for level {}", times.t.len(), fam.n)));
    }
    let (w, base) = times.weights();
    let lists = fam.lists.clone();
    Ok(CovarianceSpec::new(move |a: SemiLetter, b: SemiLetter| {
        if a.coord != b.coord {
            return 0.0;
        }
        let (la, lb) = (&lists[a.family as usize], &lists[b.family as usize]);
        let mut v = base * base;
        for (l, x) in la.iter().enumerate() {
            for (m, y) in lb.iter().enumerate() {
                if x == y {
                    v += w[l] * w[m];
                }
            }
        }
        v
    }))
}

/// Binding of the level-`n` letters to `x^T` with the given deterministic
/// matrices, ready for [`crate::freemoments::trace_of_polynomial`].
pub fn xt_binding(times: &TimeVector, fam: &JFamily, d: u32, dets: BTreeMap<Letter, CMatrix>) -> Result<FreeBinding> {
    FreeBinding::new(xt_semis(times, fam, d)?, dets, &CovarianceSpec::free())
}

/// `(list, coord)` pair of a letter, as used by [`xt_covariance`].
pub fn xt_index(d: u32, l: Letter) -> SemiLetter {
    let (k, i) = split_letter(d, l);
    SemiLetter::new(k as u32, i)
}
