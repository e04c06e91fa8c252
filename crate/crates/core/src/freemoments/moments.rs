use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::pairings::{nc_pairings_filtered, MAX_PAIRING_POINTS};
use crate::error::{Error, Result};

/// Scalars the pairing sums can be carried out in: exact [`crate::Coeff`],
/// `f64`, `Complex64`.
pub trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync {}
impl<T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Send + Sync> Scalar for T {}

/// Largest word handled by [`mixed_trace`].
pub const MAX_MIXED_LETTERS: usize = 20;

/// Coordinate `coord` of the semicircular family number `family`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemiLetter {
    pub family: u32,
    pub coord: u32,
}

impl SemiLetter {
    pub fn new(family: u32, coord: u32) -> Self {
        SemiLetter { family, coord }
    }
}

/// Covariance `tau(s t)` of a semicircular system.
#[derive(Clone)]
pub struct CovarianceSpec<S = f64> {
    f: Arc<dyn Fn(SemiLetter, SemiLetter) -> S + Send + Sync>,
}

impl<S> fmt::Debug for CovarianceSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CovarianceSpec")
    }
}

impl<S: Scalar> CovarianceSpec<S> {
    pub fn new(f: impl Fn(SemiLetter, SemiLetter) -> S + Send + Sync + 'static) -> Self {
        CovarianceSpec { f: Arc::new(f) }
    }

    /// Free semicircular system: identity covariance.
    pub fn free() -> Self {
        Self::new(|a, b| if a == b { S::one() } else { S::zero() })
    }

    pub fn cov(&self, a: SemiLetter, b: SemiLetter) -> S {
        (self.f)(a, b)
    }
}

impl CovarianceSpec<f64> {
    /// Smallest eigenvalue of the Gram matrix on `letters`; negative values
    /// mean the specification is not a covariance.
    pub fn min_eigenvalue(&self, letters: &[SemiLetter]) -> f64 {
        let n = letters.len();
        if n == 0 {
            return 0.0;
        }
        let g = DMatrix::from_fn(n, n, |i, j| 0.5 * (self.cov(letters[i], letters[j]) + self.cov(letters[j], letters[i])));
        g.symmetric_eigenvalues().min()
    }
}

/// `sum over non-crossing pairings of prod cov(a, b)` for the word
/// `s_0 ... s_{m-1}`, where `cov(a, b)` is the covariance of the letters at
/// positions `a < b`. Interval recursion, cubic in `m`.
pub fn wick_moment<S: Scalar>(m: usize, cov: impl Fn(usize, usize) -> S) -> S {
    if m % 2 == 1 {
        return S::zero();
    }
    if m == 0 {
        return S::one();
    }
    // table[a][len] = moment of the factor s_a .. s_{a+len-1}
    let mut table: Vec<Vec<S>> = vec![vec![S::zero(); m + 1]; m + 1];
    for row in table.iter_mut() {
        row[0] = S::one();
    }
    for len in (2..=m).step_by(2) {
        for a in 0..=m - len {
            let mut acc = S::zero();
            for j in (a + 1..a + len).step_by(2) {
                let c = cov(a, j);
                if c.is_zero() {
                    continue;
                }
                let inside = &table[a + 1][j - a - 1];
                let outside = &table[j + 1][a + len - j - 1];
                if inside.is_zero() || outside.is_zero() {
                    continue;
                }
                acc = acc + c * inside.clone() * outside.clone();
            }
            table[a][len] = acc;
        }
    }
    table[0][m].clone()
}

/// One entry of a mixed word: a semicircular letter or a deterministic one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MixedItem<D> {
    Semi(usize),
    Det(D),
}

/// `tau(word)` for a word mixing semicircular letters (free from the
/// deterministic ones) and deterministic letters.
///
/// Between consecutive semicircular letters the deterministic letters form
/// segments `a_k` (cyclically). The result is the sum over non-crossing
/// pairings `pi` of `prod cov` times `prod tau(a_{k_1} a_{k_2} ...)` over the
/// cycles of `k -> pi(k + 1)`. `block_trace` receives the deterministic
/// letters of one cycle in order and returns their normalised trace.
pub fn kreweras_trace<S, D>(
    word: &[MixedItem<D>],
    cov: impl Fn(usize, usize) -> S,
    mut block_trace: impl FnMut(&[D]) -> S,
) -> Result<S>
where
    S: Scalar,
    D: Copy + Eq + std::hash::Hash,
{
    let semis: Vec<usize> = word.iter().enumerate().filter(|(_, x)| matches!(x, MixedItem::Semi(_))).map(|(k, _)| k).collect();
    let m = semis.len();
    if m > MAX_PAIRING_POINTS {
        return Err(Error::guard("semicircular letters", m, MAX_PAIRING_POINTS));
    }
    let det_of = |k: usize| match word[k] {
        MixedItem::Det(d) => Some(d),
        MixedItem::Semi(_) => None,
    };
    if m == 0 {
        let all: Vec<D> = (0..word.len()).filter_map(det_of).collect();
        return Ok(block_trace(&all));
    }
    if m % 2 == 1 {
        return Ok(S::zero());
    }
    let sid = |k: usize| match word[semis[k]] {
        MixedItem::Semi(s) => s,
        MixedItem::Det(_) => unreachable!(),
    };
    // segment k sits after the k-th semicircular letter, wrapping around
    let n = word.len();
    let segments: Vec<Vec<D>> = (0..m)
        .map(|k| {
            let start = semis[k] + 1;
            let end = if k + 1 < m { semis[k + 1] } else { semis[0] + n };
            (start..end).filter_map(|p| det_of(p % n)).collect()
        })
        .collect();

    let covs: Vec<Vec<S>> = (0..m).map(|a| (0..m).map(|b| cov(sid(a), sid(b))).collect()).collect();
    let pts: Vec<usize> = (0..m).collect();
    let pairings = nc_pairings_filtered(&pts, &|a, b| !covs[a][b].is_zero());

    let mut memo: HashMap<Vec<D>, S> = HashMap::new();
    let mut total = S::zero();
    let mut partner = vec![0usize; m];
    let mut seen = vec![false; m];
    let mut buf: Vec<D> = Vec::new();
    for p in pairings {
        let mut w = S::one();
        for &(a, b) in &p {
            partner[a] = b;
            partner[b] = a;
            w = w * covs[a][b].clone();
        }
        seen.iter_mut().for_each(|s| *s = false);
        for start in 0..m {
            if seen[start] {
                continue;
            }
            buf.clear();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                buf.extend_from_slice(&segments[k]);
                k = partner[(k + 1) % m];
            }
            let t = match memo.get(&buf) {
                Some(t) => t.clone(),
                None => {
                    let t = block_trace(&buf);
                    memo.insert(buf.clone(), t.clone());
                    t
                }
            };
            w = w * t;
            if w.is_zero() {
                break;
            }
        }
        total = total + w;
    }
    Ok(total)
}

/// Mixed trace of semicircular letters and deterministic matrices, with
/// `tau_N = Tr / N` on the deterministic side.
pub fn mixed_trace(
    word: &[MixedItem<&DMatrix<num_complex::Complex64>>],
    letters: &[SemiLetter],
    cov: &CovarianceSpec<f64>,
) -> Result<num_complex::Complex64> {
    use num_complex::Complex64;
    if word.len() > MAX_MIXED_LETTERS {
        return Err(Error::guard("mixed word length", word.len(), MAX_MIXED_LETTERS));
    }
    let n = word
        .iter()
        .find_map(|x| match x {
            MixedItem::Det(m) => Some(m.nrows()),
            MixedItem::Semi(_) => None,
        })
        .unwrap_or(1);
    // work with indices so blocks can be memoised
    let mats: Vec<&DMatrix<Complex64>> = word
        .iter()
        .filter_map(|x| match x {
            MixedItem::Det(m) => Some(*m),
            MixedItem::Semi(_) => None,
        })
        .collect();
    for m in &mats {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!("expected {n}x{n} deterministic matrices")));
        }
    }
    let mut next = 0;
    let indexed: Vec<MixedItem<usize>> = word
        .iter()
        .map(|x| match x {
            MixedItem::Semi(s) => MixedItem::Semi(*s),
            MixedItem::Det(_) => {
                next += 1;
                MixedItem::Det(next - 1)
            }
        })
        .collect();
    kreweras_trace(
        &indexed,
        |a, b| Complex64::new(cov.cov(letters[a], letters[b]), 0.0),
        |block| normalized_trace_of_product(block.iter().map(|&k| mats[k]), n),
    )
}

/// `Tr(M_1 ... M_k) / N`; the identity for an empty product.
pub(crate) fn normalized_trace_of_product<'a>(
    mut mats: impl Iterator<Item = &'a DMatrix<num_complex::Complex64>>,
    n: usize,
) -> num_complex::Complex64 {
    let Some(first) = mats.next() else {
        return num_complex::Complex64::one();
    };
    let mut acc = first.clone();
    for m in mats {
        acc = crate::rmt::cmul(&acc, m);
    }
    acc.trace() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemoments::pairings::enumerate_nc_pairings;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    #[test]
    fn wick_matches_enumeration() {
        // letters with a generic symmetric covariance
        let c = |a: usize, b: usize| ((a * 7 + b * 7 + (a * b) % 5) % 11) as f64 - 3.0;
        for m in [2, 4, 6, 8, 10] {
            let brute: f64 = enumerate_nc_pairings(m).unwrap().iter().map(|p| p.iter().map(|&(a, b)| c(a, b)).product::<f64>()).sum();
            let dp = wick_moment(m, c);
            assert!((brute - dp).abs() < 1e-9 * brute.abs().max(1.0), "m={m}: {brute} vs {dp}");
        }
    }

    #[test]
    fn kreweras_hand_case() {
        // s a1 s a2 s a3 s a4 s a5 s a6 with all covariances 1: the pairing
        // (01)(23)(45) contributes tau(a1) tau(a3) tau(a5) tau(a2 a4 a6)
        let word: Vec<MixedItem<usize>> = (0..6).flat_map(|k| [MixedItem::Semi(0), MixedItem::Det(k)]).collect();
        let mut blocks = Vec::new();
        kreweras_trace(&word, |_, _| 1.0f64, |b| {
            blocks.push(b.to_vec());
            1.0
        })
        .unwrap();
        assert!(blocks.contains(&vec![1, 3, 5]));
        assert!(blocks.contains(&vec![0]));
    }

    #[test]
    fn identity_matrices_reduce_to_catalan() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        let s = SemiLetter::new(0, 1);
        let word: Vec<_> = (0..6).flat_map(|_| [MixedItem::Semi(0), MixedItem::Det(&id)]).collect();
        let t = mixed_trace(&word, &[s], &CovarianceSpec::free()).unwrap();
        assert!((t - Complex64::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn covariance_check() {
        let letters = [SemiLetter::new(0, 1), SemiLetter::new(0, 2)];
        assert!(CovarianceSpec::<f64>::free().min_eigenvalue(&letters) > 0.5);
        let bad = CovarianceSpec::new(|a: SemiLetter, b: SemiLetter| if a == b { 1.0 } else { 2.0 });
        assert!(bad.min_eigenvalue(&letters) < 0.0);
    }
}
