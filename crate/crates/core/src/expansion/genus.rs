use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::alpha::{alpha_polynomial, QuadConfig};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::freemoments::for_each_pairing;
use crate::ncalg::{Letter, NcPolynomial, Word};
use crate::rmt::MatrixBinding;

/// Longest word accepted by [`genus_oracle`].
pub const MAX_ORACLE_LETTERS: usize = 16;

/// Quadrature summary attached to a table computed by the integral formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSummary {
    pub nodes: usize,
    pub chambers: u64,
    pub est_error: f64,
}

/// Counts of one-vertex maps by genus for a colored word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenusTable {
    pub word: String,
    pub table: BTreeMap<u32, u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub raw: BTreeMap<u32, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadSummary>,
}

impl GenusTable {
    /// `sum_g table[g] N^{-2g}` in exact arithmetic.
    pub fn evaluate(&self, n: u64) -> BigRational {
        let n2 = BigInt::from(n) * BigInt::from(n);
        self.table
            .iter()
            .map(|(g, c)| BigRational::new(BigInt::from(*c), num_traits::pow(n2.clone(), *g as usize)))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

fn colors_of(word: &Word) -> Result<Vec<u32>> {
    word.0
        .iter()
        .map(|l| if l.is_x() { Ok(l.index) } else { Err(Error::invalid(format!("{l} is not an X letter"))) })
        .collect()
}

/// Enumerates the color-respecting pairings of `word` and sorts them by the
/// genus of the one-vertex gluing. Genera above `max_genus` are dropped.
pub fn genus_oracle(word: &Word, max_genus: u32) -> Result<GenusTable> {
    let colors = colors_of(word)?;
    let m = colors.len();
    if m > MAX_ORACLE_LETTERS {
        return Err(Error::guard("oracle word length", m, MAX_ORACLE_LETTERS));
    }
    let mut table = BTreeMap::new();
    if m % 2 == 0 {
        let mut seen = vec![false; m];
        for_each_pairing(m, &|a, b| colors[a] == colors[b], &mut |partner| {
            // faces are the cycles of k -> partner(k) + 1
            seen.iter_mut().for_each(|s| *s = false);
            let mut faces = 0usize;
            for start in 0..m {
                if seen[start] {
                    continue;
                }
                faces += 1;
                let mut k = start;
                while !seen[k] {
                    seen[k] = true;
                    k = (partner[k] + 1) % m;
                }
            }
            let g = ((1 + m / 2 - faces) / 2) as u32;
            if g <= max_genus {
                *table.entry(g).or_insert(0u64) += 1;
            }
        });
    }
    Ok(GenusTable { word: word.to_string(), table, raw: BTreeMap::new(), quad: None })
}

fn double_factorial_odd(p: u32) -> BigUint {
    // (p - 1)!! for even p
    (1..p).step_by(2).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
}

fn factorial(p: u32) -> BigUint {
    (1..=p).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
}

/// `E[(1/N) Tr word(X^N)]` for independent GUE matrices, summing over all
/// index assignments and using the moments of the individual entries.
/// Exponential in the word length.
pub fn finite_n_expectation(word: &Word, n: u32) -> Result<BigRational> {
    let colors = colors_of(word)?;
    let m = colors.len();
    if m > 10 {
        return Err(Error::guard("entrywise oracle length", m, 10));
    }
    if n == 0 {
        return Err(Error::invalid("matrix size must be positive"));
    }
    if m % 2 == 1 {
        return Ok(BigRational::zero());
    }
    if m == 0 {
        return Ok(BigRational::one());
    }
    let mut idx = vec![0u32; m];
    let mut total = BigUint::zero();
    let mut memo: HashMap<Vec<(u32, u32)>, BigUint> = HashMap::new();
    // entry (color, low, high) -> (count of X_{low,high}, count of X_{high,low})
    let mut groups: Vec<((u32, u32, u32), u32, u32)> = Vec::with_capacity(m);
    loop {
        groups.clear();
        for k in 0..m {
            let (a, b) = (idx[k], idx[(k + 1) % m]);
            let key = (colors[k], a.min(b), a.max(b));
            let fwd = a <= b;
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => {
                    if fwd {
                        g.1 += 1
                    } else {
                        g.2 += 1
                    }
                }
                None => groups.push((key, fwd as u32, (!fwd) as u32)),
            }
        }
        // moments of the entries, up to the overall N^{-m/2}
        let mut sig: Vec<(u32, u32)> = Vec::with_capacity(groups.len());
        let mut vanish = false;
        for ((_, lo, hi), p, q) in &groups {
            if lo == hi {
                let p = p + q;
                if p % 2 == 1 {
                    vanish = true;
                    break;
                }
                sig.push((p, u32::MAX));
            } else {
                if p != q {
                    vanish = true;
                    break;
                }
                sig.push((*p, 0));
            }
        }
        if !vanish {
            sig.sort_unstable();
            let v = memo
                .entry(sig.clone())
                .or_insert_with(|| sig.iter().map(|(p, kind)| if *kind == u32::MAX { double_factorial_odd(*p) } else { factorial(*p) }).fold(BigUint::one(), |a, b| a * b));
            total += &*v;
        }
        // next index tuple
        let mut p = 0;
        loop {
            if p == m {
                let denom = num_traits::pow(BigInt::from(n), m / 2 + 1);
                return Ok(BigRational::new(BigInt::from(total), denom));
            }
            idx[p] += 1;
            if idx[p] < n {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Result of [`map_count`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapCount {
    pub genus: u32,
    pub count: u64,
    pub raw: f64,
    pub est_error: f64,
    pub nodes: usize,
    pub chambers: u64,
}

/// Number of genus-`g` one-vertex maps of type `word`, from the integral
/// formula for the order-`g` coefficient.
pub fn map_count(word: &Word, g: u32, quad: &QuadConfig) -> Result<MapCount> {
    let colors = colors_of(word)?;
    if colors.len() > MAX_ORACLE_LETTERS {
        return Err(Error::guard("oracle word length", colors.len(), MAX_ORACLE_LETTERS));
    }
    let q = NcPolynomial::monomial(Coeff::from_int(1), word.clone());
    let rep = alpha_polynomial(&q, g as usize, &MatrixBinding::new(), quad)?;
    let count = rep.value.round();
    let tol = quad.tol.max(1e-6);
    if (rep.value - count).abs() > tol || count < 0.0 || rep.imag.abs() > tol {
        return Err(Error::invalid(format!("integral {} is not within {tol} of a nonnegative integer", rep.value)));
    }
    Ok(MapCount {
        genus: g,
        count: count.to_u64().unwrap_or(0),
        raw: rep.value,
        est_error: rep.est_error,
        nodes: rep.nodes,
        chambers: rep.chambers,
    })
}

/// Genus table from the integral formula for `g <= gmax`.
pub fn map_table(word: &Word, gmax: u32, quad: &QuadConfig) -> Result<GenusTable> {
    let mut t = GenusTable { word: word.to_string(), table: BTreeMap::new(), raw: BTreeMap::new(), quad: None };
    let mut err: f64 = 0.0;
    let mut chambers = 1;
    for g in 0..=gmax {
        let c = map_count(word, g, quad)?;
        if c.count > 0 {
            t.table.insert(g, c.count);
        }
        t.raw.insert(g, c.raw);
        err = err.max(c.est_error);
        chambers = chambers.max(c.chambers);
    }
    t.quad = Some(QuadSummary { nodes: quad.nodes, chambers, est_error: err });
    Ok(t)
}

/// Word `X_{c_1} ... X_{c_m}` from colors.
pub fn colored_word(colors: &[u32]) -> Word {
    Word(colors.iter().map(|c| Letter::x(*c)).collect())
}
