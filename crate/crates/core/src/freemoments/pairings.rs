use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest number of points for which pairings are enumerated explicitly.
pub const MAX_PAIRING_POINTS: usize = 24;

/// A perfect matching of `0..m`, stored as sorted pairs `(a, b)` with `a < b`.
pub type Pairing = Vec<(usize, usize)>;

/// Catalan number `C_k`.
pub fn catalan(k: u32) -> BigUint {
    // C_{j+1} = C_j * 2(2j+1) / (j+2)
    let mut c = BigUint::one();
    for j in 0..k {
        c = c * BigUint::from(2 * (2 * j + 1)) / BigUint::from(j + 2);
    }
    c
}

/// Moment `int x^k dsigma(x)` of the standard semicircle law.
pub fn semicircle_moment(k: u32) -> BigUint {
    if k % 2 == 1 {
        BigUint::zero()
    } else {
        catalan(k / 2)
    }
}

/// All non-crossing pairings of `0..m`, `m` even.
pub fn enumerate_nc_pairings(m: usize) -> Result<Vec<Pairing>> {
    if m % 2 == 1 {
        return Err(Error::invalid(format!("{m} points cannot be paired")));
    }
    if m > MAX_PAIRING_POINTS {
        return Err(Error::guard("number of points", m, MAX_PAIRING_POINTS));
    }
    Ok(nc_pairings_filtered(&(0..m).collect::<Vec<_>>(), &|_, _| true))
}

/// Non-crossing pairings of the given points (in cyclic order) whose pairs
/// all satisfy `keep`.
pub(crate) fn nc_pairings_filtered(points: &[usize], keep: &dyn Fn(usize, usize) -> bool) -> Vec<Pairing> {
    if points.len() % 2 == 1 {
        return Vec::new();
    }
    let mut out = nc_list(points, keep);
    for p in &mut out {
        p.sort_unstable();
    }
    out
}

// Pair the first point with one at odd offset; inside and outside are then
// independent.
fn nc_list(pts: &[usize], keep: &dyn Fn(usize, usize) -> bool) -> Vec<Pairing> {
    if pts.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in (1..pts.len()).step_by(2) {
        if !keep(pts[0], pts[j]) {
            continue;
        }
        let inner = nc_list(&pts[1..j], keep);
        if inner.is_empty() {
            continue;
        }
        let outer = nc_list(&pts[j + 1..], keep);
        for a in &inner {
            for b in &outer {
                let mut p = Vec::with_capacity(pts.len() / 2);
                p.push((pts[0], pts[j]));
                p.extend_from_slice(a);
                p.extend_from_slice(b);
                out.push(p);
            }
        }
    }
    out
}

/// Every pairing of `0..m` (crossing or not) whose pairs satisfy `keep`,
/// visited without materialising the list.
pub fn for_each_pairing(m: usize, keep: &dyn Fn(usize, usize) -> bool, visit: &mut dyn FnMut(&[usize])) {
    if m % 2 == 1 {
        return;
    }
    let mut partner = vec![usize::MAX; m];
    all_rec(&mut partner, keep, visit);
}

fn all_rec(partner: &mut [usize], keep: &dyn Fn(usize, usize) -> bool, visit: &mut dyn FnMut(&[usize])) {
    let Some(a) = partner.iter().position(|&p| p == usize::MAX) else {
        visit(partner);
        return;
    };
    for b in a + 1..partner.len() {
        if partner[b] == usize::MAX && keep(a, b) {
            partner[a] = b;
            partner[b] = a;
            all_rec(partner, keep, visit);
            partner[a] = usize::MAX;
            partner[b] = usize::MAX;
        }
    }
}
