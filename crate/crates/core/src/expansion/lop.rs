use std::collections::BTreeSet;

use super::jfamily::{Cell, JFamily};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::ncalg::{cyclic_derivative_where, derivative_where, Letter, NcPolynomial, Word};
use crate::ncexp::{map_fword, param_cyclic_derivative, param_derivative, word_derivative, FAtom, FPoly, FWord, ParamName, ScalarExpr, Selector};

/// Letter `X_{i,I}` where `I` is list number `list` of the family.
/// Level-0 letters are the plain `X_i`.
pub fn j_letter(d: u32, list: usize, coord: u32) -> Letter {
    Letter::x(list as u32 * d + coord)
}

/// `(list, coord)` of an `X` letter.
pub fn split_letter(d: u32, l: Letter) -> (usize, u32) {
    let k = l.index - 1;
    ((k / d) as usize, k % d + 1)
}

fn check_levels(from: &JFamily, to: &JFamily, l: usize) -> Result<()> {
    if to.n != from.n + 1 {
        return Err(Error::invalid(format!("families at levels {} and {} are not consecutive", from.n, to.n)));
    }
    if l == 0 || l > 2 * from.n + 1 {
        return Err(Error::invalid(format!("position {l} outside [1, {}]", 2 * from.n + 1)));
    }
    Ok(())
}

fn check_letters<'a>(letters: impl IntoIterator<Item = &'a Letter>, d: u32, from: &JFamily) -> Result<()> {
    for l in letters {
        if l.is_x() && split_letter(d, *l).0 >= from.len() {
            return Err(Error::invalid(format!("{l} is not a letter of level {} with d = {d}", from.n)));
        }
    }
    Ok(())
}

struct Renamer<'a> {
    d: u32,
    to: &'a JFamily,
    l: u32,
}

impl Renamer<'_> {
    fn letter(&self, x: Letter, branch: u8, tilde: bool) -> Letter {
        if !x.is_x() {
            return x;
        }
        let (k, i) = split_letter(self.d, x);
        let img = self.to.child(Cell { j: self.l, branch, tilde }, k).expect("cell lookup");
        j_letter(self.d, img, i)
    }

    fn word(&self, w: &[Letter], branch: u8, tilde: bool) -> impl Iterator<Item = Letter> + '_ {
        w.iter().map(move |x| self.letter(*x, branch, tilde)).collect::<Vec<_>>().into_iter()
    }
}

/// `L_l` of level `from.n`, for a polynomial in the letters of `from`.
///
/// The result lives over the letters of `to`, the next level.
pub fn apply_l(q: &NcPolynomial, d: u32, from: &JFamily, to: &JFamily, l: usize) -> Result<NcPolynomial> {
    check_levels(from, to, l)?;
    check_letters(q.letters().iter(), d, from)?;
    let constrained = l <= 2 * from.n;
    let ren = Renamer { d, to, l: l as u32 };
    let half = Coeff::ratio(1, 2);
    let coord_of = |x: Letter| if x.is_x() { Some(split_letter(d, x).1) } else { None };
    let mut out = NcPolynomial::zero();
    for i in 1..=d {
        let pred = |x: Letter| coord_of(x) == Some(i);
        let t = derivative_where(&cyclic_derivative_where(q, pred), pred);
        for (a, b, c) in t.terms() {
            let c = c * &half;
            for (pa, xa) in a.0.iter().enumerate() {
                let Some(j) = coord_of(*xa) else { continue };
                let la = split_letter(d, *xa).0;
                for (pb, xb) in b.0.iter().enumerate() {
                    if coord_of(*xb) != Some(j) {
                        continue;
                    }
                    let lb = split_letter(d, *xb).0;
                    if constrained && from.lists[la][l - 1] != from.lists[lb][l - 1] {
                        continue;
                    }
                    let w: Vec<Letter> = ren
                        .word(&a.0[pa + 1..], 1, false)
                        .chain(ren.word(&a.0[..pa], 1, true))
                        .chain(ren.word(&b.0[pb + 1..], 2, true))
                        .chain(ren.word(&b.0[..pb], 2, false))
                        .collect();
                    out.add_term(Word(w), c.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Sum of `L_l` over every `l` in `[1, 2n+1]`: the integrand of one level
/// once the time chambers are merged.
pub fn apply_full_l(q: &NcPolynomial, d: u32, from: &JFamily, to: &JFamily) -> Result<NcPolynomial> {
    let mut out = NcPolynomial::zero();
    for l in 1..=2 * from.n + 1 {
        out = out + apply_l(q, d, from, to, l)?;
    }
    Ok(out)
}

fn fword_letters(w: &FWord) -> BTreeSet<Letter> {
    let mut s = BTreeSet::new();
    for a in w {
        match a {
            FAtom::Letter(l) => {
                s.insert(*l);
            }
            FAtom::Exp(e) => s.extend(e.base.letters()),
        }
    }
    s
}

/// Parameters of one level of `L`: `alpha` for the cyclic derivative,
/// `beta` for the second derivative, `delta` and `gamma` for the left and
/// right legs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LParams {
    pub alpha: ParamName,
    pub beta: ParamName,
    pub gamma: ParamName,
    pub delta: ParamName,
}

/// `L_l` on expressions with exponential atoms. On polynomials it agrees
/// with [`apply_l`].
pub fn apply_l_fpoly(q: &FPoly, d: u32, from: &JFamily, to: &JFamily, l: usize, p: LParams) -> Result<FPoly> {
    check_levels(from, to, l)?;
    let all = q.letters();
    check_letters(all.iter(), d, from)?;
    let constrained = l <= 2 * from.n;
    let ren = Renamer { d, to, l: l as u32 };
    let rename = |w: &FWord, branch: u8, tilde: bool| map_fword(w, &|x| Ok(ren.letter(x, branch, tilde)));
    let half = ScalarExpr::constant(Coeff::ratio(1, 2));
    let mut out = FPoly::zero();
    for i in 1..=d {
        let sel = Selector::AnyOf(all.iter().copied().filter(|x| x.is_x() && split_letter(d, *x).1 == i).collect());
        if let Selector::AnyOf(s) = &sel {
            if s.is_empty() {
                continue;
            }
        }
        let t = param_derivative(&param_cyclic_derivative(q, &sel, p.alpha), &sel, p.beta);
        for (legs, c) in t.terms() {
            let (a, b) = (&legs[0], &legs[1]);
            let c = c * &half;
            let lb: BTreeSet<Letter> = fword_letters(b);
            for xa in fword_letters(a).into_iter().filter(|x| x.is_x()) {
                let (ka, j) = split_letter(d, xa);
                let splits_a = word_derivative(a, &|x| x == xa, p.delta);
                for xb in lb.iter().copied().filter(|x| x.is_x()) {
                    let (kb, jb) = split_letter(d, xb);
                    if jb != j || (constrained && from.lists[ka][l - 1] != from.lists[kb][l - 1]) {
                        continue;
                    }
                    let splits_b = word_derivative(b, &|x| x == xb, p.gamma);
                    for (a1, a2, ca) in &splits_a {
                        for (b1, b2, cb) in &splits_b {
                            let mut w = rename(a2, 1, false)?;
                            w.extend(rename(a1, 1, true)?);
                            w.extend(rename(b2, 2, true)?);
                            w.extend(rename(b1, 2, false)?);
                            out.add_term(w, &(&c * ca) * cb);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
