use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::expr::{letters_to_fword, map_fword, ExpAtom, FAtom, FPoly, FWord, MultiTensor, TensorFExpr};
use super::scalar::{ParamName, ParamSupply, ScalarExpr};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::ncalg::{derivative_where, Letter};

/// Letters a derivative acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    Letter(Letter),
    AnyOf(BTreeSet<Letter>),
}

impl Selector {
    pub fn x(i: u32) -> Self {
        Selector::Letter(Letter::x(i))
    }

    pub fn matches(&self, l: Letter) -> bool {
        match self {
            Selector::Letter(x) => *x == l,
            Selector::AnyOf(s) => s.contains(&l),
        }
    }
}

/// Splittings of one word. An exponential atom `e^{i s y P}` contributes
/// `i s y c (… e^{i p s y P} A) (x) (B e^{i (1-p) s y P} …)` for every term
/// `c A (x) B` of the derivative of `P`.
pub(crate) fn word_derivative(w: &FWord, pred: &dyn Fn(Letter) -> bool, p: ParamName) -> Vec<(FWord, FWord, ScalarExpr)> {
    let mut out = Vec::new();
    for (k, atom) in w.iter().enumerate() {
        match atom {
            FAtom::Letter(l) => {
                if pred(*l) {
                    out.push((w[..k].to_vec(), w[k + 1..].to_vec(), ScalarExpr::one()));
                }
            }
            FAtom::Exp(e) => {
                let d = derivative_where(&e.base, pred);
                if d.is_zero() {
                    continue;
                }
                let left_exp = FAtom::Exp(ExpAtom { scale: &e.scale * &ScalarExpr::param(p), base: e.base.clone() });
                let right_exp = FAtom::Exp(ExpAtom { scale: &e.scale * &ScalarExpr::one_minus(p), base: e.base.clone() });
                let front = &(&e.scale * &ScalarExpr::fourier()) * &ScalarExpr::constant(Coeff::i());
                for (a, b, c) in d.terms() {
                    let mut left = w[..k].to_vec();
                    left.push(left_exp.clone());
                    left.extend(letters_to_fword(a));
                    let mut right = letters_to_fword(b);
                    right.push(right_exp.clone());
                    right.extend_from_slice(&w[k + 1..]);
                    out.push((left, right, front.scale(c)));
                }
            }
        }
    }
    out
}

/// `d_{p,i}` of `e`, with `i` given by a selector.
pub fn param_derivative(e: &FPoly, sel: &Selector, p: ParamName) -> TensorFExpr {
    let mut t = MultiTensor::zero(2);
    for (w, c) in e.terms() {
        for (l, r, k) in word_derivative(w, &|x| sel.matches(x), p) {
            t.add_term(vec![l, r], c * &k);
        }
    }
    t
}

/// `D_{p,i} e = m o d_{p,i} e` with `m(A (x) B) = BA`.
pub fn param_cyclic_derivative(e: &FPoly, sel: &Selector, p: ParamName) -> FPoly {
    let mut out = FPoly::zero();
    for (w, c) in e.terms() {
        for (mut l, r, k) in word_derivative(w, &|x| sel.matches(x), p) {
            let mut v = r;
            v.append(&mut l);
            out.add_term(v, c * &k);
        }
    }
    out
}

/// Renaming of letters applied to one leg before contraction.
pub type LetterMap = BTreeMap<Letter, Letter>;

/// One step of a composed derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ChainStep {
    /// Replace leg `leg` by its cyclic derivative.
    Cyclic { sel: Selector, leg: usize },
    /// Split leg `leg` into two consecutive legs.
    Partial { sel: Selector, leg: usize },
    /// Rename leg `k` through `bindings[k]`, then multiply the legs in the
    /// order listed by `order`.
    Contract { order: Vec<usize>, bindings: Vec<LetterMap> },
}

/// Value of a chain together with the parameters it introduced, in order.
#[derive(Clone, Debug)]
pub struct ChainResult {
    pub value: MultiTensor,
    pub params: Vec<ParamName>,
}

/// Applies `steps` left to right; every derivative step draws a fresh
/// parameter from `supply`.
pub fn compose_chain(e: &FPoly, steps: &[ChainStep], supply: &mut ParamSupply) -> Result<ChainResult> {
    let mut cur = MultiTensor::from_fpoly(e);
    let mut params = Vec::new();
    for (n, step) in steps.iter().enumerate() {
        cur = match step {
            ChainStep::Cyclic { sel, leg } | ChainStep::Partial { sel, leg } => {
                if *leg >= cur.legs() {
                    return Err(Error::MalformedChain(format!("step {n} selects leg {leg} of a {}-leg tensor", cur.legs())));
                }
                let p = supply.fresh();
                params.push(p);
                let split = matches!(step, ChainStep::Partial { .. });
                derive_leg(&cur, *leg, sel, p, split)
            }
            ChainStep::Contract { order, bindings } => contract(&cur, order, bindings).map_err(|e| match e {
                Error::MalformedChain(m) => Error::MalformedChain(format!("step {n}: {m}")),
                other => other,
            })?,
        };
    }
    Ok(ChainResult { value: cur, params })
}

fn derive_leg(t: &MultiTensor, leg: usize, sel: &Selector, p: ParamName, split: bool) -> MultiTensor {
    let mut out = MultiTensor::zero(if split { t.legs() + 1 } else { t.legs() });
    for (legs, c) in t.terms() {
        for (l, r, k) in word_derivative(&legs[leg], &|x| sel.matches(x), p) {
            let mut new_legs = Vec::with_capacity(out.legs());
            new_legs.extend_from_slice(&legs[..leg]);
            if split {
                new_legs.push(l);
                new_legs.push(r);
            } else {
                let mut v = r;
                v.extend(l);
                new_legs.push(v);
            }
            new_legs.extend_from_slice(&legs[leg + 1..]);
            out.add_term(new_legs, c * &k);
        }
    }
    out
}

/// Contraction of a multi-leg tensor: leg `k` is renamed by `bindings[k]`
/// (which must cover all of its letters) and the legs are multiplied in the
/// order given by `order`.
pub fn boxtimes_contract(t: &MultiTensor, order: &[usize], bindings: &[LetterMap]) -> Result<FPoly> {
    contract(t, order, bindings)?.to_fpoly()
}

fn contract(t: &MultiTensor, order: &[usize], bindings: &[LetterMap]) -> Result<MultiTensor> {
    let legs = t.legs();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..legs).collect::<Vec<_>>() {
        return Err(Error::MalformedChain(format!("order {order:?} is not a permutation of the {legs} legs")));
    }
    if bindings.len() != legs {
        return Err(Error::MalformedChain(format!("{} bindings for {legs} legs", bindings.len())));
    }
    let mut out = MultiTensor::zero(1);
    for (ws, c) in t.terms() {
        let mut word: FWord = Vec::new();
        for &k in order {
            let b = &bindings[k];
            let f = |l: Letter| b.get(&l).copied().ok_or_else(|| Error::UnboundLetter(l.to_string()));
            word.extend(map_fword(&ws[k], &f)?);
        }
        out.add_term(vec![word], c.clone());
    }
    Ok(out)
}
