use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::scalar::{ParamName, ScalarExpr};
use crate::error::{Error, Result};
use crate::ncalg::{Letter, NcPolynomial, Word};

/// `e^{i scale y base}`; `base` is self-adjoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpAtom {
    pub scale: ScalarExpr,
    pub base: NcPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FAtom {
    Letter(Letter),
    Exp(ExpAtom),
}

impl fmt::Display for FAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FAtom::Letter(l) => write!(f, "{l}"),
            FAtom::Exp(e) => write!(f, "exp(i*[{}]*y*({}))", e.scale, e.base),
        }
    }
}

pub type FWord = Vec<FAtom>;

pub(crate) fn letters_to_fword(w: &Word) -> FWord {
    w.0.iter().map(|l| FAtom::Letter(*l)).collect()
}

fn fmt_fword(w: &FWord, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if w.is_empty() {
        return write!(f, "1");
    }
    for (k, a) in w.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// Normal form of an element of the extended algebra: a combination of words
/// in letters and exponential atoms with [`ScalarExpr`] weights. Products of
/// exponentials are never merged.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPoly {
    terms: BTreeMap<FWord, ScalarExpr>,
}

impl FPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new(), ScalarExpr::one())
    }

    pub fn word(w: FWord, c: ScalarExpr) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(vec![FAtom::Letter(l)], ScalarExpr::one())
    }

    /// `e^{i scale y base}`; fails unless `base` is self-adjoint for the
    /// involution with `r` pairs of `Y` letters.
    pub fn exp(scale: ScalarExpr, base: NcPolynomial, r: u32) -> Result<Self> {
        if !base.is_self_adjoint(r) {
            return Err(Error::invalid(format!("exponent base {base} is not self-adjoint")));
        }
        Ok(Self::word(vec![FAtom::Exp(ExpAtom { scale, base })], ScalarExpr::one()))
    }

    pub fn add_term(&mut self, w: FWord, c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FWord, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &FPoly) -> FPoly {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn mul(&self, o: &FPoly) -> FPoly {
        let mut p = FPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                p.add_term(w, c1 * c2);
            }
        }
        p
    }

    pub fn scale(&self, s: &ScalarExpr) -> FPoly {
        let mut p = FPoly::zero();
        for (w, c) in &self.terms {
            p.add_term(w.clone(), c * s);
        }
        p
    }

    /// Every parameter in coefficients and exponent scales.
    pub fn params(&self) -> BTreeSet<ParamName> {
        let mut out = BTreeSet::new();
        for (w, c) in &self.terms {
            out.extend(c.params());
            for a in w {
                if let FAtom::Exp(e) = a {
                    out.extend(e.scale.params());
                }
            }
        }
        out
    }

    /// Letters, including those inside exponent bases.
    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        for w in self.terms.keys() {
            for a in w {
                match a {
                    FAtom::Letter(l) => {
                        out.insert(*l);
                    }
                    FAtom::Exp(e) => out.extend(e.base.letters()),
                }
            }
        }
        out
    }

    /// The polynomial, when no exponential atom or symbolic weight occurs.
    pub fn to_polynomial(&self) -> Option<NcPolynomial> {
        let mut p = NcPolynomial::zero();
        for (w, c) in &self.terms {
            let c = c.as_constant()?;
            let mut letters = Vec::with_capacity(w.len());
            for a in w {
                match a {
                    FAtom::Letter(l) => letters.push(*l),
                    FAtom::Exp(_) => return None,
                }
            }
            p.add_term(Word(letters), c);
        }
        Some(p)
    }

    /// Renames every letter (inside exponentials too) through `f`, which may
    /// fail for unbound letters.
    pub fn try_map_letters(&self, f: &dyn Fn(Letter) -> Result<Letter>) -> Result<FPoly> {
        let mut p = FPoly::zero();
        for (w, c) in &self.terms {
            p.add_term(map_fword(w, f)?, c.clone());
        }
        Ok(p)
    }

    pub fn to_tree(&self) -> FExpression {
        FExpression::Sum {
            children: self
                .terms
                .iter()
                .map(|(w, c)| FExpression::ScalarMul {
                    scalar: c.clone(),
                    child: Box::new(FExpression::Product { children: w.iter().map(atom_tree).collect() }),
                })
                .collect(),
        }
    }
}

pub(crate) fn map_fword(w: &FWord, f: &dyn Fn(Letter) -> Result<Letter>) -> Result<FWord> {
    w.iter()
        .map(|a| {
            Ok(match a {
                FAtom::Letter(l) => FAtom::Letter(f(*l)?),
                FAtom::Exp(e) => {
                    let mut base = NcPolynomial::zero();
                    for (bw, bc) in e.base.terms() {
                        let ls: Result<Vec<Letter>> = bw.0.iter().map(|l| f(*l)).collect();
                        base.add_term(Word(ls?), bc.clone());
                    }
                    FAtom::Exp(ExpAtom { scale: e.scale.clone(), base })
                }
            })
        })
        .collect()
}

fn atom_tree(a: &FAtom) -> FExpression {
    match a {
        FAtom::Letter(l) => FExpression::Var { letter: *l },
        FAtom::Exp(e) => FExpression::Exp { scale: e.scale.clone(), base: e.base.clone() },
    }
}

impl From<&NcPolynomial> for FPoly {
    fn from(p: &NcPolynomial) -> Self {
        let mut f = FPoly::zero();
        for (w, c) in p.terms() {
            f.add_term(letters_to_fword(w), ScalarExpr::constant(c.clone()));
        }
        f
    }
}

impl fmt::Display for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]*")?;
            fmt_fword(w, f)?;
        }
        Ok(())
    }
}

/// Expression tree; [`FExpression::normalize`] flattens it to an [`FPoly`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FExpression {
    Var { letter: Letter },
    Exp { scale: ScalarExpr, base: NcPolynomial },
    Sum { children: Vec<FExpression> },
    Product { children: Vec<FExpression> },
    ScalarMul { scalar: ScalarExpr, child: Box<FExpression> },
}

impl FExpression {
    pub fn normalize(&self) -> FPoly {
        match self {
            FExpression::Var { letter } => FPoly::letter(*letter),
            FExpression::Exp { scale, base } => {
                FPoly::word(vec![FAtom::Exp(ExpAtom { scale: scale.clone(), base: base.clone() })], ScalarExpr::one())
            }
            FExpression::Sum { children } => children.iter().fold(FPoly::zero(), |acc, c| acc.add(&c.normalize())),
            FExpression::Product { children } => children.iter().fold(FPoly::one(), |acc, c| acc.mul(&c.normalize())),
            FExpression::ScalarMul { scalar, child } => child.normalize().scale(scalar),
        }
    }

    /// Checks that every exponent base is self-adjoint.
    pub fn validate(&self, r: u32) -> Result<()> {
        match self {
            FExpression::Var { .. } => Ok(()),
            FExpression::Exp { base, .. } => {
                if base.is_self_adjoint(r) {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("exponent base {base} is not self-adjoint")))
                }
            }
            FExpression::Sum { children } | FExpression::Product { children } => children.iter().try_for_each(|c| c.validate(r)),
            FExpression::ScalarMul { child, .. } => child.validate(r),
        }
    }
}

/// Sum of elementary tensors with a fixed number of legs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiTensor {
    legs: usize,
    terms: BTreeMap<Vec<FWord>, ScalarExpr>,
}

/// Two-leg tensors, the target of a single derivative.
pub type TensorFExpr = MultiTensor;

impl MultiTensor {
    pub fn zero(legs: usize) -> Self {
        MultiTensor { legs, terms: BTreeMap::new() }
    }

    pub fn from_fpoly(p: &FPoly) -> Self {
        let mut t = Self::zero(1);
        for (w, c) in p.terms() {
            t.add_term(vec![w.clone()], c.clone());
        }
        t
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn add_term(&mut self, legs: Vec<FWord>, c: ScalarExpr) {
        debug_assert_eq!(legs.len(), self.legs);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&legs) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&legs);
                }
            }
            None => {
                self.terms.insert(legs, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<FWord>, &ScalarExpr)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn params(&self) -> BTreeSet<ParamName> {
        let mut out = BTreeSet::new();
        for (legs, c) in &self.terms {
            out.extend(c.params());
            for w in legs {
                out.extend(FPoly::word(w.clone(), ScalarExpr::one()).params());
            }
        }
        out
    }

    /// The single leg as an [`FPoly`].
    pub fn to_fpoly(&self) -> Result<FPoly> {
        if self.legs != 1 {
            return Err(Error::MalformedChain(format!("expected one leg, found {}", self.legs)));
        }
        let mut p = FPoly::zero();
        for (legs, c) in &self.terms {
            p.add_term(legs[0].clone(), c.clone());
        }
        Ok(p)
    }

    /// True when no weight involves a parameter or `y`.
    pub fn scalar_free(&self) -> bool {
        self.terms.values().all(|c| c.as_constant().is_some())
    }
}

impl fmt::Display for MultiTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (legs, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]*")?;
            for (j, w) in legs.iter().enumerate() {
                if j > 0 {
                    write!(f, " (x) ")?;
                }
                fmt_fword(w, f)?;
            }
        }
        Ok(())
    }
}

impl Zero for FPoly {
    fn zero() -> Self {
        FPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl std::ops::Add for FPoly {
    type Output = FPoly;
    fn add(self, o: FPoly) -> FPoly {
        FPoly::add(&self, &o)
    }
}

