use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::letter::{Letter, Word};
use crate::coeff::{fmt_rat, Coeff};
use crate::error::{Error, Result};

/// Finite linear combination of words with exact complex rational
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcPolynomial {
    terms: BTreeMap<Word, Coeff>,
}

impl NcPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(c, Word::empty())
    }

    pub fn monomial(c: Coeff, w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        Self::monomial(Coeff::one(), Word(vec![l]))
    }

    pub fn x(i: u32) -> Self {
        Self::letter(Letter::x(i))
    }

    pub fn y(i: u32) -> Self {
        Self::letter(Letter::y(i))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Word, Coeff)>) -> Self {
        let mut p = Self::zero();
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).collect()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NcPolynomial { terms: self.terms.iter().map(|(w, a)| (w.clone(), a * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Anti-linear involution reversing words and starring letters.
    pub fn involution(&self, r: u32) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.star(r), c.conj())))
    }

    pub fn is_self_adjoint(&self, r: u32) -> bool {
        &self.involution(r) == self
    }

    /// `sum_M |c_M| A^{deg M}`.
    pub fn norm_a(&self, a: f64) -> f64 {
        self.terms.iter().map(|(w, c)| c.abs_f64() * a.powi(w.len() as i32)).sum()
    }

    /// Applies a letter map without checks; used for internal relabelling.
    pub fn map_letters(&self, f: impl Fn(Letter) -> Letter) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(w, c)| (Word(w.0.iter().map(|l| f(*l)).collect()), c.clone())),
        )
    }

    /// Renames letters through `map`; letters absent from the map are kept.
    /// Fails when two distinct letters of `self` end up with the same name.
    pub fn rename_letters(&self, map: &BTreeMap<Letter, Letter>) -> Result<Self> {
        let image = |l: Letter| map.get(&l).copied().unwrap_or(l);
        let mut seen: BTreeMap<Letter, Letter> = BTreeMap::new();
        for l in self.letters() {
            let t = image(l);
            if let Some(prev) = seen.insert(t, l) {
                return Err(Error::NonInjective(prev.to_string(), l.to_string(), t.to_string()));
            }
        }
        Ok(self.map_letters(image))
    }
}

impl Add for &NcPolynomial {
    type Output = NcPolynomial;
    fn add(self, o: &NcPolynomial) -> NcPolynomial {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }
}

impl Sub for &NcPolynomial {
    type Output = NcPolynomial;
    fn sub(self, o: &NcPolynomial) -> NcPolynomial {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), -c);
        }
        p
    }
}

impl Mul for &NcPolynomial {
    type Output = NcPolynomial;
    fn mul(self, o: &NcPolynomial) -> NcPolynomial {
        let mut p = NcPolynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                p.add_term(w1.concat(w2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for &NcPolynomial {
    type Output = NcPolynomial;
    fn neg(self) -> NcPolynomial {
        self.scale(&-Coeff::one())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for NcPolynomial {
            type Output = NcPolynomial;
            fn $m(self, o: NcPolynomial) -> NcPolynomial {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl fmt::Display for NcPolynomial {
    /// Output is accepted back by [`super::parse_polynomial`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_real() && c.re.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{w}")?;
            } else if mag.is_real() {
                fmt_rat(&mag.re, f)?;
                write!(f, "*{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Element of the algebraic tensor product, stored as a combination of pairs
/// of words `A (x) B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorPoly {
    terms: BTreeMap<(Word, Word), Coeff>,
}

impl TensorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn simple(a: &NcPolynomial, b: &NcPolynomial) -> Self {
        let mut t = Self::zero();
        for (wa, ca) in a.terms() {
            for (wb, cb) in b.terms() {
                t.add_term(wa.clone(), wb.clone(), ca * cb);
            }
        }
        t
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, &Coeff)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut t = Self::zero();
        for ((a, b), x) in &self.terms {
            t.add_term(a.clone(), b.clone(), x * c);
        }
        t
    }

    /// Flip `A (x) B -> B (x) A`.
    pub fn swap(&self) -> Self {
        let mut t = Self::zero();
        for ((a, b), c) in &self.terms {
            t.add_term(b.clone(), a.clone(), c.clone());
        }
        t
    }

    /// `(A (x) B)^* = A^* (x) B^*`.
    pub fn involution(&self, r: u32) -> Self {
        let mut t = Self::zero();
        for ((a, b), c) in &self.terms {
            t.add_term(a.star(r), b.star(r), c.conj());
        }
        t
    }
}

impl Add for &TensorPoly {
    type Output = TensorPoly;
    fn add(self, o: &TensorPoly) -> TensorPoly {
        let mut t = self.clone();
        for ((a, b), c) in &o.terms {
            t.add_term(a.clone(), b.clone(), c.clone());
        }
        t
    }
}

impl Mul for &TensorPoly {
    type Output = TensorPoly;
    /// `(A (x) B)(C (x) D) = AC (x) BD`.
    fn mul(self, o: &TensorPoly) -> TensorPoly {
        let mut t = TensorPoly::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &o.terms {
                t.add_term(a.concat(c), b.concat(d), x * y);
            }
        }
        t
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{a} (x) {b}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for NcPolynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for NcPolynomial {
    /// Accepts any letter index; alphabet checks belong to the caller.
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let s = String::deserialize(de)?;
        super::parse_polynomial(&s, super::Alphabet::new(u32::MAX, u32::MAX / 2)).map_err(D::Error::custom)
    }
}
