use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;

/// Integration parameter, drawn from a [`ParamSupply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamName(pub u32);

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// Hands out parameters that were never used before in one computation.
#[derive(Clone, Debug, Default)]
pub struct ParamSupply {
    next: u32,
}

impl ParamSupply {
    pub fn new() -> Self {
        Self::default()
    }

    /// Supply whose names avoid every parameter in `used`.
    pub fn avoiding(used: &BTreeSet<ParamName>) -> Self {
        ParamSupply { next: used.iter().map(|p| p.0 + 1).max().unwrap_or(0) }
    }

    pub fn fresh(&mut self) -> ParamName {
        self.next += 1;
        ParamName(self.next - 1)
    }
}

/// Variables of scalar coefficients: integration parameters and the Fourier
/// symbol `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Param(ParamName),
    Fourier,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Param(p) => write!(f, "{p}"),
            Symbol::Fourier => write!(f, "y"),
        }
    }
}

type Mono = Vec<(Symbol, u32)>;

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut m: BTreeMap<Symbol, u32> = a.iter().copied().collect();
    for (s, e) in b {
        *m.entry(*s).or_insert(0) += e;
    }
    m.into_iter().collect()
}

/// Commutative polynomial in parameters and `y` with exact complex rational
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarExpr {
    terms: BTreeMap<Mono, Coeff>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut s = Self::zero();
        s.add_term(Vec::new(), c);
        s
    }

    pub fn symbol(sym: Symbol) -> Self {
        let mut s = Self::zero();
        s.add_term(vec![(sym, 1)], Coeff::one());
        s
    }

    pub fn param(p: ParamName) -> Self {
        Self::symbol(Symbol::Param(p))
    }

    /// `1 - p`.
    pub fn one_minus(p: ParamName) -> Self {
        &Self::one() - &Self::param(p)
    }

    pub fn fourier() -> Self {
        Self::symbol(Symbol::Fourier)
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[(Symbol, u32)], &Coeff)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if no symbol occurs.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let mut s = Self::zero();
        for (m, a) in &self.terms {
            s.add_term(m.clone(), a * c);
        }
        s
    }

    pub fn params(&self) -> BTreeSet<ParamName> {
        self.terms
            .keys()
            .flat_map(|m| m.iter())
            .filter_map(|(s, _)| match s {
                Symbol::Param(p) => Some(*p),
                Symbol::Fourier => None,
            })
            .collect()
    }

    pub fn eval(&self, params: &dyn Fn(ParamName) -> f64, y: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = 1.0;
            for (s, e) in m {
                let base = match s {
                    Symbol::Param(p) => params(*p),
                    Symbol::Fourier => y,
                };
                v *= base.powi(*e as i32);
            }
            total += c.to_c64() * v;
        }
        total
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, o: &ScalarExpr) -> ScalarExpr {
        let mut s = self.clone();
        for (m, c) in &o.terms {
            s.add_term(m.clone(), c.clone());
        }
        s
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, o: &ScalarExpr) -> ScalarExpr {
        let mut s = self.clone();
        for (m, c) in &o.terms {
            s.add_term(m.clone(), -c);
        }
        s
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, o: &ScalarExpr) -> ScalarExpr {
        let mut s = ScalarExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                s.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        s
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scale(&-Coeff::one())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (s, e) in m {
                if *e == 1 {
                    write!(f, "*{s}")?;
                } else {
                    write!(f, "*{s}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// JSON shape: a list of `{coeff: [re, im], powers: {"p0": 1, "y": 2}}`,
/// rationals written as strings.
#[derive(Serialize, Deserialize)]
struct ScalarTermJson {
    coeff: [String; 2],
    powers: BTreeMap<String, u32>,
}

impl Serialize for ScalarExpr {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let v: Vec<ScalarTermJson> = self
            .terms
            .iter()
            .map(|(m, c)| ScalarTermJson {
                coeff: [c.re.to_string(), c.im.to_string()],
                powers: m.iter().map(|(s, e)| (s.to_string(), *e)).collect(),
            })
            .collect();
        v.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ScalarExpr {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let v: Vec<ScalarTermJson> = Vec::deserialize(de)?;
        let mut s = ScalarExpr::zero();
        for t in v {
            let re = t.coeff[0].parse().map_err(|_| D::Error::custom("bad rational"))?;
            let im = t.coeff[1].parse().map_err(|_| D::Error::custom("bad rational"))?;
            let mut m = Vec::new();
            for (k, e) in t.powers {
                let sym = if k == "y" {
                    Symbol::Fourier
                } else {
                    let id = k.strip_prefix('p').and_then(|x| x.parse().ok()).ok_or_else(|| D::Error::custom(format!("bad symbol {k}")))?;
                    Symbol::Param(ParamName(id))
                };
                m.push((sym, e));
            }
            m.sort();
            s.add_term(m, Coeff::new(re, im));
        }
        Ok(s)
    }
}
