//! Exact complex rational scalars.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `re + i im` with arbitrary precision rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Coeff { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Coeff::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Coeff { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Modulus as a float; exact rationals have no exact square root.
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Coeff { re: &self.re * r, im: &self.im * r }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => {
            // Fall back to a ratio of floats for huge numerators/denominators.
            r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
        }
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::from_int(1)
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Self {
        Coeff::real(r)
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.im.is_zero() && o.im.is_zero() {
            return Coeff::real(&self.re * &o.re);
        }
        Coeff {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, o: Coeff) -> Coeff {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Coeff> for Coeff {
            type Output = Coeff;
            fn $m(self, o: &Coeff) -> Coeff {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re, im: -self.im }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, o: &Coeff) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign for Coeff {
    fn add_assign(&mut self, o: Coeff) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl SubAssign<&Coeff> for Coeff {
    fn sub_assign(&mut self, o: &Coeff) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Coeff> for Coeff {
    fn mul_assign(&mut self, o: &Coeff) {
        *self = &*self * o;
    }
}

impl Sum for Coeff {
    fn sum<I: Iterator<Item = Coeff>>(iter: I) -> Coeff {
        iter.fold(Coeff::zero(), |a, b| a + b)
    }
}

/// Writes a rational as `p` or `p/q`.
pub(crate) fn fmt_rat(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    /// Prints in the polynomial grammar: `3/2`, `-2*i`, `(1 + 2*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rat(&self.re, f),
            (true, false) => {
                if self.im.is_negative() {
                    write!(f, "-")?;
                }
                let a = self.im.abs();
                if !a.is_one() {
                    fmt_rat(&a, f)?;
                    write!(f, "*")?;
                }
                write!(f, "i")
            }
            (false, false) => {
                write!(f, "(")?;
                fmt_rat(&self.re, f)?;
                write!(f, " {} ", if self.im.is_negative() { '-' } else { '+' })?;
                let a = self.im.abs();
                if !a.is_one() {
                    fmt_rat(&a, f)?;
                    write!(f, "*")?;
                }
                write!(f, "i)")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_product() {
        let a = Coeff::new(BigRational::from_integer(1.into()), BigRational::from_integer(2.into()));
        let b = a.conj();
        assert_eq!(&a * &b, Coeff::from_int(5));
        assert_eq!(&Coeff::i() * &Coeff::i(), Coeff::from_int(-1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coeff::ratio(3, 2).to_string(), "3/2");
        assert_eq!((Coeff::i() * Coeff::from_int(-2)).to_string(), "-2*i");
        assert_eq!((Coeff::from_int(1) + Coeff::i()).to_string(), "(1 + i)");
    }
}
