use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::letter::Letter;
use super::poly::NcPolynomial;
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Number of `X` letters (`d`) and of `Y` pairs (`r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub d: u32,
    pub r: u32,
}

impl Alphabet {
    pub fn new(d: u32, r: u32) -> Self {
        Alphabet { d, r }
    }

    pub fn contains(&self, l: Letter) -> bool {
        match l.kind {
            super::LetterKind::X => (1..=self.d).contains(&l.index),
            super::LetterKind::Y => (1..=2 * self.r).contains(&l.index),
        }
    }

    pub fn check(&self, l: Letter) -> Result<()> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(Error::LetterOutOfAlphabet { letter: l.to_string(), d: self.d, r: self.r })
        }
    }
}

/// Parses the text form
///
/// ```text
/// poly   := ['-'] term (('+'|'-') term)*
/// term   := factor ('*' factor)*
/// factor := base ['^' posint]
/// base   := 'X'n | 'Y'n | 'Y'n'adj' | '(' poly ')' | 'i' | number
/// number := digits ['.' digits | '/' digits]
/// ```
///
/// `Yn adj` is the adjoint letter. Every letter is checked against `alpha`.
pub fn parse_polynomial(text: &str, alpha: Alphabet) -> Result<NcPolynomial> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, alpha };
    let poly = p.poly()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    alpha: Alphabet,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<NcPolynomial> {
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        let mut acc = NcPolynomial::zero();
        loop {
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<NcPolynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NcPolynomial> {
        let b = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let at = self.pos;
            let k = self.digits().ok_or_else(|| self.err("expected exponent"))?;
            let k: u32 = k.parse().map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
            if k == 0 {
                return Err(Error::Parse { pos: at, msg: "exponent must be positive".into() });
            }
            return Ok(b.pow(k));
        }
        Ok(b)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn index(&mut self) -> Result<u32> {
        let d = self.digits().ok_or_else(|| self.err("expected letter index"))?;
        d.parse().map_err(|_| self.err("letter index too large"))
    }

    fn base(&mut self) -> Result<NcPolynomial> {
        let start = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        match start {
            b'(' => {
                self.pos += 1;
                let p = self.poly()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(p)
            }
            b'X' => {
                let at = self.pos;
                self.pos += 1;
                let l = Letter::x(self.index()?);
                self.alpha.check(l).map_err(|e| self.at(e, at))?;
                Ok(NcPolynomial::letter(l))
            }
            b'Y' => {
                let at = self.pos;
                self.pos += 1;
                let mut l = Letter::y(self.index()?);
                self.alpha.check(l).map_err(|e| self.at(e, at))?;
                if self.s[self.pos..].starts_with(b"adj") {
                    self.pos += 3;
                    l = l.star(self.alpha.r);
                }
                Ok(NcPolynomial::letter(l))
            }
            b'i' => {
                self.pos += 1;
                Ok(NcPolynomial::constant(Coeff::i()))
            }
            c if c.is_ascii_digit() => Ok(NcPolynomial::constant(Coeff::real(self.number()?))),
            _ => Err(self.err("expected a letter, number, 'i' or '('")),
        }
    }

    fn at(&self, e: Error, pos: usize) -> Error {
        Error::Parse { pos, msg: e.to_string() }
    }

    fn number(&mut self) -> Result<BigRational> {
        let int = self.digits().ok_or_else(|| self.err("expected number"))?;
        let big = |s: &str| s.parse::<BigInt>().expect("digits");
        match self.s.get(self.pos) {
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits().ok_or_else(|| self.err("expected digits after '.'"))?;
                let den = BigInt::from(10u32).pow(frac.len() as u32);
                Ok(BigRational::new(big(&int) * &den + big(&frac), den))
            }
            Some(b'/') => {
                self.pos += 1;
                let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
                let den = big(&den);
                if den == BigInt::from(0) {
                    return Err(self.err("zero denominator"));
                }
                Ok(BigRational::new(big(&int), den))
            }
            _ => Ok(BigRational::new(big(&int), BigInt::one())),
        }
    }
}
