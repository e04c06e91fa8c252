use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use super::expr::FPoly;
use super::scalar::{ParamName, ScalarExpr};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::ncalg::{parse_polynomial, Alphabet};

/// Parses the polynomial grammar extended by exponential factors
/// `exp(i*<scalar>*<poly>)`, where `<scalar>` is a `*`-separated product of
/// numbers and parameters `p<k>` (possibly empty) and `<poly>` runs to the
/// matching parenthesis. The exponent base must be self-adjoint.
pub fn parse_fexpression(text: &str, alpha: Alphabet) -> Result<FPoly> {
    let mut p = FParser { s: text.as_bytes(), text, pos: 0, alpha };
    let e = p.sum()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct FParser<'a> {
    s: &'a [u8],
    text: &'a str,
    pos: usize,
    alpha: Alphabet,
}

impl FParser<'_> {
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

    fn sum(&mut self) -> Result<FPoly> {
        let minus = ScalarExpr::constant(Coeff::from_int(-1));
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        let mut acc = FPoly::zero();
        loop {
            let t = self.product()?;
            acc = acc.add(&if neg { t.scale(&minus) } else { t });
            match self.peek() {
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<FPoly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<FPoly> {
        let b = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = self.text[start..self.pos].parse().map_err(|_| self.err("expected positive exponent"))?;
            if k == 0 {
                return Err(self.err("exponent must be positive"));
            }
            return Ok((1..k).fold(b.clone(), |acc, _| acc.mul(&b)));
        }
        Ok(b)
    }

    fn base(&mut self) -> Result<FPoly> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) if self.s[self.pos..].starts_with(b"exp(") => self.exp(),
            Some(_) => {
                // a single letter, number or `i`: hand it to the polynomial parser
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || matches!(self.s[self.pos], b'.' | b'/')) {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected a letter, number, 'i', 'exp(' or '('"));
                }
                let p = parse_polynomial(&self.text[start..self.pos], self.alpha).map_err(|e| shift(e, start))?;
                Ok(FPoly::from(&p))
            }
        }
    }

    fn exp(&mut self) -> Result<FPoly> {
        self.pos += 4;
        let open = self.pos;
        let mut depth = 1;
        let mut close = open;
        while close < self.s.len() {
            match self.s[close] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            close += 1;
        }
        if depth != 0 {
            return Err(self.err("unclosed exp("));
        }
        if self.peek() != Some(b'i') || self.s.get(self.pos + 1) != Some(&b'*') {
            return Err(self.err("exponent must start with 'i*'"));
        }
        self.pos += 2;
        let mut scale = ScalarExpr::one();
        loop {
            self.ws();
            let start = self.pos;
            let is_param = self.s.get(self.pos) == Some(&b'p') && self.s.get(self.pos + 1).is_some_and(u8::is_ascii_digit);
            let is_num = self.s.get(self.pos).is_some_and(u8::is_ascii_digit);
            if !(is_param || is_num) {
                break;
            }
            let mut end = self.pos + usize::from(is_param);
            while end < close && (self.s[end].is_ascii_digit() || (is_num && matches!(self.s[end], b'.' | b'/'))) {
                end += 1;
            }
            let mut after = end;
            while after < close && self.s[after].is_ascii_whitespace() {
                after += 1;
            }
            if self.s.get(after) != Some(&b'*') {
                // the token starts the polynomial itself
                break;
            }
            let tok = &self.text[start..end];
            let factor = if is_param {
                ScalarExpr::param(ParamName(tok[1..].parse().map_err(|_| self.err("bad parameter"))?))
            } else {
                ScalarExpr::constant(Coeff::real(parse_rational(tok).ok_or_else(|| self.err("bad number"))?))
            };
            scale = &scale * &factor;
            self.pos = after + 1;
        }
        let inner_start = self.pos;
        let base = parse_polynomial(&self.text[inner_start..close], self.alpha).map_err(|e| shift(e, inner_start))?;
        self.pos = close + 1;
        FPoly::exp(scale, base, self.alpha.r).map_err(|e| Error::Parse { pos: inner_start, msg: e.to_string() })
    }
}

fn parse_rational(tok: &str) -> Option<BigRational> {
    if let Some((a, b)) = tok.split_once('/') {
        let b: BigInt = b.parse().ok()?;
        if b == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(a.parse().ok()?, b));
    }
    if let Some((a, b)) = tok.split_once('.') {
        let den = BigInt::from(10u32).pow(b.len() as u32);
        let num: BigInt = format!("{a}{b}").parse().ok()?;
        return Some(BigRational::new(num, den));
    }
    Some(BigRational::from_integer(tok.parse().ok()?))
}

fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + by, msg },
        other => other,
    }
}
