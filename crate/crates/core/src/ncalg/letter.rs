use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// `X` letters are the self-adjoint (semicircular or GUE) variables, `Y`
/// letters the deterministic ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterKind {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub kind: LetterKind,
    pub index: u32,
}

impl Letter {
    pub const fn x(index: u32) -> Self {
        Letter { kind: LetterKind::X, index }
    }

    pub const fn y(index: u32) -> Self {
        Letter { kind: LetterKind::Y, index }
    }

    pub fn is_x(&self) -> bool {
        self.kind == LetterKind::X
    }

    /// Letter obtained by the involution: `X_i* = X_i`, `Y_i* = Y_{i+r}` and
    /// `Y_{i+r}* = Y_i`.
    pub fn star(&self, r: u32) -> Letter {
        match self.kind {
            LetterKind::X => *self,
            LetterKind::Y if self.index <= r => Letter::y(self.index + r),
            LetterKind::Y => Letter::y(self.index - r),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LetterKind::X => write!(f, "X{}", self.index),
            LetterKind::Y => write!(f, "Y{}", self.index),
        }
    }
}

/// A monomial. Ordered by length first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn star(&self, r: u32) -> Word {
        Word(self.0.iter().rev().map(|l| l.star(r)).collect())
    }

    /// Canonical representative of the cyclic class, used to compare traces.
    pub fn min_rotation(&self) -> Word {
        let n = self.len();
        (0..n.max(1))
            .map(|k| {
                let mut v = self.0[k.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..k.min(n)]);
                Word(v)
            })
            .min()
            .unwrap_or_default()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Runs of equal letters are written as powers; the empty word is `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut k = 0;
        while k < self.0.len() {
            let l = self.0[k];
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == l {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}^{run}")?;
            }
            k += run;
        }
        Ok(())
    }
}
