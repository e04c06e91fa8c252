use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest level built without an explicit opt-in.
pub const DEFAULT_MAX_LEVEL: usize = 2;
/// Hard ceiling, reachable only with `allow_level_three`.
pub const HARD_MAX_LEVEL: usize = 3;

/// One element of `J_n`: an integer list of length `2n`.
pub type IndexList = Vec<u32>;

/// Which generation cell of `J_{n+1}` a list came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    /// `j` in `[1, 2n+1]`.
    pub j: u32,
    /// 1 or 2.
    pub branch: u8,
    pub tilde: bool,
}

/// `c_n` with `c_0 = 0`, `c_{n+1} = 6 c_n + 6`.
pub fn c_level(n: usize) -> u32 {
    (0..n).fold(0, |c, _| 6 * c + 6)
}

/// The full family `J_n`, in construction order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JFamily {
    pub n: usize,
    pub lists: Vec<IndexList>,
    /// Origin of each list: the cell and the index of its parent in `J_{n-1}`.
    /// Empty at level 0.
    pub origin: Vec<(Cell, usize)>,
    #[serde(skip)]
    by_origin: HashMap<(Cell, usize), usize>,
}

impl JFamily {
    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn c(&self) -> u32 {
        c_level(self.n)
    }

    /// Index in this family of the image of list `parent` of the previous
    /// level under the given cell.
    pub fn child(&self, cell: Cell, parent: usize) -> Option<usize> {
        self.by_origin.get(&(cell, parent)).copied()
    }

    /// Lists belonging to one cell, in order.
    pub fn cell(&self, cell: Cell) -> Vec<&IndexList> {
        self.origin.iter().zip(&self.lists).filter(|((c, _), _)| *c == cell).map(|(_, l)| l).collect()
    }

    /// `J_{n+1}` from `J_n`.
    fn next(&self) -> JFamily {
        let n = self.n;
        let c = self.c();
        let mut lists = Vec::with_capacity(4 * (2 * n + 1) * self.len());
        let mut origin = Vec::with_capacity(lists.capacity());
        for j in 1..=(2 * n + 1) as u32 {
            for (branch, tilde) in [(1u8, false), (2, false), (1, true), (2, true)] {
                let shift = if branch == 1 { c } else { 2 * c };
                let top = if branch == 1 { 3 * c + 2 } else { 3 * c + 3 };
                let t = if tilde { 3 * c + 3 } else { 0 };
                for (k, base) in self.lists.iter().enumerate() {
                    let mut l: Vec<u32> = Vec::with_capacity(2 * n + 2);
                    if (j as usize) <= 2 * n {
                        let j = j as usize;
                        l.extend(base[..j].iter().map(|v| v + shift));
                        l.extend(base[j - 1..].iter().copied());
                    } else {
                        l.extend(base.iter().map(|v| v + shift));
                        l.push(top);
                    }
                    l.push(3 * c + 1);
                    lists.push(l.into_iter().map(|v| v + t).collect());
                    origin.push((Cell { j, branch, tilde }, k));
                }
            }
        }
        let by_origin = origin.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        JFamily { n: n + 1, lists, origin, by_origin }
    }
}

/// Builds `J_n`. Level 3 (960 lists) needs `allow_level_three`.
pub fn build_j(n: usize, allow_level_three: bool) -> Result<JFamily> {
    let limit = if allow_level_three { HARD_MAX_LEVEL } else { DEFAULT_MAX_LEVEL };
    if n > limit {
        return Err(Error::guard("J level", n, limit));
    }
    let mut fam = JFamily { n: 0, lists: vec![vec![]], origin: vec![], by_origin: HashMap::new() };
    for _ in 0..n {
        fam = fam.next();
    }
    Ok(fam)
}

/// Depth of `s` in `J_n`: its common 1-based position in every list that
/// contains it.
pub fn depth(s: u32, n: usize) -> Result<usize> {
    let fam = build_j(n, true)?;
    depth_in(&fam, s)
}

/// As [`depth`], on an already built family.
pub fn depth_in(fam: &JFamily, s: u32) -> Result<usize> {
    let c = fam.c();
    if s == 0 || s > c {
        return Err(Error::invalid(format!("{s} is outside [1, {c}]")));
    }
    let mut found = None;
    for l in &fam.lists {
        for (pos, v) in l.iter().enumerate() {
            if *v == s {
                match found {
                    None => found = Some(pos + 1),
                    Some(p) if p != pos + 1 => {
                        return Err(Error::invalid(format!("{s} occurs at positions {p} and {}", pos + 1)));
                    }
                    _ => {}
                }
            }
        }
    }
    found.ok_or_else(|| Error::invalid(format!("{s} occurs in no list of J_{}", fam.n)))
}

/// Depth table for every `s` in `[1, c_n]` (index 0 unused).
pub fn depth_table(fam: &JFamily) -> Result<Vec<usize>> {
    let c = fam.c() as usize;
    let mut t = vec![0usize; c + 1];
    for l in &fam.lists {
        for (pos, v) in l.iter().enumerate() {
            let slot = &mut t[*v as usize];
            if *slot == 0 {
                *slot = pos + 1;
            } else if *slot != pos + 1 {
                return Err(Error::invalid(format!("{v} occurs at positions {} and {}", *slot, pos + 1)));
            }
        }
    }
    if let Some(s) = (1..=c).find(|s| t[*s] == 0) {
        return Err(Error::invalid(format!("{s} occurs in no list of J_{}", fam.n)));
    }
    Ok(t)
}
