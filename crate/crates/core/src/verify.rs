//! Self-checks grouped into suites: symbolic identities, the free
//! Schwinger-Dyson equation, expansion coefficients against the pairing
//! oracles, the covariance identity and the Monte Carlo experiments.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expansion::{alpha_fit_mc, alpha_polynomial, colored_word, finite_n_expectation, genus_oracle, map_count, QuadConfig};
use crate::freemoments::{catalan, sd_residual, ExactFreeTrace};
use crate::ncalg::{parse_polynomial, Alphabet, Letter, NcPolynomial, Word};
use crate::ncexp::{compose_chain, parse_fexpression, ChainStep, FPoly, LetterMap, ParamSupply, Selector};
use crate::rmt::{covariance_identity_check, mc_trace, spectrum_confinement_experiment, GueConfig, MatrixBinding, SpectralFunctionSpec};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Symbolic,
    Sd,
    Expansion,
    Covariance,
    Mc,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [u32] {
        match self {
            Suite::Symbolic => &[1, 2],
            Suite::Sd => &[3],
            Suite::Expansion => &[4, 5, 6],
            Suite::Covariance => &[8],
            Suite::Mc => &[7, 9, 10],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "symbolic" => Suite::Symbolic,
            "sd" => Suite::Sd,
            "expansion" => Suite::Expansion,
            "covariance" => Suite::Covariance,
            "mc" => Suite::Mc,
            "all" => Suite::All,
            _ => return Err(Error::invalid(format!("unknown suite {s:?}"))),
        })
    }
}

/// Outcome of one numbered check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs every criterion of `suite`.
pub fn run_suite(suite: Suite, seed: u64) -> VerifyReport {
    let checks: Vec<Check> = suite.criteria().iter().map(|c| run_criterion(*c, seed)).collect();
    VerifyReport { suite, seed, passed: checks.iter().all(|c| c.passed), checks }
}

/// Runs one criterion; errors become failures with the message as detail.
pub fn run_criterion(criterion: u32, seed: u64) -> Check {
    let start = Instant::now();
    let (name, outcome) = match criterion {
        1 => ("boxtimes golden value", golden_contraction()),
        2 => ("four-way splitting identity", splitting_identity(6)),
        3 => ("free Schwinger-Dyson residuals", free_sd(7, 3)),
        4 => ("genus oracle against entrywise expectation", oracle_equivalence(8)),
        5 => ("map counts", map_counts()),
        6 => ("first-order coefficients", first_order()),
        7 => ("Monte Carlo expansion fit", mc_fit(seed)),
        8 => ("covariance identity", covariance(seed)),
        9 => ("off-spectrum bump", off_spectrum(seed)),
        10 => ("spectrum confinement trend", confinement(seed)),
        _ => ("unknown", Err(Error::invalid(format!("no criterion {criterion}")))),
    };
    let (passed, detail) = match outcome {
        Ok(d) => d,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { criterion, name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

type Outcome = Result<(bool, String)>;

fn poly(s: &str, d: u32) -> Result<NcPolynomial> {
    parse_polynomial(s, Alphabet::new(d, 0))
}

/// Letter `X_k` of slot `s` becomes `X_{2s+k}`.
fn slot_binding(slot: u32) -> LetterMap {
    (1..=2).map(|k| (Letter::x(k), Letter::x(2 * slot + k))).collect()
}

fn golden_contraction() -> Outcome {
    let q = poly("X2*X1*X2^2*X1^2", 2)?;
    let steps = [
        ChainStep::Cyclic { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(2), leg: 0 },
        ChainStep::Partial { sel: Selector::x(2), leg: 2 },
        ChainStep::Contract { order: vec![1, 0, 3, 2], bindings: vec![slot_binding(1), slot_binding(0), slot_binding(3), slot_binding(2)] },
    ];
    let r = compose_chain(&FPoly::from(&q), &steps, &mut ParamSupply::new())?;
    let got = r.value.to_fpoly()?.to_polynomial().ok_or_else(|| Error::invalid("contraction left exponential atoms"))?;
    let want = poly("X4*X7 + X2*X7 + X2*X1 + X1*X4 + X3*X6 + X3*X8 + X6*X5 + X5*X8", 8)?;
    Ok((got == want, format!("got {got}")))
}

/// All words of length `len` over `X_1..X_d`.
pub fn all_words(d: u32, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (1..=d).map(move |i| w.concat(&Word(vec![Letter::x(i)])))).collect();
    }
    out
}

fn splitting_identity(max_deg: usize) -> Outcome {
    let ident: Vec<LetterMap> = (0..4).map(|_| (1..=2).map(|k| (Letter::x(k), Letter::x(k))).collect()).collect();
    let mut checked = 0usize;
    for len in 0..=max_deg {
        for w in all_words(2, len) {
            let q = FPoly::from(&NcPolynomial::monomial(Coeff::from_int(1), w.clone()));
            for i in 1..=2 {
                for j in 1..=2 {
                    let steps = [
                        ChainStep::Partial { sel: Selector::x(i), leg: 0 },
                        ChainStep::Partial { sel: Selector::x(j), leg: 0 },
                        ChainStep::Partial { sel: Selector::x(j), leg: 2 },
                        ChainStep::Contract { order: vec![1, 0, 3, 2], bindings: ident.clone() },
                    ];
                    let got = compose_chain(&q, &steps, &mut ParamSupply::new())?.value.to_fpoly()?.to_polynomial().unwrap_or_default();
                    // direct enumeration of Q = A1 Xj A2 Xi B1 Xj B2
                    let l = &w.0;
                    let mut want = NcPolynomial::zero();
                    for p in 0..l.len() {
                        for m in p + 1..l.len() {
                            for r in m + 1..l.len() {
                                if l[p] == Letter::x(j) && l[m] == Letter::x(i) && l[r] == Letter::x(j) {
                                    let mut v = l[p + 1..m].to_vec();
                                    v.extend_from_slice(&l[..p]);
                                    v.extend_from_slice(&l[r + 1..]);
                                    v.extend_from_slice(&l[m + 1..r]);
                                    want.add_term(Word(v), Coeff::from_int(1));
                                }
                            }
                        }
                    }
                    if got != want {
                        return Ok((false, format!("{w}, i={i}, j={j}: {got} vs {want}")));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok((true, format!("{checked} cases")))
}

fn free_sd(max_deg: usize, d: u32) -> Outcome {
    let tr = ExactFreeTrace::free();
    let mut checked = 0usize;
    for len in 0..=max_deg {
        for w in all_words(d, len) {
            let q = NcPolynomial::monomial(Coeff::from_int(1), w.clone());
            for i in 1..=d {
                let r = sd_residual(&tr, &q, i)?;
                if r != Coeff::default() {
                    return Ok((false, format!("{w}, i={i}: residual {r}")));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} residuals, all exactly zero")))
}

fn oracle_equivalence(max_len: usize) -> Outcome {
    let mut checked = 0usize;
    for len in 1..=max_len {
        for w in all_words(2, len) {
            let t = genus_oracle(&w, u32::MAX)?;
            for n in [2u32, 3, 4] {
                let exact = finite_n_expectation(&w, n)?;
                if t.evaluate(n as u64) != exact {
                    return Ok((false, format!("{w} at N={n}: oracle {} vs {exact}", t.evaluate(n as u64))));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} word/size pairs equal in exact arithmetic")))
}

fn map_counts() -> Outcome {
    let quad = QuadConfig::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for p in 1..=5u32 {
        let t = genus_oracle(&colored_word(&vec![1; 2 * p as usize]), 0)?;
        let got = t.table.get(&0).copied().unwrap_or(0);
        let want = catalan(p);
        ok &= BigUint::from(got) == want;
        notes.push(format!("C{p}={got}"));
    }
    for (colors, gs) in [(vec![1u32; 4], vec![0u32, 1]), (vec![1; 6], vec![0, 1]), (vec![1, 2, 1, 2], vec![1])] {
        let w = colored_word(&colors);
        let t = genus_oracle(&w, 8)?;
        for g in gs {
            let m = map_count(&w, g, &quad)?;
            let want = t.table.get(&g).copied().unwrap_or(0);
            ok &= m.count == want && (m.raw - want as f64).abs() <= 1e-6;
            notes.push(format!("{w} g={g}: {} (raw {:.12})", m.count, m.raw));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn first_order() -> Outcome {
    let quad = QuadConfig::default();
    let z = MatrixBinding::new();
    let a4 = alpha_polynomial(&poly("X1^4", 1)?, 1, &z, &quad)?;
    let a2 = alpha_polynomial(&poly("X1^2", 1)?, 1, &z, &quad)?;
    let ok = (a4.value - 1.0).abs() <= 1e-6 && a2.value.abs() <= 1e-8;
    Ok((ok, format!("alpha1(X1^4) = {:.15}, alpha1(X1^2) = {:.3e}", a4.value, a2.value)))
}

fn mc_fit(seed: u64) -> Outcome {
    let r = alpha_fit_mc(&poly("X1^4", 1)?, &SpectralFunctionSpec::identity(), &[32, 64, 128, 256], 2000, 1, seed, &|_| MatrixBinding::new())?;
    let (a, s) = (&r.fit.coefficients, &r.fit.stderrs);
    let ok = (a[0] - 2.0).abs() <= 3.0 * s[0] && (a[1] - 1.0).abs() <= 3.0 * s[1];
    Ok((ok, format!("a0 = {:.6} +- {:.2e}, a1 = {:.4} +- {:.3}", a[0], s[0], a[1], s[1])))
}

/// Spread used when a side has no sampling error at all.
const ERROR_FLOOR: f64 = 1e-9;

fn covariance(seed: u64) -> Outcome {
    let a = Alphabet::new(1, 0);
    let x = parse_fexpression("X1", a)?;
    let x2 = parse_fexpression("X1^2", a)?;
    let z = MatrixBinding::new();
    let cfg = GueConfig::new(8, 1, seed, 4000)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for t in [0.5f64, 1.0, 2.0] {
        let exact = 1.0 - (-t).exp();
        let c = covariance_identity_check(&x, &x, t, &cfg, &z, 16)?;
        let lhs_ok = (c.lhs - exact).abs() <= 3.0 * c.lhs_stderr.max(ERROR_FLOOR);
        let rhs_ok = (c.rhs - exact).abs() <= 3.0 * c.rhs_stderr.max(ERROR_FLOOR);
        let s = covariance_identity_check(&x2, &x2, t, &cfg, &z, 16)?;
        let sq_ok = s.agrees(3.0, ERROR_FLOOR);
        ok &= lhs_ok && rhs_ok && sq_ok;
        notes.push(format!(
            "t={t}: X1 lhs {:.4}+-{:.4} rhs {:.6} exact {:.6}; X1^2 lhs {:.4} rhs {:.4} pooled {:.4}",
            c.lhs, c.lhs_stderr, c.rhs, exact, s.lhs, s.rhs, s.pooled_stderr
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn off_spectrum(seed: u64) -> Outcome {
    let f = SpectralFunctionSpec::Bump { lo: 3.0, hi: 4.0 };
    let p = poly("X1", 1)?;
    let mut scaled = Vec::new();
    for n in [64usize, 128, 256] {
        let e = mc_trace(&f, &p, &GueConfig::new(n, 1, seed, 200)?, &MatrixBinding::new())?;
        scaled.push((n, n as f64 * e.mean));
    }
    let ok = scaled.windows(2).all(|w| w[1].1 <= w[0].1) && scaled[2].1 < 1e-3;
    Ok((ok, scaled.iter().map(|(n, v)| format!("N={n}: {v:.3e}")).collect::<Vec<_>>().join(", ")))
}

fn confinement(seed: u64) -> Outcome {
    let c = spectrum_confinement_experiment(&poly("X1", 1)?, &|_| MatrixBinding::new(), &[64, 256], 500, seed, 0.4)?;
    let ok = c.rows.windows(2).all(|w| w[1].fraction <= w[0].fraction);
    Ok((ok, c.rows.iter().map(|r| format!("N={}: {}/{}", r.n, r.violations, r.samples)).collect::<Vec<_>>().join(", ")))
}
