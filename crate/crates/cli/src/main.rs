//! `topexp`: command-line front end for the expansion engines.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid input, 3 guard
//! exceeded, 4 verification failure.

mod config;
mod output;
mod zspec;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use topexp::expansion::{alpha_fit_mc, alpha_polynomial, genus_oracle, map_table, QuadConfig};
use topexp::ncalg::{parse_polynomial, Alphabet};
use topexp::ncexp::{parse_fexpression, FPoly};
use topexp::rmt::{covariance_identity_check, norm_fluctuation_experiment, norm_tail_experiment, sd_matrix_residual, spectrum_confinement_experiment, GueConfig, SpectralFunctionSpec};
use topexp::verify::{run_suite, Suite, DEFAULT_SEED};
use topexp::{Coeff, Error, NcPolynomial, Result, Word};

use output::{emit, to_json, Cell, Echo, Envelope, Table, SCHEMA};
use zspec::ZSpec;

/// Largest `X` index accepted in input text.
const MAX_LETTERS: u32 = 64;
/// Agreement band for the sampled checks, in standard errors.
const SIGMAS: f64 = 3.0;
const ERROR_FLOOR: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "topexp", version, about = "Topological expansion of GUE matrix traces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Genus table of a colored word, by pairing enumeration and by the integral formula.
    #[command(args_override_self = true)]
    Maps(MapsArgs),
    /// Expansion coefficients of a polynomial.
    #[command(args_override_self = true)]
    Alpha(AlphaArgs),
    /// Monte Carlo means over several sizes with a fitted expansion.
    #[command(args_override_self = true)]
    Mc(McArgs),
    /// Matrix Schwinger-Dyson residual.
    #[command(args_override_self = true, name = "sd-check")]
    SdCheck(SdArgs),
    /// Both sides of the covariance identity.
    #[command(args_override_self = true, name = "cov-check")]
    CovCheck(CovArgs),
    /// Spectrum confinement experiment.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Norm tail and norm fluctuation experiment.
    #[command(args_override_self = true, name = "norm-tail")]
    NormTail(TailArgs),
    /// Run the self-check suites.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Serialize)]
struct Common {
    /// key=value file supplying defaults for any flag of this command.
    #[arg(long)]
    config: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; all cores by default. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Serialize)]
struct QuadArgs {
    /// Gauss-Legendre nodes per axis.
    #[arg(long, default_value_t = 16)]
    nodes: usize,
    /// Largest accepted change under node doubling.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    allow_order_three: bool,
}

impl QuadArgs {
    fn config(&self) -> QuadConfig {
        QuadConfig { nodes: self.nodes, verify: !self.no_verify, tol: self.tol, allow_order_three: self.allow_order_three }
    }
}

#[derive(Args, Serialize)]
struct MapsArgs {
    /// Monomial in X letters, e.g. "X1*X2*X1*X2" or "X1^4".
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 1)]
    gmax: u32,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct AlphaArgs {
    #[arg(long)]
    poly: String,
    /// Comma-separated orders.
    #[arg(long, default_value = "1")]
    order: String,
    /// Deterministic matrices, e.g. "Y1=diag:1,-1;Y2=shift".
    #[arg(long, default_value = "")]
    z: String,
    /// Size of the deterministic matrices; defaults to the longest pattern.
    #[arg(long)]
    z_size: Option<usize>,
    #[command(flatten)]
    quad: QuadArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct McArgs {
    #[arg(long)]
    poly: String,
    /// identity, poly:c0,c1,..., gauss:center,width, bump:lo,hi, plateau:lo,hi,ramp, or JSON.
    #[arg(long, default_value = "identity")]
    f: String,
    #[arg(long, default_value = "32,64,128,256")]
    sizes: String,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    /// Highest power of 1/N^2 in the fit.
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "")]
    z: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct SdArgs {
    /// Expression, exponentials allowed: "X1*exp(i*X1)".
    #[arg(long)]
    expr: String,
    #[arg(long, default_value_t = 1)]
    i: u32,
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Value of the scalar `y` in exponents.
    #[arg(long, default_value_t = 1.0)]
    y: f64,
    /// Quadrature nodes for Duhamel parameters.
    #[arg(long, default_value_t = 16)]
    nodes: usize,
    #[arg(long, default_value = "")]
    z: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct CovArgs {
    #[arg(long)]
    p: String,
    /// Defaults to P.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated times.
    #[arg(long, default_value = "1")]
    t: String,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    s_nodes: usize,
    #[arg(long, default_value = "")]
    z: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[arg(long, default_value = "X1")]
    poly: String,
    #[arg(long, default_value = "64,256")]
    sizes: String,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Margin exponent: the band is N^(-alpha).
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "")]
    z: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct TailArgs {
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Comma-separated offsets above 2.
    #[arg(long, default_value = "0,0.05,0.1,0.15,0.2,0.3")]
    u: String,
    /// Sizes for the fluctuation statistic; skipped when empty.
    #[arg(long, default_value = "")]
    fluct_sizes: String,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// symbolic, sd, expansion, covariance, mc or all.
    #[arg(long, default_value = "all", value_parser = |s: &str| s.parse::<Suite>().map_err(|e| e.to_string()))]
    suite: Suite,
    #[arg(long, env = "TOPEXP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

fn list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| x.parse().map_err(|_| Error::invalid(format!("bad {what} entry {x:?}")))).collect()
}

fn nonempty<T>(what: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(Error::invalid(format!("{what} list is empty")));
    }
    Ok(v)
}

fn max_x(letters: impl IntoIterator<Item = topexp::Letter>) -> u32 {
    letters.into_iter().filter(|l| l.is_x()).map(|l| l.index).max().unwrap_or(1)
}

fn parse_word(text: &str) -> Result<Word> {
    let p = parse_polynomial(text, Alphabet::new(MAX_LETTERS, 0))?;
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((w, c)), None) if *c == Coeff::from_int(1) => Ok(w.clone()),
        _ => Err(Error::invalid(format!("{text:?} is not a single monomial with coefficient 1"))),
    }
}

fn parse_function(text: &str) -> Result<SpectralFunctionSpec> {
    let text = text.trim();
    let f = if text == "identity" {
        SpectralFunctionSpec::identity()
    } else if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("function spec: {e}")))?
    } else {
        let (kind, args) = text.split_once(':').ok_or_else(|| Error::invalid(format!("unknown function {text:?}")))?;
        let a: Vec<f64> = list("function argument", args)?;
        let arity = |n: usize| if a.len() == n { Ok(()) } else { Err(Error::invalid(format!("{kind} takes {n} arguments"))) };
        match kind {
            "poly" => SpectralFunctionSpec::Polynomial { coeffs: a },
            "gauss" => arity(2).map(|_| SpectralFunctionSpec::GaussianBump { center: a[0], width: a[1] })?,
            "bump" => arity(2).map(|_| SpectralFunctionSpec::Bump { lo: a[0], hi: a[1] })?,
            "plateau" => arity(3).map(|_| SpectralFunctionSpec::Plateau { lo: a[0], hi: a[1], ramp: a[2] })?,
            _ => return Err(Error::invalid(format!("unknown function kind {kind:?}"))),
        }
    };
    f.validate()?;
    Ok(f)
}

struct Ctx<'a> {
    command: &'a str,
    common: &'a Common,
}

impl Ctx<'_> {
    fn finish<C: Serialize, R: Serialize>(&self, config: &C, result: &R, table: impl FnOnce() -> Table) -> Result<()> {
        let text = match self.common.format {
            Format::Json => to_json(&Envelope { schema: SCHEMA, command: self.command, config, result })?,
            Format::Csv => {
                let echo = to_json(&Echo { schema: SCHEMA, command: self.command, config })?;
                table().render(&echo)
            }
        };
        emit(self.common.out.as_deref(), &text)
    }
}

#[derive(Serialize)]
struct MapsResult {
    oracle: topexp::expansion::GenusTable,
    integral: topexp::expansion::GenusTable,
    agreement: BTreeMap<u32, bool>,
    agree: bool,
}

fn cmd_maps(a: &MapsArgs) -> Result<u8> {
    let w = parse_word(&a.word)?;
    let oracle = genus_oracle(&w, a.gmax)?;
    let integral = map_table(&w, a.gmax, &a.quad.config())?;
    let agreement: BTreeMap<u32, bool> = (0..=a.gmax).map(|g| (g, oracle.table.get(&g) == integral.table.get(&g))).collect();
    let r = MapsResult { agree: agreement.values().all(|b| *b), oracle, integral, agreement };
    Ctx { command: "maps", common: &a.common }.finish(a, &r, || Table {
        header: vec!["genus", "oracle", "integral", "raw", "agree"],
        rows: r
            .agreement
            .iter()
            .map(|(g, ok)| {
                vec![
                    Cell::Int(*g as u64),
                    Cell::Int(r.oracle.table.get(g).copied().unwrap_or(0)),
                    Cell::Int(r.integral.table.get(g).copied().unwrap_or(0)),
                    Cell::Float(r.integral.raw.get(g).copied().unwrap_or(0.0)),
                    Cell::Text(ok.to_string()),
                ]
            })
            .collect(),
    })?;
    Ok(0)
}

fn cmd_alpha(a: &AlphaArgs) -> Result<u8> {
    let z = ZSpec::parse(&a.z)?;
    let p = parse_polynomial(&a.poly, Alphabet::new(MAX_LETTERS, z.r()))?;
    let orders: Vec<usize> = nonempty("order", list("order", &a.order)?)?;
    let bind = z.binding(a.z_size.unwrap_or_else(|| z.natural_size()));
    let quad = a.quad.config();
    let reports = orders.iter().map(|k| alpha_polynomial(&p, *k, &bind, &quad)).collect::<Result<Vec<_>>>()?;
    Ctx { command: "alpha", common: &a.common }.finish(a, &reports, || Table {
        header: vec!["order", "value", "imag", "est_error", "nodes", "chambers", "terms"],
        rows: reports
            .iter()
            .map(|r| vec![Cell::Int(r.order as u64), Cell::Float(r.value), Cell::Float(r.imag), Cell::Float(r.est_error), Cell::Int(r.nodes as u64), Cell::Int(r.chambers), Cell::Int(r.terms as u64)])
            .collect(),
    })?;
    Ok(0)
}

fn cmd_mc(a: &McArgs) -> Result<u8> {
    let z = ZSpec::parse(&a.z)?;
    let p = parse_polynomial(&a.poly, Alphabet::new(MAX_LETTERS, z.r()))?;
    let f = parse_function(&a.f)?;
    let sizes: Vec<usize> = nonempty("size", list("size", &a.sizes)?)?;
    let r = alpha_fit_mc(&p, &f, &sizes, a.samples, a.order, a.seed, &|n| z.binding(n))?;
    Ctx { command: "mc", common: &a.common }.finish(a, &r, || Table {
        header: vec!["n", "samples", "mean", "stderr", "residual"],
        rows: r
            .observations
            .iter()
            .zip(&r.fit.residuals)
            .map(|(o, res)| vec![Cell::Int(o.n as u64), Cell::Int(r.samples as u64), Cell::Float(o.mean), Cell::Float(o.stderr), Cell::Float(*res)])
            .collect(),
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct SdResult {
    residual: topexp::rmt::SdMatrixResidual,
    within_band: bool,
}

fn cmd_sd(a: &SdArgs) -> Result<u8> {
    let z = ZSpec::parse(&a.z)?;
    let q = parse_fexpression(&a.expr, Alphabet::new(MAX_LETTERS, z.r()))?;
    if a.i == 0 {
        return Err(Error::invalid("letter index i starts at 1"));
    }
    let cfg = GueConfig::new(a.n, max_x(q.letters()).max(a.i), a.seed, a.samples)?;
    let residual = sd_matrix_residual(&q, a.i, &cfg, &z.binding(a.n), a.y, a.nodes)?;
    let r = SdResult { within_band: residual.within(SIGMAS, ERROR_FLOOR), residual };
    Ctx { command: "sd-check", common: &a.common }.finish(a, &r, || {
        let s = &r.residual;
        Table {
            header: vec!["n", "samples", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual_re", "residual_im", "stderr"],
            rows: vec![vec![
                Cell::Int(s.n as u64),
                Cell::Int(s.samples as u64),
                Cell::Float(s.lhs.re),
                Cell::Float(s.lhs.im),
                Cell::Float(s.rhs.re),
                Cell::Float(s.rhs.im),
                Cell::Float(s.residual.re),
                Cell::Float(s.residual.im),
                Cell::Float(s.residual.stderr),
            ]],
        }
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct CovRow {
    #[serde(flatten)]
    check: topexp::rmt::CovarianceCheck,
    agrees: bool,
}

fn cmd_cov(a: &CovArgs) -> Result<u8> {
    let z = ZSpec::parse(&a.z)?;
    let alpha = Alphabet::new(MAX_LETTERS, z.r());
    let p = parse_fexpression(&a.p, alpha)?;
    let q: FPoly = match &a.q {
        Some(s) => parse_fexpression(s, alpha)?,
        None => p.clone(),
    };
    let times: Vec<f64> = nonempty("time", list("time", &a.t)?)?;
    let cfg = GueConfig::new(a.n, max_x(p.letters().into_iter().chain(q.letters())), a.seed, a.samples)?;
    let bind = z.binding(a.n);
    let rows = times
        .iter()
        .map(|t| covariance_identity_check(&p, &q, *t, &cfg, &bind, a.s_nodes).map(|c| CovRow { agrees: c.agrees(SIGMAS, ERROR_FLOOR), check: c }))
        .collect::<Result<Vec<_>>>()?;
    Ctx { command: "cov-check", common: &a.common }.finish(a, &rows, || Table {
        header: vec!["t", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "pooled_stderr", "agrees"],
        rows: rows
            .iter()
            .map(|r| {
                let c = &r.check;
                vec![Cell::Float(c.t), Cell::Float(c.lhs), Cell::Float(c.lhs_stderr), Cell::Float(c.rhs), Cell::Float(c.rhs_stderr), Cell::Float(c.pooled_stderr), Cell::Text(r.agrees.to_string())]
            })
            .collect(),
    })?;
    Ok(0)
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<u8> {
    let z = ZSpec::parse(&a.z)?;
    let p: NcPolynomial = parse_polynomial(&a.poly, Alphabet::new(MAX_LETTERS, z.r()))?;
    let sizes: Vec<usize> = nonempty("size", list("size", &a.sizes)?)?;
    let r = spectrum_confinement_experiment(&p, &|n| z.binding(n), &sizes, a.samples, a.seed, a.alpha)?;
    Ctx { command: "spectrum", common: &a.common }.finish(a, &r, || Table {
        header: vec!["n", "samples", "margin", "violations", "fraction", "lo", "hi", "reference"],
        rows: r
            .rows
            .iter()
            .map(|w| {
                vec![
                    Cell::Int(w.n as u64),
                    Cell::Int(w.samples as u64),
                    Cell::Float(w.margin),
                    Cell::Int(w.violations as u64),
                    Cell::Float(w.fraction),
                    Cell::Float(w.reference.lo),
                    Cell::Float(w.reference.hi),
                    Cell::Text(format!("{:?}", w.reference.kind).to_lowercase()),
                ]
            })
            .collect(),
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct TailResult {
    tail: topexp::rmt::NormTail,
    fluctuations: Vec<topexp::rmt::FluctuationRow>,
}

fn cmd_tail(a: &TailArgs) -> Result<u8> {
    let u: Vec<f64> = nonempty("u", list("u", &a.u)?)?;
    let sizes: Vec<usize> = list("size", &a.fluct_sizes)?;
    let tail = norm_tail_experiment(a.n, a.samples, a.seed, &u)?;
    let fluctuations = if sizes.is_empty() { Vec::new() } else { norm_fluctuation_experiment(&sizes, a.samples, a.seed)? };
    let r = TailResult { tail, fluctuations };
    Ctx { command: "norm-tail", common: &a.common }.finish(a, &r, || Table {
        header: vec!["n", "samples", "u", "tail"],
        rows: r.tail.points.iter().map(|p| vec![Cell::Int(r.tail.n as u64), Cell::Int(r.tail.samples as u64), Cell::Float(p.u), Cell::Float(p.tail)]).collect(),
    })?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let r = run_suite(a.suite, a.seed);
    for c in &r.checks {
        eprintln!("criterion {:>2} {} {}", c.criterion, if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    Ctx { command: "verify", common: &a.common }.finish(a, &r, || Table {
        header: vec!["criterion", "name", "passed", "seconds", "detail"],
        rows: r.checks.iter().map(|c| vec![Cell::Int(c.criterion as u64), Cell::Text(c.name.clone()), Cell::Text(c.passed.to_string()), Cell::Float(c.seconds), Cell::Text(c.detail.clone())]).collect(),
    })?;
    Ok(if r.passed { 0 } else { 4 })
}

fn common(cmd: &Cmd) -> &Common {
    match cmd {
        Cmd::Maps(a) => &a.common,
        Cmd::Alpha(a) => &a.common,
        Cmd::Mc(a) => &a.common,
        Cmd::SdCheck(a) => &a.common,
        Cmd::CovCheck(a) => &a.common,
        Cmd::Spectrum(a) => &a.common,
        Cmd::NormTail(a) => &a.common,
        Cmd::Verify(a) => &a.common,
    }
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(t) = common(&cli.cmd).threads {
        if t == 0 {
            return Err(Error::invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Error::invalid(e.to_string()))?;
    }
    match &cli.cmd {
        Cmd::Maps(a) => cmd_maps(a),
        Cmd::Alpha(a) => cmd_alpha(a),
        Cmd::Mc(a) => cmd_mc(a),
        Cmd::SdCheck(a) => cmd_sd(a),
        Cmd::CovCheck(a) => cmd_cov(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
        Cmd::NormTail(a) => cmd_tail(a),
        Cmd::Verify(a) => cmd_verify(a),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_guard() {
        3
    } else if matches!(e, Error::Quadrature(_)) {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let argv = match config::splice_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
