use num_complex::Complex64;

use super::*;
use crate::ncalg::{parse_polynomial, Alphabet, Letter, NcPolynomial};
use crate::ncexp::parse_fexpression;

fn poly(s: &str) -> NcPolynomial {
    parse_polynomial(s, Alphabet::new(3, 2)).unwrap()
}

fn within(est: &McEstimate, want: f64, k: f64) -> bool {
    (est.mean - want).abs() <= k * est.stderr.max(1e-12)
}

#[test]
fn sampler_is_hermitian_and_reproducible() {
    let cfg = GueConfig::new(16, 2, 7, 1).unwrap();
    let a = sample_gue(&cfg, 3);
    let b = sample_gue(&cfg, 3);
    assert_eq!(a, b);
    assert_ne!(a[0], a[1]);
    assert_ne!(a[0], sample_gue(&cfg, 4)[0]);
    for m in &a {
        assert_eq!(hermitian_defect(m), 0.0);
    }
    assert!(GueConfig::new(0, 1, 0, 1).is_err());
}

#[test]
fn scalar_case_has_unit_variance() {
    let draws = 100_000;
    let v: Vec<f64> = (0..draws).map(|r| gue_matrix(1, &mut stream(11, r, 0))[(0, 0)].re).collect();
    let mean = v.iter().sum::<f64>() / draws as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    // variance of the sample variance of a unit Gaussian is 2/(n-1)
    assert!((var - 1.0).abs() < 3.0 * (2.0 / draws as f64).sqrt(), "{var}");
}

#[test]
fn entry_covariances_at_size_eight() {
    let n = 8;
    let draws = 100_000u64;
    let (mut d2, mut re2, mut im2, mut reim, mut cross) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in 0..draws {
        let m = gue_matrix(n, &mut stream(5, r, 0));
        d2 += m[(2, 2)].re.powi(2);
        re2 += m[(1, 4)].re.powi(2);
        im2 += m[(1, 4)].im.powi(2);
        reim += m[(1, 4)].re * m[(1, 4)].im;
        cross += m[(0, 1)].re * m[(2, 3)].re;
    }
    let k = draws as f64;
    let nf = n as f64;
    // the fourth moment of N(0, s^2) is 3 s^4, so the estimator error is sqrt(2/k) s^2
    let close = |got: f64, want: f64, s2: f64| (got / k - want).abs() < 3.0 * (2.0f64 / k).sqrt() * s2;
    assert!(close(d2, 1.0 / nf, 1.0 / nf));
    assert!(close(re2, 0.5 / nf, 0.5 / nf));
    assert!(close(im2, 0.5 / nf, 0.5 / nf));
    assert!((reim / k).abs() < 3.0 * (0.5 / nf) / k.sqrt());
    assert!((cross / k).abs() < 3.0 * (0.5 / nf) / k.sqrt());
}

#[test]
fn spectral_functions() {
    let cfg = GueConfig::new(12, 1, 3, 1).unwrap();
    let x = sample_gue(&cfg, 0).remove(0);
    let one = SpectralFunctionSpec::Polynomial { coeffs: vec![1.0] };
    assert!((one.apply(&x).unwrap() - CMatrix::identity(12, 12)).norm() < 1e-10);
    let sq = SpectralFunctionSpec::Polynomial { coeffs: vec![0.5, -1.0, 2.0] };
    let mut b = MatrixBinding::new();
    b.insert(Letter::x(1), x.clone());
    let direct = eval_polynomial(&poly("1/2 - X1 + 2*X1^2"), &b).unwrap();
    assert!((sq.apply(&x).unwrap() - direct).norm() < 1e-9);
    let far = SpectralFunctionSpec::GaussianBump { center: 20.0, width: 1.0 };
    assert!(far.apply(&x).unwrap().norm() < 1e-8);
    let bump = SpectralFunctionSpec::Bump { lo: 3.0, hi: 4.0 };
    assert_eq!(bump.eval(2.99), 0.0);
    assert_eq!(bump.eval(4.01), 0.0);
    assert!((bump.eval(3.5) - 1.0).abs() < 1e-12);
    let plateau = SpectralFunctionSpec::Plateau { lo: -1.0, hi: 1.0, ramp: 0.5 };
    assert_eq!(plateau.eval(0.3), 1.0);
    assert_eq!(plateau.eval(1.6), 0.0);
    let mid = plateau.eval(1.25);
    assert!((mid - 0.5).abs() < 1e-9, "{mid}");
    assert!(h_step(0.3) < h_step(0.6));
    let table = SpectralFunctionSpec::Table { nodes: vec![0.0, 1.0], values: vec![1.0, 3.0] };
    assert_eq!(table.eval(0.5), 2.0);
    assert_eq!(table.eval(-4.0), 1.0);
    assert_eq!(table.eval(9.0), 3.0);
    assert!(SpectralFunctionSpec::Table { nodes: vec![1.0, 0.0], values: vec![1.0, 3.0] }.validate().is_err());
    let mut nh = x.clone();
    nh[(0, 1)] += Complex64::new(1.0, 0.0);
    assert!(one.apply(&nh).is_err());
}

#[test]
fn spectral_function_json() {
    let f = SpectralFunctionSpec::Bump { lo: 3.0, hi: 4.0 };
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(s, r#"{"kind":"bump","lo":3.0,"hi":4.0}"#);
    assert_eq!(serde_json::from_str::<SpectralFunctionSpec>(&s).unwrap(), f);
}

#[test]
fn mc_second_and_fourth_moments() {
    let id = SpectralFunctionSpec::identity();
    let cfg = GueConfig::new(32, 1, 21, 400).unwrap();
    let m2 = mc_trace(&id, &poly("X1^2"), &cfg, &MatrixBinding::new()).unwrap();
    assert!(within(&m2, 1.0, 3.0), "{m2:?}");
    let m4 = mc_trace(&id, &poly("X1^4"), &cfg, &MatrixBinding::new()).unwrap();
    assert!(within(&m4, 2.0 + 1.0 / 1024.0, 3.0), "{m4:?}");
    // through the eigenvalue path
    let sq = SpectralFunctionSpec::Polynomial { coeffs: vec![0.0, 0.0, 1.0] };
    let m2e = mc_trace(&sq, &poly("X1"), &cfg, &MatrixBinding::new()).unwrap();
    assert!((m2e.mean - m2.mean).abs() < 1e-10);
    let again = mc_trace(&id, &poly("X1^4"), &cfg, &MatrixBinding::new()).unwrap();
    assert_eq!(again, m4);
}

#[test]
fn mc_deterministic_letter() {
    let n = 6;
    let y = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
    let mut z = MatrixBinding::new();
    z.insert(Letter::y(1), y);
    let cfg = GueConfig::new(n, 1, 1, 20).unwrap();
    let est = mc_trace(&SpectralFunctionSpec::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }, &poly("Y1"), &cfg, &z).unwrap();
    assert_eq!(est.stderr, 0.0);
    assert!((est.mean - (0..n).map(|i| (i * i) as f64).sum::<f64>() / n as f64).abs() < 1e-10);
    assert!(mc_trace(&SpectralFunctionSpec::identity(), &poly("Y2"), &cfg, &z).is_err());
}

#[test]
fn mc_mixed_gue_and_deterministic() {
    // E tau(X A X B) = tau(A) tau(B) exactly
    let n = 16;
    let a = CMatrix::from_fn(n, n, |i, j| Complex64::new(((i + 2 * j) % 5) as f64 / 5.0, 0.0));
    let b = CMatrix::from_fn(n, n, |i, j| Complex64::new(((3 * i + j) % 7) as f64 / 7.0, 0.0));
    let want = a.trace().re * b.trace().re / (n * n) as f64;
    let mut z = MatrixBinding::new();
    z.insert(Letter::y(1), a);
    z.insert(Letter::y(2), b);
    let cfg = GueConfig::new(n, 1, 4, 600).unwrap();
    let est = mc_trace(&SpectralFunctionSpec::identity(), &poly("X1*Y1*X1*Y2"), &cfg, &z).unwrap();
    assert!(within(&est, want, 4.0), "{est:?} vs {want}");
}

#[test]
fn jackknife_estimators() {
    let v = [1.0, 2.0, 3.0, 4.0];
    let (m, se) = jackknife_mean(&v);
    assert_eq!(m, 2.5);
    // for the mean the jackknife error equals s / sqrt(n)
    let s = (v.iter().map(|x| (x - 2.5f64).powi(2)).sum::<f64>() / 3.0).sqrt();
    assert!((se - s / 2.0).abs() < 1e-12);
    let (c, _) = jackknife_covariance(&v, &v);
    assert!((c - s * s).abs() < 1e-12);
}

#[test]
fn schwinger_dyson_on_matrices() {
    let cfg = GueConfig::new(32, 1, 9, 200).unwrap();
    let z = MatrixBinding::new();
    let a = Alphabet::new(1, 0);
    let r1 = sd_matrix_residual(&parse_fexpression("X1", a).unwrap(), 1, &cfg, &z, 1.0, 8).unwrap();
    assert!(r1.within(3.0, 1e-12), "{r1:?}");
    let r3 = sd_matrix_residual(&parse_fexpression("X1^3", a).unwrap(), 1, &cfg, &z, 1.0, 8).unwrap();
    assert!(r3.within(3.0, 1e-12), "{r3:?}");
    let target = 2.0 + 1.0 / 1024.0;
    assert!((r3.lhs.re - target).abs() < 3.0 * r3.lhs.stderr);
    let re = sd_matrix_residual(&parse_fexpression("exp(i*X1)", a).unwrap(), 1, &cfg, &z, 1.0, 12).unwrap();
    assert!(re.within(3.0, 1e-9), "{re:?}");
}

#[test]
fn covariance_identity_simple_cases() {
    let a = Alphabet::new(1, 0);
    let x = parse_fexpression("X1", a).unwrap();
    let cfg = GueConfig::new(8, 1, 2, 2000).unwrap();
    let z = MatrixBinding::new();
    let zero = covariance_identity_check(&x, &x, 0.0, &cfg, &z, 8).unwrap();
    assert_eq!(zero.rhs, 0.0);
    assert!(zero.lhs.abs() < 1e-12);
    let one = covariance_identity_check(&x, &x, 1.0, &cfg, &z, 8).unwrap();
    let want = 1.0 - (-1.0f64).exp();
    assert!((one.rhs - want).abs() < 1e-12);
    assert!((one.lhs - want).abs() < 3.0 * one.lhs_stderr, "{one:?}");
    let x2 = parse_fexpression("X1^2", a).unwrap();
    let sq = covariance_identity_check(&x2, &x2, 1.0, &GueConfig::new(8, 1, 3, 1000).unwrap(), &z, 8).unwrap();
    assert!(sq.agrees(3.0, 1e-9), "{sq:?}");
    assert!(covariance_identity_check(&x, &x, -1.0, &cfg, &z, 8).is_err());
}

#[test]
fn norm_tail_properties() {
    let grid = [0.0, 0.1, 0.2, 0.5, 1.0];
    let t64 = norm_tail_experiment(64, 200, 1, &grid).unwrap();
    assert!(t64.points.windows(2).all(|w| w[1].tail <= w[0].tail));
    assert!(t64.points[0].tail > 0.0 && t64.points[0].tail < 1.0);
    let t16 = norm_tail_experiment(16, 200, 1, &grid).unwrap();
    assert!(t64.points[2].tail <= t16.points[2].tail);
    assert_eq!(t64.points[4].tail, 0.0);
}

#[test]
fn confinement_references() {
    let none = |_n: usize| MatrixBinding::new();
    let r = spectrum_reference(&poly("X1^2"), &none, 8, 0).unwrap();
    assert_eq!(r.kind, ReferenceKind::Exact);
    assert!(r.lo.abs() < 1e-12 && (r.hi - 4.0).abs() < 1e-12);
    let r = spectrum_reference(&poly("X1^3 - X1"), &none, 8, 0).unwrap();
    assert!((r.hi - 6.0).abs() < 1e-9 && (r.lo + 6.0).abs() < 1e-9);
    let c = spectrum_confinement_experiment(&poly("X1^2"), &none, &[32], 50, 3, 0.3).unwrap();
    assert!(c.rows[0].fraction <= 1.0);
    let diag = |n: usize| {
        let mut z = MatrixBinding::new();
        z.insert(Letter::y(1), CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { Complex64::new(0.0, 0.0) }));
        z
    };
    let det = spectrum_confinement_experiment(&poly("Y1"), &diag, &[8, 16], 10, 1, 0.4).unwrap();
    assert!(det.rows.iter().all(|r| r.violations == 0 && r.reference.kind == ReferenceKind::Deterministic));
    assert!(spectrum_confinement_experiment(&poly("X1"), &none, &[8], 10, 1, 0.7).is_err());
}

#[test]
fn norm_fluctuations_stay_bounded() {
    let rows = norm_fluctuation_experiment(&[32, 64, 128], 60, 5).unwrap();
    assert!(rows.iter().all(|r| r.median.abs() < 1.0 && r.q05 <= r.median && r.median <= r.q95));
}
