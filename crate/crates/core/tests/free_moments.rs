use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use topexp::freemoments::{enumerate_nc_pairings, mixed_trace, semicircle_moment, sd_residual, trace_of_polynomial, wick_moment, CovarianceSpec, ExactFreeTrace, FreeBinding, MixedItem, SemiLetter};
use topexp::ncalg::{parse_polynomial, Alphabet};
use topexp::quadrature::GaussLegendre;
use topexp::rmt::{gue_matrix, jackknife_mean, stream};
use topexp::{Coeff, Letter};

#[test]
fn semicircle_moments_match_the_density() {
    // t = 2 sin(theta) makes the density integrand smooth
    let gl = GaussLegendre::new(40);
    for k in 0..=12u32 {
        let num = gl.integrate(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, |th| {
            (2.0 * th.sin()).powi(k as i32) * 4.0 * th.cos().powi(2) / (2.0 * std::f64::consts::PI)
        });
        let exact: f64 = semicircle_moment(k).to_string().parse().unwrap();
        assert!((num - exact).abs() < 1e-10, "k={k}: {num} vs {exact}");
    }
    assert_eq!(semicircle_moment(3), BigUint::from(0u32));
}

fn all_pairings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for k in 1..points.len() {
        let rest: Vec<usize> = points.iter().enumerate().filter(|(i, _)| *i != 0 && *i != k).map(|(_, p)| *p).collect();
        for mut p in all_pairings(&rest) {
            p.push((points[0], points[k]));
            out.push(p);
        }
    }
    out
}

fn crossing(p: &[(usize, usize)]) -> bool {
    p.iter().any(|&(a, b)| p.iter().any(|&(c, d)| a < c && c < b && b < d))
}

fn canonical(p: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = p.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    v.sort_unstable();
    v
}

#[test]
fn pairings_equal_the_filtered_pair_partitions() {
    for m in [0usize, 2, 4, 6, 8, 10] {
        let brute: BTreeSet<_> = all_pairings(&(0..m).collect::<Vec<_>>()).iter().filter(|p| !crossing(p)).map(|p| canonical(p)).collect();
        let got: Vec<_> = enumerate_nc_pairings(m).unwrap().iter().map(|p| canonical(p)).collect();
        assert_eq!(got.len(), brute.len());
        assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), brute);
    }
    let four: BTreeSet<_> = enumerate_nc_pairings(4).unwrap().iter().map(|p| canonical(p)).collect();
    assert_eq!(four, BTreeSet::from([vec![(0, 1), (2, 3)], vec![(0, 3), (1, 2)]]));
    assert!(enumerate_nc_pairings(3).is_err());
}

#[test]
fn wick_examples() {
    assert_eq!(wick_moment(4, |_, _| 1.0), 2.0);
    let colors = [1, 2, 1, 2];
    assert_eq!(wick_moment(4, |a, b| if colors[a] == colors[b] { 1.0 } else { 0.0 }), 0.0);
    assert_eq!(wick_moment(2, |_, _| 0.75), 0.75);
}

fn diag(v: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { Complex64::new(v[i], 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn norm_trace(m: &DMatrix<Complex64>) -> Complex64 {
    m.trace() / m.nrows() as f64
}

/// Samples of `tau_N(X A X B)` for diagonal `A`, `B`: `sum |X_ij|^2 a_j b_i / N`.
fn mc_xaxb(a: &[f64], b: &[f64], samples: u64, seed: u64) -> (f64, f64) {
    let n = a.len();
    let v: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let x = gue_matrix(n, &mut stream(seed, r, 0));
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += x[(i, j)].norm_sqr() * a[j] * b[i];
                }
            }
            s / n as f64
        })
        .collect();
    jackknife_mean(&v)
}

#[test]
fn mixed_traces_agree_with_monte_carlo() {
    let n = 256;
    let z: Vec<f64> = (0..n).map(|i| ((i % 7) as f64 - 2.0) / 3.0).collect();
    let w: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 5) % 11) as f64 / 10.0).collect();
    let (zm, wm) = (diag(&z), diag(&w));
    let semi = [SemiLetter::new(0, 1)];
    let cov = CovarianceSpec::free();

    let zz = mixed_trace(&[MixedItem::Semi(0), MixedItem::Det(&zm), MixedItem::Semi(0), MixedItem::Det(&zm)], &semi, &cov).unwrap();
    assert!((zz - norm_trace(&zm).powi(2)).norm() < 1e-12);
    let (mean, se) = mc_xaxb(&z, &z, 10_000, 1);
    assert!((mean - zz.re).abs() <= 3.0 * se, "{mean} +- {se} vs {zz}");

    let zw = mixed_trace(&[MixedItem::Semi(0), MixedItem::Det(&zm), MixedItem::Semi(0), MixedItem::Det(&wm)], &semi, &cov).unwrap();
    assert!((zw - norm_trace(&zm) * norm_trace(&wm)).norm() < 1e-12);
    let (mean, se) = mc_xaxb(&z, &w, 10_000, 2);
    assert!((mean - zw.re).abs() <= 3.0 * se, "{mean} +- {se} vs {zw}");

    let only = mixed_trace(&[MixedItem::Det(&wm)], &[], &cov).unwrap();
    assert!((only - norm_trace(&wm)).norm() < 1e-12);
}

#[test]
fn polynomial_traces() {
    let a = Alphabet::new(2, 1);
    let dets = BTreeMap::from([(Letter::y(1), diag(&[1.0, 2.0])), (Letter::y(2), diag(&[1.0, 2.0]))]);
    let b = FreeBinding::free(2, dets).unwrap();
    let t = |s: &str| trace_of_polynomial(&parse_polynomial(s, a).unwrap(), &b).unwrap();
    assert!((t("X1^2") - 1.0).norm() < 1e-14);
    assert!((t("X1^4") - 2.0).norm() < 1e-14);
    assert!(t("X1*Y1").norm() < 1e-14);
    assert!((t("X1*Y1*X1*Y2") - 2.25).norm() < 1e-14);
}

#[test]
fn schwinger_dyson_examples() {
    let tr = ExactFreeTrace::free();
    for q in ["X1", "X1^2", "X1^3", "X1*X2*X1*X2 + 3*X2^2*X1"] {
        let p = parse_polynomial(q, Alphabet::new(2, 0)).unwrap();
        for i in 1..=2 {
            assert_eq!(sd_residual(&tr, &p, i).unwrap(), Coeff::default(), "{q}, i={i}");
        }
    }
}
