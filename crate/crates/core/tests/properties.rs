use std::collections::BTreeSet;

use proptest::prelude::*;
use topexp::expansion::{build_j, depth_in, finite_n_expectation, fit_expansion, genus_oracle, Cell, Observation};
use topexp::freemoments::{catalan, sd_residual, ExactFreeTrace, TraceFunctional};
use topexp::ncalg::{cyclic_derivative, nc_derivative, tensor_apply, TensorAction};
use topexp::quadrature::GaussLegendre;
use topexp::rmt::{eval_polynomial, h_step, jackknife_mean, op_norm, sample_gue_family, MatrixBinding, SpectralFunctionSpec};
use topexp::{Coeff, Letter, NcPolynomial, TensorPoly, Word};

fn word(letters: Vec<Letter>) -> Word {
    Word(letters)
}

/// Letters `X1..X{d}` and, when `r > 0`, `Y1..Y{2r}`.
fn letter(d: u32, r: u32) -> impl Strategy<Value = Letter> {
    (0..d + 2 * r).prop_map(move |k| if k < d { Letter::x(k + 1) } else { Letter::y(k - d + 1) })
}

fn poly(d: u32, r: u32, max_len: usize) -> impl Strategy<Value = NcPolynomial> {
    prop::collection::vec((prop::collection::vec(letter(d, r), 0..=max_len), -3i64..=3, -2i64..=2), 1..4).prop_map(|terms| {
        NcPolynomial::from_terms(terms.into_iter().map(|(w, re, im)| (word(w), Coeff::from_int(re) + Coeff::i() * Coeff::from_int(im))))
    })
}

fn real_poly(d: u32, max_len: usize) -> impl Strategy<Value = NcPolynomial> {
    prop::collection::vec((prop::collection::vec(letter(d, 0), 0..=max_len), -3i64..=3), 1..4)
        .prop_map(|terms| NcPolynomial::from_terms(terms.into_iter().map(|(w, c)| (word(w), Coeff::from_int(c)))))
}

fn one() -> NcPolynomial {
    NcPolynomial::one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_obeys_leibniz(p in poly(2, 1, 3), q in poly(2, 1, 3), i in 1u32..=2) {
        let lhs = nc_derivative(&(&p * &q), i);
        let rhs = &(&nc_derivative(&p, i) * &TensorPoly::simple(&one(), &q)) + &(&TensorPoly::simple(&p, &one()) * &nc_derivative(&q, i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cyclic_derivative_is_multiplied_derivative(p in poly(3, 1, 4), i in 1u32..=3) {
        prop_assert_eq!(cyclic_derivative(&p, i), tensor_apply(&nc_derivative(&p, i), TensorAction::Multiply));
    }

    #[test]
    fn derivative_commutes_with_involution(p in poly(2, 1, 4), i in 1u32..=2) {
        // (dP)* with the legs swapped is d(P*)
        prop_assert_eq!(nc_derivative(&p, i).involution(1).swap(), nc_derivative(&p.involution(1), i));
    }

    #[test]
    fn involution_is_antimultiplicative(p in poly(2, 1, 3), q in poly(2, 1, 3)) {
        prop_assert_eq!(p.involution(1).involution(1), p.clone());
        prop_assert_eq!((&p * &q).involution(1), &q.involution(1) * &p.involution(1));
    }

    #[test]
    fn norm_is_submultiplicative(p in poly(2, 1, 3), q in poly(2, 1, 3), a in 0.5f64..4.0) {
        let (np, nq, npq) = (p.norm_a(a), q.norm_a(a), (&p * &q).norm_a(a));
        prop_assert!(npq <= np * nq * (1.0 + 1e-12));
        prop_assert!((p.involution(1).norm_a(a) - np).abs() <= 1e-12 * np.max(1.0));
        prop_assert!((&p + &q).norm_a(a) <= (np + nq) * (1.0 + 1e-12));
    }

    #[test]
    fn free_trace_is_tracial_and_real_on_adjoints(p in real_poly(3, 4), q in real_poly(3, 4)) {
        let tr = ExactFreeTrace::free();
        prop_assert_eq!(tr.trace(&(&p * &q)).unwrap(), tr.trace(&(&q * &p)).unwrap());
        let s = &p + &p.involution(0);
        prop_assert!(tr.trace(&s).unwrap().is_real());
    }

    #[test]
    fn free_schwinger_dyson_holds(q in real_poly(3, 5), i in 1u32..=3) {
        prop_assert_eq!(sd_residual(&ExactFreeTrace::free(), &q, i).unwrap(), Coeff::default());
    }

    #[test]
    fn genus_table_counts_all_pairings(colors in prop::collection::vec(1u32..=3, 0..=10)) {
        let w = word(colors.iter().map(|c| Letter::x(*c)).collect());
        let t = genus_oracle(&w, u32::MAX).unwrap();
        let total: u64 = t.table.values().sum();
        // color-respecting pairings: product of (m_c - 1)!!
        let expected: u64 = (1..=3).map(|c| {
            let m = colors.iter().filter(|x| **x == c).count() as u64;
            if m % 2 == 1 { 0 } else { (1..m).step_by(2).product::<u64>() }
        }).product();
        prop_assert_eq!(total, expected);
        prop_assert!(t.table.keys().all(|g| 4 * *g as usize <= colors.len()));
        // cyclic rotation does not change the table
        let mut rot = colors.clone();
        rot.rotate_left(colors.len().min(1));
        let r = genus_oracle(&word(rot.iter().map(|c| Letter::x(*c)).collect()), u32::MAX).unwrap();
        prop_assert_eq!(r.table, t.table);
    }

    #[test]
    fn genus_table_matches_entrywise_moments(colors in prop::collection::vec(1u32..=2, 0..=6), n in 1u32..=3) {
        let w = word(colors.iter().map(|c| Letter::x(*c)).collect());
        prop_assert_eq!(genus_oracle(&w, u32::MAX).unwrap().evaluate(n as u64), finite_n_expectation(&w, n).unwrap());
    }

    #[test]
    fn gauss_legendre_is_exact_on_low_degree(n in 1usize..=12, coeffs in prop::collection::vec(-5.0f64..5.0, 1..24), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let deg = (2 * n - 1).min(coeffs.len() - 1);
        let c = &coeffs[..=deg];
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let exact: f64 = c.iter().enumerate().map(|(k, ck)| ck * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0)).sum();
        let got = GaussLegendre::new(n).integrate(a, b, f);
        prop_assert!((got - exact).abs() <= 1e-9 * (1.0 + exact.abs()), "{} vs {}", got, exact);
    }

    #[test]
    fn sampler_streams_are_keyed(n in 1usize..=6, seed in any::<u64>(), replica in 0u64..1000) {
        let a = sample_gue_family(n, 3, seed, replica, 0);
        let b = sample_gue_family(n, 2, seed, replica, 1);
        // matrix k of the family is the same however many are drawn
        prop_assert_eq!(&a[1], &b[0]);
        prop_assert_eq!(&a[2], &b[1]);
        for m in &a {
            prop_assert_eq!(m, &m.adjoint());
        }
    }

    #[test]
    fn spectral_polynomial_matches_evaluation(coeffs in prop::collection::vec(-2.0f64..2.0, 1..5), seed in any::<u64>()) {
        let x = sample_gue_family(6, 1, seed, 0, 0).remove(0);
        let f = SpectralFunctionSpec::Polynomial { coeffs: coeffs.clone() };
        let p = NcPolynomial::from_terms(coeffs.iter().enumerate().map(|(k, c)| {
            (word(vec![Letter::x(1); k]), Coeff::real(num_rational::BigRational::from_float(*c).unwrap()))
        }));
        let bind: MatrixBinding = [(Letter::x(1), x.clone())].into_iter().collect();
        let diff = &f.apply(&x).unwrap() - &eval_polynomial(&p, &bind).unwrap();
        prop_assert!(op_norm(&diff) <= 1e-9);
    }

    #[test]
    fn jackknife_mean_is_the_sample_mean(v in prop::collection::vec(-10.0f64..10.0, 2..50), c in 0.1f64..5.0) {
        let (m, s) = jackknife_mean(&v);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!((m - mean).abs() <= 1e-9);
        // for the mean the jackknife error is the usual standard error
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        prop_assert!((s - (var / v.len() as f64).sqrt()).abs() <= 1e-9 * (1.0 + s));
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!((jackknife_mean(&scaled).1 - c * s).abs() <= 1e-9 * (1.0 + s));
    }

    #[test]
    fn noiseless_series_is_recovered(a in prop::collection::vec(-3.0f64..3.0, 1..=3)) {
        let k = a.len() - 1;
        let obs: Vec<Observation> = [8usize, 12, 16, 24, 32].iter().map(|&n| {
            let x = 1.0 / (n * n) as f64;
            Observation { n, mean: a.iter().rev().fold(0.0, |acc, c| acc * x + c), stderr: 0.0 }
        }).collect();
        let fit = fit_expansion(&obs, k).unwrap();
        for (got, want) in fit.coefficients.iter().zip(&a) {
            prop_assert!((got - want).abs() <= 1e-6 * (1.0 + want.abs()), "{:?} vs {:?}", fit.coefficients, a);
        }
    }

    #[test]
    fn smooth_step_is_monotone(x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(h_step(lo) <= h_step(hi) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&h_step(lo)));
    }
}

#[test]
fn depths_are_consistent_and_children_biject() {
    let fams: Vec<_> = (0..=2).map(|n| build_j(n, false).unwrap()).collect();
    for (n, fam) in fams.iter().enumerate() {
        for s in 1..=fam.c() {
            depth_in(fam, s).unwrap();
        }
        if n == 0 {
            continue;
        }
        let prev = &fams[n - 1];
        assert_eq!(fam.len(), 4 * (2 * n - 1) * prev.len());
        let mut seen = BTreeSet::new();
        for j in 1..=(2 * n as u32 - 1) {
            for branch in 1..=2u8 {
                for tilde in [false, true] {
                    let cell = Cell { j, branch, tilde };
                    for parent in 0..prev.len() {
                        let child = fam.child(cell, parent).unwrap();
                        assert!(seen.insert(child));
                    }
                }
            }
        }
        assert_eq!(seen.len(), fam.len());
        // no list is produced twice
        assert_eq!(fam.lists.iter().collect::<BTreeSet<_>>().len(), fam.len());
    }
}

#[test]
fn catalan_from_oracle() {
    for p in 0..=6u32 {
        let w = word(vec![Letter::x(1); 2 * p as usize]);
        let t = genus_oracle(&w, 0).unwrap();
        assert_eq!(num_bigint::BigUint::from(t.table.get(&0).copied().unwrap_or(0)), catalan(p));
    }
}

#[test]
fn complex_trace_is_conjugated_by_involution() {
    let tr = ExactFreeTrace::free();
    let p = NcPolynomial::from_terms([(word(vec![Letter::x(1), Letter::x(2), Letter::x(1), Letter::x(2)]), Coeff::i()), (word(vec![Letter::x(1); 2]), Coeff::from_int(3))]);
    assert_eq!(tr.trace(&p.involution(0)).unwrap(), tr.trace(&p).unwrap().conj());
}
