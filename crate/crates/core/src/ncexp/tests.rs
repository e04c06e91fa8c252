use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::*;
use crate::coeff::Coeff;
use crate::ncalg::{nc_derivative, parse_polynomial, Alphabet, Letter, NcPolynomial};
use crate::quadrature::GaussLegendre;
use crate::rmt::{eval_polynomial, symmetrize, CMatrix};

fn exp_x(scale: ScalarExpr) -> FAtom {
    FAtom::Exp(ExpAtom { scale, base: NcPolynomial::x(1) })
}

fn p(k: u32) -> ScalarExpr {
    ScalarExpr::param(ParamName(k))
}

fn om(k: u32) -> ScalarExpr {
    ScalarExpr::one_minus(ParamName(k))
}

fn iy() -> ScalarExpr {
    &ScalarExpr::fourier() * &ScalarExpr::constant(Coeff::i())
}

fn e_ix() -> FPoly {
    FPoly::exp(ScalarExpr::one(), NcPolynomial::x(1), 0).unwrap()
}

fn test_matrix(n: usize, seed: u64, scale: f64) -> CMatrix {
    let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let m = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
    let h = symmetrize(&m);
    let norm = crate::rmt::op_norm(&h);
    h * Complex64::new(scale / norm, 0.0)
}

#[test]
fn derivative_of_exponential() {
    let t = param_derivative(&e_ix(), &Selector::x(1), ParamName(0));
    let mut expect = MultiTensor::zero(2);
    expect.add_term(vec![vec![exp_x(p(0))], vec![exp_x(om(0))]], iy());
    assert_eq!(t, expect);
    assert!(param_derivative(&e_ix(), &Selector::x(2), ParamName(0)).is_zero());
}

#[test]
fn polynomial_derivative_ignores_parameter() {
    let q = parse_polynomial("X1^2*X2 - 3*X2*X1", Alphabet::new(2, 0)).unwrap();
    let t = param_derivative(&FPoly::from(&q), &Selector::x(1), ParamName(7));
    assert!(t.params().is_empty());
    let d = nc_derivative(&q, 1);
    assert_eq!(t.num_terms(), d.num_terms());
    for (a, b, c) in d.terms() {
        let key = vec![expr::letters_to_fword(a), expr::letters_to_fword(b)];
        assert!(t.terms().any(|(k, v)| *k == key && v.as_constant() == Some(c.clone())));
    }
}

#[test]
fn chain_d_then_partial_on_exponential() {
    let (a, b) = (0, 1);
    let steps = [ChainStep::Cyclic { sel: Selector::x(1), leg: 0 }, ChainStep::Partial { sel: Selector::x(1), leg: 0 }];
    let r = compose_chain(&e_ix(), &steps, &mut ParamSupply::new()).unwrap();
    assert_eq!(r.params, vec![ParamName(a), ParamName(b)]);
    // -y^2 [ (1-a) e^{(1-a)b} (x) e^{(1-a)(1-b)} e^{a} + a e^{(1-a)} e^{ab} (x) e^{a(1-b)} ]
    let minus_y2 = &iy() * &iy();
    let mut expect = MultiTensor::zero(2);
    expect.add_term(
        vec![vec![exp_x(&om(a) * &p(b))], vec![exp_x(&om(a) * &om(b)), exp_x(p(a))]],
        &minus_y2 * &om(a),
    );
    expect.add_term(vec![vec![exp_x(om(a)), exp_x(&p(a) * &p(b))], vec![exp_x(&p(a) * &om(b))]], &minus_y2 * &p(a));
    assert_eq!(r.value, expect);
}

#[test]
fn empty_chain_is_identity_and_bad_leg_fails() {
    let e = e_ix();
    let r = compose_chain(&e, &[], &mut ParamSupply::new()).unwrap();
    assert_eq!(r.value.to_fpoly().unwrap(), e);
    let bad = [ChainStep::Partial { sel: Selector::x(1), leg: 1 }];
    assert!(matches!(compose_chain(&e, &bad, &mut ParamSupply::new()), Err(crate::Error::MalformedChain(_))));
}

#[test]
fn each_derivative_step_gets_a_fresh_parameter() {
    let e = e_ix();
    for n in 1..=4 {
        let steps: Vec<ChainStep> = (0..n).map(|k| ChainStep::Partial { sel: Selector::x(1), leg: k }).collect();
        let r = compose_chain(&e, &steps, &mut ParamSupply::new()).unwrap();
        let distinct: std::collections::BTreeSet<_> = r.params.iter().collect();
        assert_eq!(distinct.len(), n);
        assert!(r.value.params().len() <= n);
    }
}

fn four_bindings() -> Vec<LetterMap> {
    // legs [A1, A2, B1, B2] bound to x, w, z, y: letter X_k of binding b goes to X_{2b + k}
    // with w = 0, x = 1, y = 2, z = 3
    let b = |slot: u32| -> LetterMap { (1..=2).map(|k| (Letter::x(k), Letter::x(2 * slot + k))).collect() };
    vec![b(1), b(0), b(3), b(2)]
}

#[test]
fn example_quantity_with_four_bindings() {
    let q = parse_polynomial("X2*X1*X2^2*X1^2", Alphabet::new(2, 0)).unwrap();
    let steps = [
        ChainStep::Cyclic { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(2), leg: 0 },
        ChainStep::Partial { sel: Selector::x(2), leg: 2 },
        ChainStep::Contract { order: vec![1, 0, 3, 2], bindings: four_bindings() },
    ];
    let r = compose_chain(&FPoly::from(&q), &steps, &mut ParamSupply::new()).unwrap();
    let got = r.value.to_fpoly().unwrap().to_polynomial().unwrap();
    // w_k = X_k, x_k = X_{2+k}, y_k = X_{4+k}, z_k = X_{6+k}
    let expect = parse_polynomial("X4*X7 + X2*X7 + X2*X1 + X1*X4 + X3*X6 + X3*X8 + X6*X5 + X5*X8", Alphabet::new(8, 0)).unwrap();
    assert_eq!(got, expect);
}

#[test]
fn contraction_requires_bindings() {
    let t = param_derivative(&FPoly::from(&NcPolynomial::x(1).pow(3)), &Selector::x(1), ParamName(0));
    let err = boxtimes_contract(&t, &[1, 0], &[LetterMap::new(), LetterMap::new()]).unwrap_err();
    assert!(matches!(err, crate::Error::UnboundLetter(_)));
    assert!(boxtimes_contract(&t, &[0, 0], &[LetterMap::new(), LetterMap::new()]).is_err());
    // all letters to one letter: counts surviving terms as a polynomial
    let id: LetterMap = [(Letter::x(1), Letter::x(1))].into_iter().collect();
    let c = boxtimes_contract(&t, &[1, 0], &[id.clone(), id]).unwrap().to_polynomial().unwrap();
    assert_eq!(c, NcPolynomial::x(1).pow(2).scale(&Coeff::from_int(3)));
}

/// Value of the four-parameter integrand printed for the exponential example
/// when every exponential is the identity.
fn printed_integrand_at_zero(a: f64, b: f64, _e: f64, _g: f64) -> f64 {
    (1.0 - a).powi(2) * b * (a + (1.0 - a) * (1.0 - b)) + ((1.0 - a) + a * b) * a * a * (1.0 - b)
}

#[test]
fn exponential_example_at_zero_bindings() {
    // oracle: quadrature of the printed integrand
    let g = GaussLegendre::new(12);
    let mut oracle = 0.0;
    for (a, wa) in g.nodes.iter().zip(&g.weights) {
        for (b, wb) in g.nodes.iter().zip(&g.weights) {
            oracle += wa * wb * printed_integrand_at_zero(*a, *b, 0.0, 0.0);
        }
    }
    let steps = [
        ChainStep::Cyclic { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(1), leg: 0 },
        ChainStep::Partial { sel: Selector::x(1), leg: 2 },
        ChainStep::Contract {
            order: vec![1, 0, 3, 2],
            bindings: (0..4).map(|k| [(Letter::x(1), Letter::x(k + 1))].into_iter().collect()).collect(),
        },
    ];
    let r = compose_chain(&e_ix(), &steps, &mut ParamSupply::new()).unwrap();
    let value = r.value.to_fpoly().unwrap();
    let zero: BTreeMap<Letter, CMatrix> = (1..=4).map(|k| (Letter::x(k), DMatrix::zeros(1, 1))).collect();
    let lambda = 1.3;
    let v = integrate_params(&r.params, 8, |pv| evaluate_numeric(&value, &zero, pv, lambda)).unwrap();
    let expect = lambda.powi(4) * oracle;
    assert!((v[(0, 0)] - Complex64::new(expect, 0.0)).norm() < 1e-12, "{} vs {expect}", v[(0, 0)]);
}

#[test]
fn zero_scale_exponential_is_identity() {
    let e = FPoly::exp(ScalarExpr::zero(), NcPolynomial::x(1), 0).unwrap();
    let bind: BTreeMap<Letter, CMatrix> = [(Letter::x(1), test_matrix(4, 1, 1.0))].into_iter().collect();
    let v = evaluate_numeric(&e, &bind, &|_| 0.5, 2.0).unwrap();
    assert!((v - CMatrix::identity(4, 4)).norm() < 1e-12);
}

#[test]
fn evaluation_is_multiplicative_and_extends_polynomials() {
    let alpha = Alphabet::new(2, 1);
    let e1 = parse_fexpression("X1*exp(i*2*X2) + Y1*exp(i*p0*(X1 + X2))", alpha).unwrap();
    let e2 = parse_fexpression("exp(i*1/2*(X1*X2 + X2*X1)) - 3*X2", alpha).unwrap();
    let mut bind: BTreeMap<Letter, CMatrix> = BTreeMap::new();
    bind.insert(Letter::x(1), test_matrix(3, 2, 1.0));
    bind.insert(Letter::x(2), test_matrix(3, 3, 1.0));
    bind.insert(Letter::y(1), test_matrix(3, 4, 1.0) * Complex64::new(0.3, 0.7));
    bind.insert(Letter::y(2), bind[&Letter::y(1)].adjoint());
    let pv = |_: ParamName| 0.3;
    let lhs = evaluate_numeric(&e1.mul(&e2), &bind, &pv, 0.8).unwrap();
    let rhs = evaluate_numeric(&e1, &bind, &pv, 0.8).unwrap() * evaluate_numeric(&e2, &bind, &pv, 0.8).unwrap();
    assert!((lhs - rhs).norm() < 1e-12);

    let q = parse_polynomial("X1*Y1*X2 - 2*Y2^2 + i", alpha).unwrap();
    let a = evaluate_numeric(&FPoly::from(&q), &bind, &pv, 0.8).unwrap();
    assert!((a - eval_polynomial(&q, &bind).unwrap()).norm() < 1e-12);
}

#[test]
fn rejects_non_hermitian_letter() {
    let bad = test_matrix(3, 5, 1.0) * Complex64::new(0.0, 1.0) + CMatrix::identity(3, 3);
    let bind: BTreeMap<Letter, CMatrix> = [(Letter::x(1), bad)].into_iter().collect();
    let err = evaluate_numeric(&FPoly::letter(Letter::x(1)), &bind, &|_| 0.0, 1.0).unwrap_err();
    assert!(matches!(err, crate::Error::NonHermitian(..)));
}

#[test]
fn derivative_of_exponential_matches_series() {
    // sum_k d((iP)^k)/k! against the parameter integral of d_{a} e^{iP}
    let alpha = Alphabet::new(2, 0);
    let pol = parse_polynomial("X1*X2 + X2*X1 + 1/2*X1", alpha).unwrap();
    let mut bind: BTreeMap<Letter, CMatrix> = BTreeMap::new();
    bind.insert(Letter::x(1), test_matrix(3, 7, 0.5));
    bind.insert(Letter::x(2), test_matrix(3, 8, 0.5));
    let pz = eval_polynomial(&pol, &bind).unwrap();
    assert!(crate::rmt::op_norm(&pz) <= 1.0);

    // d(P^k) = sum_j (P^j (x) 1) dP (1 (x) P^{k-1-j}), evaluated with matrices
    let mut dp = CMatrix::zeros(9, 9);
    for (a, b, c) in nc_derivative(&pol, 1).terms() {
        let ma = eval_polynomial(&NcPolynomial::monomial(c.clone(), a.clone()), &bind).unwrap();
        let mb = eval_polynomial(&NcPolynomial::monomial(Coeff::from_int(1), b.clone()), &bind).unwrap();
        dp += ma.kronecker(&mb);
    }
    let id = CMatrix::identity(3, 3);
    let powers: Vec<CMatrix> = (0..30).scan(id.clone(), |acc, _| {
        let cur = acc.clone();
        *acc = &*acc * &pz;
        Some(cur)
    }).collect();
    let mut series = CMatrix::zeros(9, 9);
    let mut fact = 1.0;
    for k in 1..=30usize {
        fact *= k as f64;
        let ik = Complex64::new(0.0, 1.0).powu(k as u32);
        for j in 0..k {
            let term = powers[j].kronecker(&id) * &dp * id.kronecker(&powers[k - 1 - j]);
            series += term * (ik / fact);
        }
    }
    let e = FPoly::exp(ScalarExpr::one(), pol, 0).unwrap();
    let t = param_derivative(&e, &Selector::x(1), ParamName(0));
    let integral = integrate_params(&[ParamName(0)], 24, |pv| evaluate_tensor(&t, &bind, pv, 1.0)).unwrap();
    assert!((series - integral).norm() < 1e-8);
}

#[test]
fn duhamel_examples() {
    let a = test_matrix(4, 11, 1.0);
    assert!(duhamel_residual(&a, &a, 2).unwrap() < 1e-12);
    let zero = CMatrix::zeros(1, 1);
    let one = CMatrix::identity(1, 1);
    assert!(duhamel_residual(&zero, &one, 32).unwrap() < 1e-10);
    let b = test_matrix(4, 12, 1.0);
    let r64 = duhamel_residual(&a, &b, 64).unwrap();
    let r2 = duhamel_residual(&a, &b, 2).unwrap();
    assert!(r64 < 1e-8 && r64 <= r2, "{r64} {r2}");
    assert!(duhamel_residual(&a, &one, 4).is_err());
}

#[test]
fn json_round_trip_of_trees() {
    let e = parse_fexpression("2*X1*exp(i*3/2*p4*X1) - i*Y1*Y2 + exp(i*X1^2)", Alphabet::new(1, 1)).unwrap();
    let tree = e.to_tree();
    let s = serde_json::to_string(&tree).unwrap();
    let back: FExpression = serde_json::from_str(&s).unwrap();
    back.validate(1).unwrap();
    assert_eq!(back.normalize(), e);
}

#[test]
fn parser_rejects_non_self_adjoint_exponent() {
    assert!(parse_fexpression("exp(i*X1*X2)", Alphabet::new(2, 0)).is_err());
    assert!(parse_fexpression("exp(i*Y1)", Alphabet::new(0, 1)).is_err());
    assert!(parse_fexpression("exp(i*Y1 + Y2)", Alphabet::new(0, 1)).is_ok());
    assert!(parse_fexpression("exp(X1)", Alphabet::new(1, 0)).is_err());
}
