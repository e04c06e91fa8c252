use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Complex matrix product through three real products (Gauss); much faster
/// than the generic complex kernel.
pub fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "cmul dimension mismatch");
    if a.nrows() <= 8 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let k1 = (&ar + &ai) * &br;
    let k2 = &ar * (&bi - &br);
    let k3 = &ai * (&br + &bi);
    let re = &k1 - &k3;
    let im = &k1 + &k2;
    // k1 = (ar + ai) br, re = ar br - ai bi, im = ar bi + ai br
    CMatrix::from_fn(a.nrows(), b.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

fn split(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

/// `Tr(AB)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Largest entrywise distance between `m` and its adjoint.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Checks that `m` is square and Hermitian up to `tol` relative to its size.
pub fn check_hermitian(name: &str, m: &CMatrix, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{name} is {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let d = hermitian_defect(m);
    if d > tol * scale {
        return Err(Error::NonHermitian(name.to_string(), d));
    }
    Ok(())
}

/// Eigenvalues (ascending) of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `f(m)` for the Hermitian part of `m`, through its eigendecomposition.
pub fn spectral_apply(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let eig = symmetrize(m).symmetric_eigen();
    let vals: DVector<Complex64> = eig.eigenvalues.map(&f);
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= vals[j];
    }
    cmul(&scaled, &v.adjoint())
}

/// `exp(i theta m)` for Hermitian `m`.
pub fn exp_i(m: &CMatrix, theta: f64) -> CMatrix {
    if theta == 0.0 {
        return CMatrix::identity(m.nrows(), m.ncols());
    }
    spectral_apply(m, |x| Complex64::from_polar(1.0, theta * x))
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        CMatrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    #[test]
    fn fast_product_matches_naive() {
        let a = sample(20, 1);
        let b = sample(20, 2);
        assert!((cmul(&a, &b) - &a * &b).norm() < 1e-12);
        assert!((trace_of_product(&a, &b) - (&a * &b).trace()).norm() < 1e-12);
    }

    #[test]
    fn exponential_is_unitary_and_matches_series() {
        let h = symmetrize(&sample(6, 3));
        let u = exp_i(&h, 0.7);
        assert!((&u * u.adjoint() - CMatrix::identity(6, 6)).norm() < 1e-12);
        let mut term = CMatrix::identity(6, 6);
        let mut series = term.clone();
        let ih = &h * Complex64::new(0.0, 0.7);
        for k in 1..40 {
            term = &term * &ih / Complex64::new(k as f64, 0.0);
            series += &term;
        }
        assert!((u - series).norm() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        assert!(check_hermitian("Y1", &sample(4, 5), 1e-10).is_err());
        assert!(check_hermitian("X1", &symmetrize(&sample(4, 5)), 1e-10).is_ok());
    }
}
