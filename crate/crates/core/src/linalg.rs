//! Small dense Hermitian helpers: functional calculus and PSD-order tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// `f(M)` for Hermitian `M` through its spectral decomposition.
pub fn apply_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, u) = hermitian_eigen(m);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(f(v)))));
    hermitian_part(&(&u * d * u.adjoint()))
}

pub fn diag(values: &[f64]) -> CMatrix {
    DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0[0]
}

/// Result of a tolerance-relative PSD test of a Hermitian difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub min_eigenvalue: f64,
    pub norm: f64,
    pub pass: bool,
}

/// `diff >= 0` up to `min eig >= -tol (1 + ||diff||)` on the symmetrized difference.
pub fn psd_check(diff: &CMatrix, tol: f64) -> PsdCheck {
    let (values, _) = hermitian_eigen(diff);
    let min = values[0];
    let norm = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    PsdCheck { min_eigenvalue: min, norm, pass: min >= -tol * (1.0 + norm) }
}

/// Kronecker product `a (x) b` in the i-major ordering.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |r, k| a[(r / br, k / bc)] * b[(r % br, k % bc)])
}

/// Solves `min ||a x - b||` by a rank-revealing SVD with relative cutoff `rcond`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    svd.solve(b, rcond * smax).expect("svd with both factors")
}
