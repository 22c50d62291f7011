//! Seeded random generators shared by the randomized verifiers and test-instance builders.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::couple::CoupleVector;

pub type Prng = ChaCha8Rng;

pub fn rng(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut Prng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_normal(rng: &mut Prng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform(rng: &mut Prng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

pub fn complex_vector(rng: &mut Prng, n: usize) -> CoupleVector {
    CoupleVector::new((0..n).map(|_| complex_normal(rng)).collect()).expect("finite samples")
}

pub fn real_vector(rng: &mut Prng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn complex_matrix(rng: &mut Prng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Strictly increasing log-uniform weights in `[lo, hi]` whose consecutive ratios exceed
/// `min_ratio`.
pub fn distinct_weights(rng: &mut Prng, n: usize, lo: f64, hi: f64, min_ratio: f64) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..n).map(|_| log_uniform(rng, lo, hi)).collect();
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if w.windows(2).all(|p| p[1] > p[0] * min_ratio) {
            return w;
        }
    }
}

/// Random Hermitian positive definite matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn positive_definite(rng: &mut Prng, n: usize, lo: f64, hi: f64) -> DMatrix<Complex64> {
    let q = random_unitary(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        Complex64::new(log_uniform(rng, lo, hi), 0.0)
    }));
    let m = &q * d * q.adjoint();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-like unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut Prng, n: usize) -> DMatrix<Complex64> {
    let g = complex_matrix(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) }
    }));
    q * phases
}

/// A random pair `(x, y)` with `y` strictly dominated by `x` on the default grid: the
/// largest ratio `k(t, y) / k(t, x)` equals `1 / margin`.
pub fn dominated_pair(rng: &mut Prng, lambda: &crate::couple::WeightVector, margin: f64) -> (CoupleVector, CoupleVector) {
    let n = lambda.len();
    let x = complex_vector(rng, n);
    let y = complex_vector(rng, n);
    let report = crate::calderon::check_domination(&x, &y, lambda, &crate::couple::TimeGrid::default())
        .expect("nonzero sample");
    let s = (1.0 / (report.max_ratio * margin)).sqrt();
    let y = CoupleVector::new(y.coords().iter().map(|z| z * s).collect()).expect("finite samples");
    (x, y)
}
