//! Randomized checks of matrix-order inequalities. A pass only records that no sampled
//! instance violated the inequality; a violation carries the matrices that exhibit it.

use rand::Rng;

use crate::couple::{spectral_norm, WeightVector};
use crate::error::{Error, Result};
use crate::linalg::{apply_function, c, diag, hermitian_eigen, kron, psd_check, CMatrix};
use crate::random::{complex_matrix, positive_definite, rng, Prng};

/// Relative tolerance of every PSD test in this module.
pub const PSD_TOL: f64 = 1e-9;

/// The matrices behind a violated inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum Counterexample {
    /// A map `T` with `T* h(A) T <= h(A)` failing.
    Map(CMatrix),
    /// `A1 <= A2` with `h(A1) <= h(A2)` failing, or a Hansen pair `(A, T)`.
    Pair(CMatrix, CMatrix),
    /// Jensen's inequality failing for `weight A1 + (1 - weight) A2`.
    Combination { a1: CMatrix, a2: CMatrix, weight: f64 },
}

/// Result of a randomized order test.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub trials_run: usize,
    /// Smallest eigenvalue of the tested difference over all trials.
    pub worst_min_eigenvalue: f64,
    pub counterexample: Option<Counterexample>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    fn new() -> Self {
        Self { trials_run: 0, worst_min_eigenvalue: f64::INFINITY, counterexample: None }
    }

    /// Records one difference; returns `true` if it violates the order.
    fn record(&mut self, diff: &CMatrix, witness: impl FnOnce() -> Counterexample) -> bool {
        self.trials_run += 1;
        let check = psd_check(diff, PSD_TOL);
        self.worst_min_eigenvalue = self.worst_min_eigenvalue.min(check.min_eigenvalue);
        if !check.pass {
            self.counterexample = Some(witness());
        }
        !check.pass
    }
}

/// `h(M)` for Hermitian `M`, with eigenvalues clipped at zero against rounding.
pub fn matrix_function(h: &impl Fn(f64) -> f64, m: &CMatrix) -> CMatrix {
    apply_function(m, |v| h(v.max(0.0)))
}

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    Ok(())
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
    }
    Ok(())
}

/// Scales `t` so that `max(||T||, ||A^{1/2} T A^{-1/2}||) = 1` for `A = diag(lambda)`.
pub fn normalize_map(t: &CMatrix, lambda: &[f64]) -> Result<CMatrix> {
    let sq: Vec<f64> = lambda.iter().map(|l| l.sqrt()).collect();
    let weighted = CMatrix::from_fn(t.nrows(), t.ncols(), |i, k| t[(i, k)] * (sq[i] / sq[k]));
    let s = spectral_norm(t)?.max(spectral_norm(&weighted)?);
    if s == 0.0 {
        return Err(Error::InvalidArgument("zero map cannot be normalized".into()));
    }
    Ok(t * c(1.0 / s))
}

/// Checks `T* h(A) T <= h(A)` for `A = diag(lambda)` and random `T` normalized so that
/// `max(||T||, ||T||_A) = 1`.
pub fn exact_interp_randomized_test(
    h: impl Fn(f64) -> f64,
    lambda: &WeightVector,
    trials: usize,
    seed: u64,
) -> Result<OrderReport> {
    exact_interp_test_with_candidates(h, lambda, &[], trials, seed)
}

/// As [`exact_interp_randomized_test`], trying the given maps (after normalization) before the
/// random ones.
pub fn exact_interp_test_with_candidates(
    h: impl Fn(f64) -> f64,
    lambda: &WeightVector,
    candidates: &[CMatrix],
    trials: usize,
    seed: u64,
) -> Result<OrderReport> {
    require_trials(trials)?;
    let lam = lambda.values();
    let n = lam.len();
    let ha = diag(&lam.iter().map(|&l| h(l)).collect::<Vec<_>>());
    let mut rng = rng(seed);
    let mut report = OrderReport::new();
    for cand in candidates {
        if cand.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, got: cand.nrows() });
        }
        let t = normalize_map(cand, lam)?;
        if report.record(&(&ha - t.adjoint() * &ha * &t), || Counterexample::Map(t.clone())) {
            return Ok(report);
        }
    }
    for _ in 0..trials {
        let t = normalize_map(&complex_matrix(&mut rng, n, n), lam)?;
        if report.record(&(&ha - t.adjoint() * &ha * &t), || Counterexample::Map(t.clone())) {
            break;
        }
    }
    Ok(report)
}

/// Embeds a pair `A1 <= A2` as `A = diag(A2, A1) + shift` with the map `T0 = [[0, 0], [1, 0]]`,
/// which satisfies `T0* T0 <= 1` and `T0* A T0 <= A`. Returns the eigenvalues of `A` as weights
/// and `T0` written in the eigenbasis of `A`.
pub fn monotone_embedding(a1: &CMatrix, a2: &CMatrix, shift: f64) -> Result<(WeightVector, CMatrix)> {
    let n = a1.nrows();
    if a1.shape() != (n, n) || a2.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: a2.nrows() });
    }
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(a2);
    a.view_mut((n, n), (n, n)).copy_from(a1);
    for i in 0..2 * n {
        a[(i, i)] += shift;
    }
    let mut t0 = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        t0[(n + i, i)] = c(1.0);
    }
    let (values, u) = hermitian_eigen(&a);
    let weights = WeightVector::new(values)?;
    if !weights.is_sorted_strict() {
        return Err(Error::InvalidArgument("embedded operator has a repeated eigenvalue".into()));
    }
    Ok((weights, u.adjoint() * t0 * u))
}

/// A random `B >= 0` of rank at most `n`.
fn random_psd(rng: &mut Prng, n: usize) -> CMatrix {
    let g = complex_matrix(rng, n, n);
    let b = &g * g.adjoint();
    (&b + b.adjoint()) * c(0.5)
}

/// The pair `[[1, 1], [1, 1]] <= [[2, 1], [1, 1]]` plus `0.01`, padded by the identity.
fn classic_pair(n: usize) -> (CMatrix, CMatrix) {
    let mut a1 = CMatrix::identity(n, n);
    let mut a2 = CMatrix::identity(n, n);
    for (i, j, v1, v2) in [(0, 0, 1.01, 2.01), (0, 1, 1.0, 1.0), (1, 0, 1.0, 1.0), (1, 1, 1.01, 1.01)] {
        a1[(i, j)] = c(v1);
        a2[(i, j)] = c(v2);
    }
    (a1, a2)
}

/// Checks `h(A1) <= h(A2)` for random `A2 > 0` and `A1 = A2 - B` with `B >= 0` scaled to keep
/// `A1 > 0`. For `n >= 2` the first trial is the classic non-commuting pair.
pub fn matrix_monotone_test(h: impl Fn(f64) -> f64, n: usize, trials: usize, seed: u64) -> Result<OrderReport> {
    require_dim(n)?;
    require_trials(trials)?;
    let mut rng = rng(seed);
    let mut report = OrderReport::new();
    for trial in 0..trials {
        let (a1, a2) = if trial == 0 && n >= 2 {
            classic_pair(n)
        } else {
            let a2 = positive_definite(&mut rng, n, 1e-2, 1e2);
            let b = random_psd(&mut rng, n);
            let (lo, hi) = (hermitian_eigen(&a2).0[0], hermitian_eigen(&b).0[n - 1]);
            let u: f64 = rng.random_range(0.05..0.95);
            (&a2 - &b * c(u * lo / hi), a2)
        };
        let diff = matrix_function(&h, &a2) - matrix_function(&h, &a1);
        if report.record(&diff, || Counterexample::Pair(a1.clone(), a2.clone())) {
            break;
        }
    }
    Ok(report)
}

/// Checks `w h(A1) + (1 - w) h(A2) <= h(w A1 + (1 - w) A2)` for random `A1, A2 > 0`, `w in (0, 1)`.
pub fn matrix_concavity_test(h: impl Fn(f64) -> f64, n: usize, trials: usize, seed: u64) -> Result<OrderReport> {
    require_dim(n)?;
    require_trials(trials)?;
    let mut rng = rng(seed);
    let mut report = OrderReport::new();
    for _ in 0..trials {
        let a1 = positive_definite(&mut rng, n, 1e-2, 1e2);
        let a2 = positive_definite(&mut rng, n, 1e-2, 1e2);
        let w: f64 = rng.random_range(0.01..0.99);
        let mix = &a1 * c(w) + &a2 * c(1.0 - w);
        let diff = matrix_function(&h, &mix) - matrix_function(&h, &a1) * c(w) - matrix_function(&h, &a2) * c(1.0 - w);
        if report.record(&diff, || Counterexample::Combination { a1: a1.clone(), a2: a2.clone(), weight: w }) {
            break;
        }
    }
    Ok(report)
}

/// Checks Hansen's inequality `T* h(A) T <= h(T* A T)` for random `A > 0` and `||T|| <= 1`.
pub fn hansen_test(h: impl Fn(f64) -> f64, n: usize, trials: usize, seed: u64) -> Result<OrderReport> {
    require_dim(n)?;
    require_trials(trials)?;
    let mut rng = rng(seed);
    let mut report = OrderReport::new();
    for _ in 0..trials {
        let a = positive_definite(&mut rng, n, 1e-2, 1e2);
        let g = complex_matrix(&mut rng, n, n);
        let t = &g * c(rng.random_range(0.2..1.0) / spectral_norm(&g)?);
        let tat = t.adjoint() * &a * &t;
        let diff = matrix_function(&h, &tat) - t.adjoint() * matrix_function(&h, &a) * &t;
        if report.record(&diff, || Counterexample::Pair(a.clone(), t.clone())) {
            break;
        }
    }
    Ok(report)
}

/// The diagonal matrix `h(A1, A2)` on the tensor product, entries `h(lambda_i, mu_j)` with `i`
/// the major index.
pub fn two_var_apply(h: impl Fn(f64, f64) -> f64, a1: &WeightVector, a2: &WeightVector) -> CMatrix {
    let values: Vec<f64> = a1.values().iter().flat_map(|&l| a2.values().iter().map(move |&m| (l, m))).map(|(l, m)| h(l, m)).collect();
    diag(&values)
}

/// `h(B1, B2) = (U1 (x) U2) diag(h(mu_i, nu_j)) (U1 (x) U2)*` for Hermitian `B1, B2`.
fn two_var_function(h: &impl Fn(f64, f64) -> f64, b1: &CMatrix, b2: &CMatrix) -> CMatrix {
    let (v1, u1) = hermitian_eigen(b1);
    let (v2, u2) = hermitian_eigen(b2);
    let d: Vec<f64> = v1.iter().flat_map(|&l| v2.iter().map(move |&m| (l, m))).map(|(l, m)| h(l.max(0.0), m.max(0.0))).collect();
    let u = kron(&u1, &u2);
    let m = &u * diag(&d) * u.adjoint();
    (&m + m.adjoint()) * c(0.5)
}

/// Counterexample for a two-variable test: the maps `(T1, T2)` or the pairs of the monotonicity
/// check.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoVarCounterexample {
    Maps(CMatrix, CMatrix),
    Pairs { a1: CMatrix, a1_prime: CMatrix, a2: CMatrix, a2_prime: CMatrix },
}

/// Outcome of one part of [`two_var_interp_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoVarPart {
    pub trials_run: usize,
    pub worst_min_eigenvalue: f64,
    pub counterexample: Option<TwoVarCounterexample>,
}

impl TwoVarPart {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    fn new() -> Self {
        Self { trials_run: 0, worst_min_eigenvalue: f64::INFINITY, counterexample: None }
    }

    fn record(&mut self, diff: &CMatrix, witness: impl FnOnce() -> TwoVarCounterexample) {
        if self.counterexample.is_some() {
            return;
        }
        self.trials_run += 1;
        let check = psd_check(diff, PSD_TOL);
        self.worst_min_eigenvalue = self.worst_min_eigenvalue.min(check.min_eigenvalue);
        if !check.pass {
            self.counterexample = Some(witness());
        }
    }
}

/// The three parts of [`two_var_interp_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct TwoVarReport {
    /// `H + K* H K - (T1 (x) 1)* H (T1 (x) 1) - (1 (x) T2)* H (1 (x) T2) >= 0` with `K = T1 (x) T2`.
    pub four_term: TwoVarPart,
    /// The same with one of the maps set to zero.
    pub separate: TwoVarPart,
    /// `h(A1', A2') - h(A1', A2) - h(A1, A2') + h(A1, A2) >= 0` for random `A_j <= A_j'`.
    pub monotone: TwoVarPart,
}

impl TwoVarReport {
    pub fn passed(&self) -> bool {
        self.four_term.passed() && self.separate.passed() && self.monotone.passed()
    }
}

/// Randomized checks of the two-variable interpolation inequality, its one-variable reductions
/// and two-variable matrix monotonicity, with `A1 = diag(a1)` and `A2 = diag(a2)`.
pub fn two_var_interp_test(
    h: impl Fn(f64, f64) -> f64,
    a1: &WeightVector,
    a2: &WeightVector,
    trials: usize,
    seed: u64,
) -> Result<TwoVarReport> {
    require_trials(trials)?;
    let (n1, n2) = (a1.len(), a2.len());
    let hm = two_var_apply(&h, a1, a2);
    let (i1, i2) = (CMatrix::identity(n1, n1), CMatrix::identity(n2, n2));
    let conj = |m: &CMatrix| m.adjoint() * &hm * m;
    let mut rng = rng(seed);
    let mut four_term = TwoVarPart::new();
    let mut separate = TwoVarPart::new();
    let mut monotone = TwoVarPart::new();
    for _ in 0..trials {
        let t1 = normalize_map(&complex_matrix(&mut rng, n1, n1), a1.values())?;
        let t2 = normalize_map(&complex_matrix(&mut rng, n2, n2), a2.values())?;
        let k1 = kron(&t1, &i2);
        let k2 = kron(&i1, &t2);
        let diff = &hm + conj(&kron(&t1, &t2)) - conj(&k1) - conj(&k2);
        four_term.record(&diff, || TwoVarCounterexample::Maps(t1.clone(), t2.clone()));
        let zero1 = CMatrix::zeros(n1, n1);
        let zero2 = CMatrix::zeros(n2, n2);
        separate.record(&(&hm - conj(&k1)), || TwoVarCounterexample::Maps(t1.clone(), zero2));
        separate.record(&(&hm - conj(&k2)), || TwoVarCounterexample::Maps(zero1, t2.clone()));

        let (b1, b1p) = ordered_pair(&mut rng, n1);
        let (b2, b2p) = ordered_pair(&mut rng, n2);
        let diff = two_var_function(&h, &b1p, &b2p) - two_var_function(&h, &b1p, &b2) - two_var_function(&h, &b1, &b2p)
            + two_var_function(&h, &b1, &b2);
        monotone.record(&diff, || TwoVarCounterexample::Pairs {
            a1: b1.clone(),
            a1_prime: b1p.clone(),
            a2: b2.clone(),
            a2_prime: b2p.clone(),
        });
    }
    Ok(TwoVarReport { four_term, separate, monotone })
}

/// Random `0 < A <= A'`.
fn ordered_pair(rng: &mut Prng, n: usize) -> (CMatrix, CMatrix) {
    let ap = positive_definite(rng, n, 1e-1, 1e1);
    let b = random_psd(rng, n);
    let (lo, hi) = (hermitian_eigen(&ap).0[0], hermitian_eigen(&b).0[n - 1]);
    let u: f64 = rng.random_range(0.05..0.95);
    (&ap - &b * c(u * lo / hi), ap)
}
