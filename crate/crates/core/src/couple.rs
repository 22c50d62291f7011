//! Finite-dimensional weighted Hilbert couples `(l2^n, l2^n(lambda))` and their functionals.
//!
//! A couple is identified with a vector of positive weights `lambda`; elements are complex
//! coordinate vectors in the joint eigenbasis. The closed-form functionals live next to an
//! independent minimization oracle used for cross-checking.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Positive weights `lambda_i` of the diagonal operator `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    sorted_strict: bool,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty weight vector".into()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let sorted_strict = values.windows(2).all(|w| w[0] < w[1]);
        Ok(Self { values, sorted_strict })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_sorted_strict(&self) -> bool {
        self.sorted_strict
    }

    /// Weights multiplied by a positive scalar.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

/// Coordinates of an element of the couple in the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupleVector {
    coords: Vec<Complex64>,
}

impl CoupleVector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("couple vector"));
        }
        Ok(Self { coords })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self { coords: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.norm_sqr() == 0.0)
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.norm()).collect()
    }

    /// `||x||_0^2 = sum |x_i|^2`.
    pub fn norm0_sq(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `||x||_1^2 = sum lambda_i |x_i|^2`.
    pub fn norm1_sq(&self, lambda: &WeightVector) -> Result<f64> {
        check_dim(lambda.len(), self.len())?;
        Ok(self
            .coords
            .iter()
            .zip(lambda.values())
            .map(|(z, l)| l * z.norm_sqr())
            .sum())
    }

    pub fn as_dvector(&self) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(&self.coords)
    }
}

/// A (generally rectangular) complex matrix acting between couples.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n) }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn apply(&self, x: &CoupleVector) -> Result<CoupleVector> {
        check_dim(self.ncols(), x.len())?;
        let y = &self.entries * x.as_dvector();
        Ok(CoupleVector { coords: y.iter().copied().collect() })
    }

    /// Largest absolute imaginary part among the entries.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Entrywise real part.
    pub fn real_part(&self) -> Self {
        Self { entries: self.entries.map(|z| Complex64::new(z.re, 0.0)) }
    }
}

/// Discretization of `t in (0, inf)` used by domination checks, optionally with the closed-form
/// limits at `t = 0` and `t = inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
    pub include_zero_limit: bool,
    pub include_inf_limit: bool,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>, include_zero_limit: bool, include_inf_limit: bool) -> Result<Self> {
        if points.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidArgument("grid points must be finite and positive".into()));
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing".into()));
        }
        Ok(Self { points, include_zero_limit, include_inf_limit })
    }

    /// `count` log-spaced points in `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, count: usize, with_limits: bool) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(Error::InvalidArgument("log grid needs 0 < lo < hi and count >= 2".into()));
        }
        Self::new(log_space(lo, hi, count), with_limits, with_limits)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

impl Default for TimeGrid {
    /// 65 log-spaced points in `[1e-6, 1e6]` plus both limits.
    fn default() -> Self {
        Self { points: log_space(1e-6, 1e6, 65), include_zero_limit: true, include_inf_limit: true }
    }
}

pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_t(t: f64, allow_zero: bool) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    if t < 0.0 || (!allow_zero && t == 0.0) {
        return Err(Error::InvalidArgument(format!("t = {t} out of range")));
    }
    Ok(())
}

/// `k_lambda(t, x) = sum lambda_i |x_i|^2 / (t + lambda_i)`; `k(0, x) = ||x||_0^2`.
pub fn k_functional(t: f64, x: &CoupleVector, lambda: &WeightVector) -> Result<f64> {
    check_t(t, true)?;
    check_dim(lambda.len(), x.len())?;
    Ok(k_raw(t, x.coords(), lambda.values()))
}

pub(crate) fn k_raw(t: f64, x: &[Complex64], lambda: &[f64]) -> f64 {
    x.iter()
        .zip(lambda)
        .map(|(z, &l)| l * z.norm_sqr() / (t + l))
        .sum()
}

/// `K(t, x) = sum t lambda_i |x_i|^2 / (1 + t lambda_i)`, equal to `k(1/t, x)`.
pub fn big_k_functional(t: f64, x: &CoupleVector, lambda: &WeightVector) -> Result<f64> {
    check_t(t, false)?;
    check_dim(lambda.len(), x.len())?;
    Ok(big_k_raw(t, x.coords(), lambda.values()))
}

pub(crate) fn big_k_raw(t: f64, x: &[Complex64], lambda: &[f64]) -> f64 {
    x.iter()
        .zip(lambda)
        .map(|(z, &l)| t * l * z.norm_sqr() / (1.0 + t * l))
        .sum()
}

/// Golden-section minimization of a convex function on `[a, b]` until the bracket is narrower
/// than `width`. Returns the minimal value found.
pub(crate) fn golden_section_min(mut a: f64, mut b: f64, width: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = f(a).min(f(b)).min(fc).min(fd);
    let mut iterations = 0;
    while b - a > width && iterations < 400 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
        iterations += 1;
    }
    best
}

/// Independent evaluation of `k(t, x)` by direct minimization over decompositions
/// `x = x0 + x1` of `||x0||_0^2 + t^{-1} ||x1||_1^2`.
///
/// Each coordinate is an independent convex problem; the optimal `x0_i` is a nonnegative
/// multiple `a x_i` with `a in [0, 1]`, which is located by golden-section search to a bracket
/// width of `1e-13`.
pub fn k_oracle(t: f64, x: &CoupleVector, lambda: &WeightVector) -> Result<f64> {
    check_t(t, true)?;
    check_dim(lambda.len(), x.len())?;
    if t == 0.0 {
        // The complement is weighted by 1/t = inf, forcing x1 = 0.
        return Ok(x.norm0_sq());
    }
    let mut total = 0.0;
    for (z, &l) in x.coords().iter().zip(lambda.values()) {
        let m = z.norm_sqr();
        if m == 0.0 {
            continue;
        }
        let w = l / t;
        let value = golden_section_min(0.0, 1.0, 1e-13, |a| m * (a * a + w * (1.0 - a) * (1.0 - a)));
        if !value.is_finite() {
            return Err(Error::Numerical("oracle inner solve did not converge".into()));
        }
        total += value;
    }
    Ok(total)
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be >= 1")));
    }
    Ok(())
}

/// `K_p(t, x)` of the couple `(l_p^n, l_p^n(lambda))`:
/// `sum |x_i|^p t lambda_i / (1 + (t lambda_i)^{1/(p-1)})^{p-1}`, with the `p = 1` limit
/// `sum |x_i| min(1, t lambda_i)`.
pub fn kp_functional(t: f64, x: &CoupleVector, lambda: &WeightVector, p: f64) -> Result<f64> {
    check_p(p)?;
    check_t(t, false)?;
    check_dim(lambda.len(), x.len())?;
    Ok(x.coords()
        .iter()
        .zip(lambda.values())
        .map(|(z, &l)| z.norm().powf(p) * kp_kernel(t * l, p))
        .sum())
}

/// `s / (1 + s^{1/(p-1)})^{p-1}`, evaluated in log space.
pub(crate) fn kp_kernel(s: f64, p: f64) -> f64 {
    if p == 1.0 {
        return s.min(1.0);
    }
    let q = 1.0 / (p - 1.0);
    let ls = s.ln();
    // ln(1 + s^q) computed without overflow.
    let a = q * ls;
    let log1p_sq = if a > 0.0 { a + (-a).exp().ln_1p() } else { a.exp().ln_1p() };
    (ls - (p - 1.0) * log1p_sq).exp()
}

/// `E_p(s, x) = inf { ||x - x0||_1^p : ||x0||_0^p <= s }` in the couple
/// `(l_p^n, l_p^n(lambda))`, computed by solving the constrained problem through its KKT system.
///
/// For `p > 1` every coordinate of the minimizer is `x0_i = v_i x_i / |x_i|` with
/// `v_i = |x_i| / (1 + (mu / lambda_i)^{1/(p-1)})`, and the multiplier `mu` is found by
/// bisection on the active budget constraint. For `p = 1` the problem is a fractional knapsack
/// solved greedily.
pub fn ep_functional(s: f64, x: &CoupleVector, lambda: &WeightVector, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must be >= 0")));
    }
    check_dim(lambda.len(), x.len())?;
    let moduli = x.moduli();
    let lam = lambda.values();
    let budget_full: f64 = moduli.iter().map(|m| m.powf(p)).sum();
    if s >= budget_full {
        return Ok(0.0);
    }
    if p == 1.0 {
        let mut order: Vec<usize> = (0..moduli.len()).collect();
        order.sort_by(|&a, &b| lam[b].partial_cmp(&lam[a]).unwrap());
        let mut remaining = s;
        let mut cost = 0.0;
        for i in order {
            let take = moduli[i].min(remaining);
            remaining -= take;
            cost += lam[i] * (moduli[i] - take);
        }
        return Ok(cost);
    }
    let q = 1.0 / (p - 1.0);
    let v_of = |log_mu: f64, i: usize| -> f64 {
        let r = q * (log_mu - lam[i].ln());
        let denom = if r > 700.0 { f64::INFINITY } else { 1.0 + r.exp() };
        moduli[i] / denom
    };
    let used = |log_mu: f64| -> f64 { (0..moduli.len()).map(|i| v_of(log_mu, i).powf(p)).sum() };
    let (mut lo, mut hi) = (-800.0 * (p - 1.0) - 50.0, 800.0 * (p - 1.0) + 50.0);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if used(mid) > s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    let log_mu = hi;
    Ok((0..moduli.len())
        .map(|i| {
            let gap = moduli[i] - v_of(log_mu, i);
            lam[i] * gap.max(0.0).powf(p)
        })
        .sum())
}

/// `inf_s { s + t E_p(s) }` evaluated by golden-section search over `s in [0, ||x||_0^p]`.
pub fn kp_from_ep(t: f64, x: &CoupleVector, lambda: &WeightVector, p: f64) -> Result<f64> {
    check_t(t, false)?;
    let top: f64 = x.moduli().iter().map(|m| m.powf(p)).sum();
    if top == 0.0 {
        return Ok(0.0);
    }
    // Validate once so the closure can unwrap.
    ep_functional(0.0, x, lambda, p)?;
    let objective = |s: f64| s + t * ep_functional(s, x, lambda, p).unwrap();
    Ok(golden_section_min(0.0, top, 1e-15 * top, objective))
}

/// `sup_t { (K_p(t) - s) / t }` evaluated by golden-section search over `ln(1/t)`; the
/// objective is concave in `1/t`.
pub fn ep_from_kp(s: f64, x: &CoupleVector, lambda: &WeightVector, p: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must be >= 0")));
    }
    kp_functional(1.0, x, lambda, p)?;
    let objective = |log_u: f64| {
        let u = log_u.exp();
        let t = 1.0 / u;
        -(u * kp_functional(t, x, lambda, p).unwrap() - s * u)
    };
    let value = -golden_section_min(-60.0, 60.0, 1e-12, objective);
    Ok(value.max(0.0))
}

/// `J(t, x) = ||x||_0^2 + t ||x||_1^2`.
pub fn j_functional(t: f64, x: &CoupleVector, lambda: &WeightVector) -> Result<f64> {
    check_t(t, false)?;
    Ok(x.norm0_sq() + t * x.norm1_sq(lambda)?)
}

/// Largest singular value of a complex matrix.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix for singular values"));
    }
    let sv = m.clone().singular_values();
    Ok(sv.iter().fold(0.0f64, |a, &b| a.max(b)))
}

/// `A^{1/2} T A_dom^{-1/2}` for diagonal weights on the codomain and domain.
pub fn conjugate_by_weights(t: &DMatrix<Complex64>, dom: &[f64], cod: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(t.nrows(), t.ncols(), |i, k| t[(i, k)] * (cod[i] / dom[k]).sqrt())
}

/// `(||T||, ||T||_A)` with `||T||_A = ||A^{1/2} T A^{-1/2}||` for `A = diag(lambda)`.
pub fn operator_norms(t: &OperatorMatrix, lambda: &WeightVector) -> Result<(f64, f64)> {
    operator_norms_between(t, lambda, lambda)
}

/// Operator norms of a map from the couple with weights `dom` into the one with weights `cod`.
pub fn operator_norms_between(
    t: &OperatorMatrix,
    dom: &WeightVector,
    cod: &WeightVector,
) -> Result<(f64, f64)> {
    check_dim(dom.len(), t.ncols())?;
    check_dim(cod.len(), t.nrows())?;
    let n0 = spectral_norm(t.entries())?;
    let n1 = spectral_norm(&conjugate_by_weights(t.entries(), dom.values(), cod.values()))?;
    Ok((n0, n1))
}

/// Outcome of a randomized functional inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub pass: bool,
    /// Largest observed ratio `lhs / rhs`; at most 1 on a pass.
    pub worst_ratio: f64,
    /// First violating `(t, x)` if any.
    pub witness: Option<(f64, CoupleVector)>,
}

/// Checks `K(t, Tx) <= M0^2 K(M1^2 t / M0^2, x)` for random `x` on every grid point.
pub fn relative_k_bound_check(
    t_op: &OperatorMatrix,
    lambda: &WeightVector,
    m0: f64,
    m1: f64,
    grid: &TimeGrid,
    trials: usize,
    seed: u64,
) -> Result<BoundCheck> {
    if !(m0 > 0.0 && m1 > 0.0) {
        return Err(Error::InvalidArgument("M0 and M1 must be positive".into()));
    }
    check_dim(lambda.len(), t_op.ncols())?;
    check_dim(lambda.len(), t_op.nrows())?;
    let mut rng = crate::random::rng(seed);
    let n = lambda.len();
    let mut worst: f64 = 0.0;
    let rel_tol = 1e-12;
    for _ in 0..trials {
        let x = crate::random::complex_vector(&mut rng, n);
        let tx = t_op.apply(&x)?;
        let mut check = |lhs: f64, rhs: f64, t: f64| -> Option<(f64, CoupleVector)> {
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            }
            if lhs > rhs * (1.0 + rel_tol) + 1e-300 {
                Some((t, x.clone()))
            } else {
                None
            }
        };
        for &t in grid.points() {
            let lhs = big_k_raw(t, tx.coords(), lambda.values());
            let rhs = m0 * m0 * big_k_raw(m1 * m1 * t / (m0 * m0), x.coords(), lambda.values());
            if let Some(w) = check(lhs, rhs, t) {
                return Ok(BoundCheck { pass: false, worst_ratio: worst, witness: Some(w) });
            }
        }
        if grid.include_inf_limit {
            let (lhs, rhs) = (tx.norm0_sq(), m0 * m0 * x.norm0_sq());
            if let Some(w) = check(lhs, rhs, f64::INFINITY) {
                return Ok(BoundCheck { pass: false, worst_ratio: worst, witness: Some(w) });
            }
        }
        if grid.include_zero_limit {
            let lhs = tx.norm1_sq(lambda)?;
            let rhs = m1 * m1 * x.norm1_sq(lambda)?;
            if let Some(w) = check(lhs, rhs, 0.0) {
                return Ok(BoundCheck { pass: false, worst_ratio: worst, witness: Some(w) });
            }
        }
    }
    Ok(BoundCheck { pass: true, worst_ratio: worst, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn cv(v: &[f64]) -> CoupleVector {
        CoupleVector::from_real(v).unwrap()
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_functional(0.0, &cv(&[1.0, 1.0]), &wv(&[1.0, 2.0])).unwrap(), 2.0);
        assert_eq!(k_functional(1.0, &cv(&[1.0]), &wv(&[1.0])).unwrap(), 0.5);
        let k = k_functional(1.0, &cv(&[1.0, 1.0]), &wv(&[1.0, 2.0])).unwrap();
        assert!((k - 7.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn big_k_examples() {
        assert_eq!(big_k_functional(1.0, &cv(&[1.0]), &wv(&[1.0])).unwrap(), 0.5);
        let k = big_k_functional(1e8, &cv(&[1.0, 1.0]), &wv(&[1.0, 2.0])).unwrap();
        assert!((k - 2.0).abs() < 1e-6);
        let k = big_k_functional(2.0, &cv(&[1.0, 0.5]), &wv(&[1.0, 4.0])).unwrap();
        assert!((k - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_examples() {
        let lam = wv(&[1.0, 2.0]);
        let x = cv(&[1.0, 1.0]);
        assert_eq!(k_oracle(0.0, &x, &lam).unwrap(), 2.0);
        assert!((k_oracle(1.0, &x, &lam).unwrap() - 7.0 / 6.0).abs() < 1e-10 * 7.0 / 6.0);
        assert_eq!(k_oracle(3.0, &CoupleVector::zeros(2), &lam).unwrap(), 0.0);
    }

    #[test]
    fn kp_examples() {
        let lam = wv(&[1.0]);
        let x = cv(&[1.0]);
        assert!((kp_functional(1.0, &x, &lam, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((kp_functional(1.0, &x, &lam, 3.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((kp_functional(3.0, &x, &lam, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ep_examples() {
        let lam = wv(&[1.0]);
        let x = cv(&[1.0]);
        assert!((ep_functional(0.25, &x, &lam, 2.0).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(ep_functional(1.0, &x, &lam, 2.0).unwrap(), 0.0);
        let lam2 = wv(&[2.0, 3.0]);
        let x2 = cv(&[1.0, -2.0]);
        let e0 = ep_functional(0.0, &x2, &lam2, 1.5).unwrap();
        let expected = 2.0 * 1.0 + 3.0 * 2f64.powf(1.5);
        assert!((e0 - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn ep_p1_greedy() {
        let lam = wv(&[1.0, 5.0]);
        let x = cv(&[2.0, 1.0]);
        // Budget 1 goes to the heavier weight first.
        assert!((ep_functional(1.0, &x, &lam, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn j_examples() {
        let lam = wv(&[2.0]);
        assert_eq!(j_functional(3.0, &cv(&[1.0]), &lam).unwrap(), 7.0);
        assert_eq!(j_functional(3.0, &CoupleVector::zeros(1), &lam).unwrap(), 0.0);
    }

    #[test]
    fn norms_examples() {
        let lam = wv(&[1.0, 4.0]);
        let (a, b) = operator_norms(&OperatorMatrix::identity(2), &lam).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        let d = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 2.0]);
        let (a, b) = operator_norms(&OperatorMatrix::from_real(&d).unwrap(), &lam).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![-1.0]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(wv(&[1.0, 2.0]).is_sorted_strict());
        assert!(!wv(&[2.0, 1.0]).is_sorted_strict());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            k_functional(1.0, &cv(&[1.0]), &wv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn relative_bound_identity_and_scalar() {
        let lam = wv(&[0.5, 3.0, 10.0]);
        let grid = TimeGrid::default();
        let r = relative_k_bound_check(&OperatorMatrix::identity(3), &lam, 1.0, 1.0, &grid, 10, 1).unwrap();
        assert!(r.pass);
        assert!((r.worst_ratio - 1.0).abs() < 1e-12);
        let c = DMatrix::<Complex64>::identity(3, 3) * Complex64::new(0.0, 0.7);
        let r = relative_k_bound_check(&OperatorMatrix::new(c).unwrap(), &lam, 1.0, 0.8, &grid, 10, 2).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn default_grid_shape() {
        let g = TimeGrid::default();
        assert_eq!(g.points().len(), 65);
        assert_eq!(g.points()[0], 1e-6);
        assert_eq!(g.points()[64], 1e6);
        assert!((g.points()[32] - 1.0).abs() < 1e-12);
    }
}
