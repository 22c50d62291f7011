//! The diagonal-couple construction: domination check, phase stripping, the domination
//! polynomial, the zero splitting and the assembly of the contraction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::certificate::{measure_certificate, ContractionCertificate};
use super::polynomial::{complex_shift_product, shifted_product_derivative_at, RealPolynomial};
use super::roots::{split_zeros_with, RootTolerances, ZeroSplitting};
use crate::couple::{check_dim, k_raw, CoupleVector, OperatorMatrix, TimeGrid, WeightVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Knobs of [`construct_calderon_map`] and the maps built on top of it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionConfig {
    /// Fixed `rho > 1`; `None` selects it from the domination margin and the weight gaps.
    pub rho: Option<f64>,
    pub seed: u64,
    /// Number of `rho` perturbations tried when the domination polynomial has a near-multiple zero.
    pub max_retries: usize,
    /// Relative size of the first `rho` perturbation; later ones grow by a factor 4.
    pub perturbation: f64,
    pub grid: TimeGrid,
    /// `||Tx - y||_inf <= residual_tol * max(||x||_inf, ||y||_inf)`.
    pub residual_tol: f64,
    pub max_dim: usize,
    /// Replace `T` by its real part after assembly.
    pub real_projection: bool,
    /// Random test vectors used when measuring the domination margin.
    pub verify_trials: usize,
    pub roots: RootTolerances,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            rho: None,
            seed: 0,
            max_retries: 32,
            perturbation: 1e-6,
            grid: TimeGrid::default(),
            residual_tol: 1e-8,
            max_dim: 12,
            real_projection: false,
            verify_trials: 50,
            roots: RootTolerances::default(),
        }
    }
}

/// Ratios `k(t, y) / k(t, x)` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Where the maximum is attained; `0` and `inf` stand for the closed-form limits.
    pub argmax_t: f64,
}

impl DominationReport {
    /// `1 / max_ratio`; strict domination means a margin above 1.
    pub fn margin(&self) -> f64 {
        1.0 / self.max_ratio
    }

    pub fn is_strict(&self) -> bool {
        self.max_ratio < 1.0
    }
}

/// Evaluates `k(t, y0) / k(t, x0)` on the grid and at the limits `t = 0` (ratio of plain norms)
/// and `t = inf` (ratio of weighted norms).
pub fn check_domination(
    x0: &CoupleVector,
    y0: &CoupleVector,
    lambda: &WeightVector,
    grid: &TimeGrid,
) -> Result<DominationReport> {
    check_dim(lambda.len(), x0.len())?;
    check_dim(lambda.len(), y0.len())?;
    if x0.is_zero() {
        return Err(Error::DominationFails("x0 = 0 has vanishing k-functional".into()));
    }
    let lam = lambda.values();
    let mut report = DominationReport { max_ratio: f64::NEG_INFINITY, min_ratio: f64::INFINITY, argmax_t: 0.0 };
    let mut record = |ratio: f64, t: f64| {
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.argmax_t = t;
        }
        report.min_ratio = report.min_ratio.min(ratio);
    };
    if grid.include_zero_limit {
        record(y0.norm0_sq() / x0.norm0_sq(), 0.0);
    }
    for &t in grid.points() {
        record(k_raw(t, y0.coords(), lam) / k_raw(t, x0.coords(), lam), t);
    }
    if grid.include_inf_limit {
        record(y0.norm1_sq(lambda)? / x0.norm1_sq(lambda)?, f64::INFINITY);
    }
    if !report.max_ratio.is_finite() {
        return Err(Error::Numerical("domination ratio is not finite".into()));
    }
    Ok(report)
}

/// Polar decomposition of the data: moduli and unit phases with `x0 = phases_x * moduli_x`.
/// Zero coordinates get phase 1 and are listed; they are handled exactly downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseData {
    pub moduli_x: Vec<f64>,
    pub moduli_y: Vec<f64>,
    pub phases_x: Vec<Complex64>,
    pub phases_y: Vec<Complex64>,
    pub zero_x: Vec<usize>,
    pub zero_y: Vec<usize>,
}

pub fn preprocess_phases(x0: &CoupleVector, y0: &CoupleVector) -> PhaseData {
    fn split(v: &CoupleVector) -> (Vec<f64>, Vec<Complex64>, Vec<usize>) {
        let mut moduli = Vec::with_capacity(v.len());
        let mut phases = Vec::with_capacity(v.len());
        let mut zeros = Vec::new();
        for (k, z) in v.coords().iter().enumerate() {
            let r = z.norm();
            moduli.push(r);
            if r == 0.0 {
                phases.push(Complex64::new(1.0, 0.0));
                zeros.push(k);
            } else {
                phases.push(z / r);
            }
        }
        (moduli, phases, zeros)
    }
    let (moduli_x, phases_x, zero_x) = split(x0);
    let (moduli_y, phases_y, zero_y) = split(y0);
    PhaseData { moduli_x, moduli_y, phases_x, phases_y, zero_x, zero_y }
}

/// Shifts `(beta_1..beta_n, alpha_1..alpha_n)`; the node polynomial is `prod (t + shift)`.
fn node_shifts(alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    beta.iter().chain(alpha).copied().collect()
}

/// `L(t) = prod (t + beta_i)(t + alpha_i)`, with its roots remembered.
pub fn node_polynomial(alpha: &WeightVector, beta: &WeightVector) -> Result<RealPolynomial> {
    check_dim(beta.len(), alpha.len())?;
    let roots: Vec<f64> = node_shifts(alpha.values(), beta.values()).iter().map(|s| -s).collect();
    RealPolynomial::from_real_roots(&roots)
}

fn check_interlacing(alpha: &[f64], beta: &[f64]) -> Result<()> {
    for i in 0..beta.len() {
        if !(beta[i] < alpha[i]) || (i + 1 < beta.len() && !(alpha[i] < beta[i + 1])) {
            return Err(Error::Interlacing(format!("beta_{i} < alpha_{i} < beta_{} fails", i + 1)));
        }
    }
    Ok(())
}

fn check_moduli(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    if v.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidArgument(format!("{what} must be nonnegative")));
    }
    Ok(())
}

/// The polynomial `P` of degree `<= 2n - 1` with `P / L = k_beta(t, x) - k_alpha(t, y)`,
/// interpolated from `P(-beta_i) = x_i^2 beta_i L'(-beta_i)` and
/// `P(-alpha_i) = -y_i^2 alpha_i L'(-alpha_i)`. The identity is re-checked on the grid to `1e-8`
/// relative, and `P > 0` on the grid (and in both limits) is required.
pub fn build_domination_polynomial(
    x0: &[f64],
    y0: &[f64],
    alpha: &WeightVector,
    beta: &WeightVector,
    grid: &TimeGrid,
) -> Result<RealPolynomial> {
    check_moduli(x0, "x0 moduli")?;
    check_moduli(y0, "y0 moduli")?;
    let xm: Vec<f64> = x0.iter().map(|x| x * x).collect();
    let ym: Vec<f64> = y0.iter().map(|y| y * y).collect();
    polynomial_from_masses(&xm, &ym, alpha, beta, grid)
}

/// Interpolates `P` from `P / L = sum xm_i beta_i / (t + beta_i) - sum ym_i alpha_i / (t + alpha_i)`
/// and checks positivity and the identity on the grid.
pub(crate) fn polynomial_from_masses(
    xm: &[f64],
    ym: &[f64],
    alpha: &WeightVector,
    beta: &WeightVector,
    grid: &TimeGrid,
) -> Result<RealPolynomial> {
    let n = beta.len();
    check_dim(n, alpha.len())?;
    check_dim(n, xm.len())?;
    check_dim(n, ym.len())?;
    let (a, b) = (alpha.values(), beta.values());
    if !beta.is_sorted_strict() {
        return Err(Error::Interlacing("beta must be strictly increasing".into()));
    }
    check_interlacing(a, b)?;
    let shifts = node_shifts(a, b);
    let nodes: Vec<f64> = shifts.iter().map(|s| -s).collect();
    let values: Vec<f64> = (0..2 * n)
        .map(|j| {
            let dl = shifted_product_derivative_at(j, &shifts);
            if j < n {
                xm[j] * b[j] * dl
            } else {
                -ym[j - n] * a[j - n] * dl
            }
        })
        .collect();
    let p = RealPolynomial::interpolate(&nodes, &values)?;
    if p.degree() > 2 * n - 1 {
        return Err(Error::DegreeBound(format!("degree {} exceeds {}", p.degree(), 2 * n - 1)));
    }
    let kx = |t: f64| -> f64 { xm.iter().zip(b).map(|(&x, &l)| l * x / (t + l)).sum() };
    let ky = |t: f64| -> f64 { ym.iter().zip(a).map(|(&y, &l)| l * y / (t + l)).sum() };
    let mut ts: Vec<f64> = grid.points().to_vec();
    if grid.include_zero_limit {
        ts.insert(0, 0.0);
    }
    for &t in &ts {
        let pt = p.eval(t);
        if !(pt > 0.0) {
            return Err(Error::DominationFails(format!("P({t:e}) = {pt:e} is not positive")));
        }
        let lt = shifted_product(t, &shifts);
        let lhs = pt / lt;
        let rhs = kx(t) - ky(t);
        if (lhs - rhs).abs() > 1e-8 * kx(t) {
            return Err(Error::Numerical(format!(
                "residue identity fails at t = {t:e}: {lhs:e} vs {rhs:e}"
            )));
        }
    }
    if grid.include_inf_limit {
        let lead: f64 =
            xm.iter().zip(b).map(|(&x, &l)| l * x).sum::<f64>() - ym.iter().zip(a).map(|(&y, &l)| l * y).sum::<f64>();
        if !(lead > 0.0) {
            return Err(Error::DominationFails("weighted norms violate domination as t -> inf".into()));
        }
    }
    Ok(p)
}

fn shifted_product(t: f64, shifts: &[f64]) -> f64 {
    shifts.iter().map(|s| t + s).product()
}

fn node_value(p: &RealPolynomial, node: f64) -> f64 {
    match p.nodes().iter().position(|&t| t == node) {
        Some(i) => p.node_values()[i],
        None => p.eval(node),
    }
}

fn cplx(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Products `L_delta(t) L_c(t)` of the splitting at real `t`.
fn split_product(t: f64, split: &ZeroSplitting) -> Complex64 {
    let d: f64 = split.deltas.iter().map(|d| t + d).product();
    d * complex_shift_product(cplx(t), &split.complex_pairs)
}

/// Square roots `sqrt(beta_k L'(-beta_k) P(-beta_k))` and `sqrt(-alpha_i L'(-alpha_i) P(-alpha_i))`.
fn radicands(
    alpha: &[f64],
    beta: &[f64],
    p: &RealPolynomial,
    l: &RealPolynomial,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = beta.len();
    let roots = l.real_roots().ok_or_else(|| Error::InvalidArgument("L must be given by its roots".into()))?;
    let shifts = node_shifts(alpha, beta);
    if roots.len() != 2 * n || roots.iter().zip(&shifts).any(|(r, s)| *r != -s) {
        return Err(Error::InvalidArgument("L does not match the nodes -beta, -alpha".into()));
    }
    let mut sb = Vec::with_capacity(n);
    let mut sa = Vec::with_capacity(n);
    for j in 0..2 * n {
        let dl = shifted_product_derivative_at(j, &shifts);
        let pv = node_value(p, -shifts[j]);
        let r = if j < n { beta[j] * dl * pv } else { -alpha[j - n] * dl * pv };
        if !(r >= 0.0) {
            return Err(Error::NegativeRadicand(format!("node {j}: {r:e}")));
        }
        if j < n {
            sb.push(r.sqrt());
        } else {
            sa.push(r.sqrt());
        }
    }
    Ok((sb, sa))
}

/// Basis polynomial `Q_k` of the assembly evaluated at real `t`:
/// `L_delta L_c L_beta (t) / (t + beta_k)`, normalized so that `Q_k(-beta_k) = sb_k`.
fn q_basis(t: f64, k: usize, beta: &[f64], split: &ZeroSplitting, sb: f64) -> Result<Complex64> {
    let lb: f64 = beta.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, b)| t + b).product();
    let dlb = shifted_product_derivative_at(k, beta);
    let denom = split_product(-beta[k], split) * dlb;
    if denom.norm() == 0.0 {
        return Err(Error::Numerical(format!("zero of P coincides with -beta_{k}")));
    }
    Ok(split_product(t, split) * lb * sb / denom)
}

/// The contraction `tau_ik = Q_k(-alpha_i) / sqrt(-alpha_i L'(-alpha_i) P(-alpha_i))`. Entries are
/// complex when the splitting has complex pairs; rows with `y_i = 0` are zero.
pub fn assemble_contraction(
    x0: &[f64],
    y0: &[f64],
    alpha: &WeightVector,
    beta: &WeightVector,
    split: &ZeroSplitting,
    p: &RealPolynomial,
    l: &RealPolynomial,
) -> Result<OperatorMatrix> {
    let n = beta.len();
    check_dim(n, x0.len())?;
    check_dim(n, y0.len())?;
    let (a, b) = (alpha.values(), beta.values());
    let (sb, sa) = radicands(a, b, p, l)?;
    let mut t = CMatrix::zeros(n, n);
    for i in 0..n {
        if y0[i] == 0.0 || sa[i] == 0.0 {
            continue;
        }
        for k in 0..n {
            t[(i, k)] = q_basis(-a[i], k, b, split, sb[k])? / sa[i];
        }
    }
    OperatorMatrix::new(t)
}

/// Largest deviation of `Q_k(-beta_i) / sqrt(beta_i L'(-beta_i) P(-beta_i))` from the Kronecker
/// delta, over indices with a nonzero radicand.
pub fn basis_normalization_error(
    alpha: &WeightVector,
    beta: &WeightVector,
    split: &ZeroSplitting,
    p: &RealPolynomial,
    l: &RealPolynomial,
) -> Result<f64> {
    let (a, b) = (alpha.values(), beta.values());
    let (sb, _) = radicands(a, b, p, l)?;
    let n = b.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        if sb[i] == 0.0 {
            continue;
        }
        for k in 0..n {
            if sb[k] == 0.0 {
                continue;
            }
            let v = q_basis(-b[i], k, b, split, sb[k])? / sb[i];
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    Ok(worst)
}

/// Closed-form entries
/// `x_k^e beta_k L_delta L_c (-alpha_i) L_alpha(-beta_k) / ((alpha_i - beta_k) y_i^e alpha_i
/// L_delta L_c (-beta_k) L_alpha'(-alpha_i))` with `e = power`, without taking real parts.
pub(crate) fn condensed_matrix(
    x0: &[f64],
    y0: &[f64],
    alpha: &[f64],
    beta: &[f64],
    split: &ZeroSplitting,
    power: f64,
) -> Result<CMatrix> {
    let n = beta.len();
    let mut t = CMatrix::zeros(n, n);
    for i in 0..n {
        if y0[i] == 0.0 {
            continue;
        }
        let dla = shifted_product_derivative_at(i, alpha);
        for k in 0..n {
            let la: f64 = alpha.iter().map(|a| a - beta[k]).product();
            let num = x0[k].powf(power) * beta[k] * split_product(-alpha[i], split) * la;
            let den = (alpha[i] - beta[k]) * y0[i].powf(power) * alpha[i] * split_product(-beta[k], split) * dla;
            if den.norm() == 0.0 {
                return Err(Error::Numerical("vanishing denominator in closed-form entries".into()));
            }
            t[(i, k)] = num / den;
        }
    }
    Ok(t)
}

/// Closed-form counterpart of [`assemble_contraction`], used as a cross-check.
pub fn assemble_condensed(
    x0: &[f64],
    y0: &[f64],
    alpha: &WeightVector,
    beta: &WeightVector,
    split: &ZeroSplitting,
) -> Result<OperatorMatrix> {
    OperatorMatrix::new(condensed_matrix(x0, y0, alpha.values(), beta.values(), split, 1.0)?)
}

/// Everything produced by one pass of the construction for sorted weights.
#[derive(Debug, Clone)]
pub(crate) struct SortedConstruction {
    pub t: CMatrix,
    pub split: ZeroSplitting,
    pub condensed_mismatch: f64,
}

pub(crate) fn construct_sorted(
    x: &[f64],
    y: &[f64],
    beta: &WeightVector,
    rho: f64,
    cfg: &ConstructionConfig,
) -> Result<SortedConstruction> {
    let alpha = beta.scaled(rho)?;
    let p = build_domination_polynomial(x, y, &alpha, beta, &cfg.grid)?;
    let l = node_polynomial(&alpha, beta)?;
    let split = split_zeros_with(&p, &l, &cfg.roots)?;
    let t = assemble_contraction(x, y, &alpha, beta, &split, &p, &l)?.into_entries();
    let cond = condensed_matrix(x, y, alpha.values(), beta.values(), &split, 1.0)?;
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let condensed_mismatch = (&t - &cond).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    Ok(SortedConstruction { t, split, condensed_mismatch })
}

/// Sorting permutation of the weights; fails on repeated weights.
pub(crate) fn sorting_permutation(lambda: &[f64]) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..lambda.len()).collect();
    perm.sort_by(|&i, &j| lambda[i].partial_cmp(&lambda[j]).unwrap());
    if perm.windows(2).any(|w| lambda[w[0]] == lambda[w[1]]) {
        return Err(Error::NoAdmissibleRho("weights must have unit multiplicity".into()));
    }
    Ok(perm)
}

/// Automatic `rho`: a quarter of the way into the domination gap, capped by the interlacing
/// constraint `rho lambda_i < lambda_{i+1}`.
pub fn select_rho(report: &DominationReport, sorted_lambda: &[f64]) -> Result<f64> {
    let from_margin = 1.0 + (report.margin() - 1.0) / 4.0;
    let from_gaps = sorted_lambda.windows(2).map(|w| (w[1] / w[0]).sqrt()).fold(f64::INFINITY, f64::min);
    let rho = from_margin.min(from_gaps);
    let rho = if rho.is_finite() { rho } else { 2.0 };
    if !(rho > 1.0) {
        return Err(Error::NoAdmissibleRho(format!("selected rho = {rho}")));
    }
    Ok(rho)
}

fn validate_manual_rho(rho: f64, report: &DominationReport, sorted_lambda: &[f64]) -> Result<()> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::NoAdmissibleRho(format!("rho = {rho} must exceed 1")));
    }
    if sorted_lambda.windows(2).any(|w| !(rho * w[0] < w[1])) {
        return Err(Error::Interlacing(format!("rho = {rho} breaks rho lambda_i < lambda_(i+1)")));
    }
    if report.max_ratio > 1.0 / rho {
        return Err(Error::DominationFails(format!(
            "domination ratio {} exceeds 1 / rho = {}",
            report.max_ratio,
            1.0 / rho
        )));
    }
    Ok(())
}

fn apply_phases(t: &CMatrix, phases_y: &[Complex64], phases_x: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(t.nrows(), t.ncols(), |i, k| phases_y[i] * t[(i, k)] * phases_x[k].conj())
}

/// Builds a two-sided contraction `T` on the diagonal couple with weights `lambda` such that
/// `T x0 = y0` and `k_{rho lambda}(t, Tx) <= k_lambda(t, x)`, so `||T||_0 <= 1` and
/// `||T||_1 <= rho^{-1/2}`. Requires strict domination of `y0` by `x0` and distinct weights.
pub fn construct_calderon_map(
    x0: &CoupleVector,
    y0: &CoupleVector,
    lambda: &WeightVector,
    cfg: &ConstructionConfig,
) -> Result<ContractionCertificate> {
    let n = lambda.len();
    check_dim(n, x0.len())?;
    check_dim(n, y0.len())?;
    if n > cfg.max_dim {
        return Err(Error::InvalidArgument(format!("dimension {n} exceeds the configured cap {}", cfg.max_dim)));
    }
    let perm = sorting_permutation(lambda.values())?;
    let report = check_domination(x0, y0, lambda, &cfg.grid)?;
    if !report.is_strict() {
        return Err(Error::DominationFails(format!(
            "max ratio {} at t = {:e} is not below 1",
            report.max_ratio, report.argmax_t
        )));
    }
    let sorted: Vec<f64> = perm.iter().map(|&i| lambda.values()[i]).collect();
    let rho = match cfg.rho {
        Some(r) => {
            validate_manual_rho(r, &report, &sorted)?;
            r
        }
        None => select_rho(&report, &sorted)?,
    };
    let phases = preprocess_phases(x0, y0);
    let mut cert = ContractionCertificate::skeleton(lambda.clone(), rho, phases.phases_x.clone(), phases.phases_y.clone());
    if y0.is_zero() || n == 1 {
        cert.t = if n == 1 {
            OperatorMatrix::new(DMatrix::from_element(1, 1, y0.coords()[0] / x0.coords()[0]))?
        } else {
            OperatorMatrix::new(DMatrix::zeros(n, n))?
        };
        measure_certificate(&mut cert, x0, y0, cfg)?;
        return Ok(cert);
    }
    let beta = WeightVector::new(sorted)?;
    let xs: Vec<f64> = perm.iter().map(|&i| phases.moduli_x[i]).collect();
    let ys: Vec<f64> = perm.iter().map(|&i| phases.moduli_y[i]).collect();
    let mut rng = crate::random::rng(cfg.seed);
    for attempt in 0..=cfg.max_retries {
        let rho_a = if attempt == 0 {
            rho
        } else {
            let size = (cfg.perturbation * 4f64.powi(attempt as i32 - 1)).min(0.5);
            1.0 + (rho - 1.0) * (1.0 - size * rng.random::<f64>())
        };
        match construct_sorted(&xs, &ys, &beta, rho_a, cfg) {
            Ok(out) => {
                let mut t = CMatrix::zeros(n, n);
                for i in 0..n {
                    for k in 0..n {
                        t[(perm[i], perm[k])] = out.t[(i, k)];
                    }
                }
                let mut t = apply_phases(&t, &phases.phases_y, &phases.phases_x);
                if cfg.real_projection {
                    t = t.map(|z| Complex64::new(z.re, 0.0));
                }
                cert.t = OperatorMatrix::new(t)?;
                cert.rho = rho_a;
                cert.splitting = Some(out.split);
                cert.condensed_mismatch = out.condensed_mismatch;
                cert.attempts = attempt + 1;
                measure_certificate(&mut cert, x0, y0, cfg)?;
                return Ok(cert);
            }
            Err(Error::NearMultipleZero(_) | Error::SplittingInconsistent(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted(cfg.max_retries))
}

/// Largest ratio `k_H(t, y0) / k_K(t, x0)` between two couples, over the grid and both limits.
fn relative_ratio(
    x0: &CoupleVector,
    lambda_k: &WeightVector,
    y0: &CoupleVector,
    lambda_h: &WeightVector,
    grid: &TimeGrid,
) -> Result<f64> {
    if x0.is_zero() {
        return Err(Error::DominationFails("x0 = 0 has vanishing k-functional".into()));
    }
    let mut worst = 0.0f64;
    if grid.include_zero_limit {
        worst = worst.max(y0.norm0_sq() / x0.norm0_sq());
    }
    for &t in grid.points() {
        worst = worst.max(k_raw(t, y0.coords(), lambda_h.values()) / k_raw(t, x0.coords(), lambda_k.values()));
    }
    if grid.include_inf_limit {
        worst = worst.max(y0.norm1_sq(lambda_h)? / x0.norm1_sq(lambda_k)?);
    }
    Ok(worst)
}

/// A map `T` from the couple with weights `lambda_k` into the one with weights `lambda_h` with
/// `T x0 = y0` and both norms at most 1, obtained by running the diagonal construction on the
/// direct sum of the two couples and compressing to the relevant block. Target weights that
/// collide with or crowd source weights are moved up first.
pub fn construct_relative_map(
    x0: &CoupleVector,
    lambda_k: &WeightVector,
    y0: &CoupleVector,
    lambda_h: &WeightVector,
    cfg: &ConstructionConfig,
) -> Result<ContractionCertificate> {
    check_dim(lambda_k.len(), x0.len())?;
    check_dim(lambda_h.len(), y0.len())?;
    let ratio = relative_ratio(x0, lambda_k, y0, lambda_h, &cfg.grid)?;
    let (nk, nh) = (lambda_k.len(), lambda_h.len());
    if nk == 1 && nh == 1 {
        if ratio > 1.0 + 1e-12 {
            return Err(Error::DominationFails(format!("max ratio {ratio} exceeds 1")));
        }
        let rho = if ratio < 1.0 { 1.0 + (1.0 / ratio - 1.0) / 4.0 } else { 1.0 };
        let rho = if rho.is_finite() { rho } else { 2.0 };
        let phases = preprocess_phases(x0, y0);
        let mut cert = ContractionCertificate::skeleton(lambda_k.clone(), rho, phases.phases_x, phases.phases_y);
        cert.codomain_weights = lambda_h.clone();
        cert.t = OperatorMatrix::new(DMatrix::from_element(1, 1, y0.coords()[0] / x0.coords()[0]))?;
        measure_certificate(&mut cert, x0, y0, cfg)?;
        return Ok(cert);
    }
    if lambda_k == lambda_h {
        if let Some(c) = proportional(x0, y0) {
            if c.norm() <= 1.0 && ratio >= 1.0 {
                let phases = preprocess_phases(x0, y0);
                let mut cert = ContractionCertificate::skeleton(lambda_k.clone(), 1.0, phases.phases_x, phases.phases_y);
                cert.t = OperatorMatrix::new(CMatrix::identity(nk, nk) * c)?;
                measure_certificate(&mut cert, x0, y0, cfg)?;
                return Ok(cert);
            }
        }
        return construct_calderon_map(x0, y0, lambda_k, cfg);
    }
    if ratio >= 1.0 {
        return Err(Error::DominationFails(format!("max ratio {ratio} is not below 1")));
    }
    let spread = spread_weights(lambda_k.values(), lambda_h.values(), (1.0 / ratio).sqrt())?;
    let mut mu: Vec<f64> = lambda_k.values().to_vec();
    mu.extend_from_slice(&spread);
    let mu = WeightVector::new(mu)?;
    let mut z = x0.coords().to_vec();
    z.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), nh));
    let mut w = vec![Complex64::new(0.0, 0.0); nk];
    w.extend_from_slice(y0.coords());
    let mut sub_cfg = cfg.clone();
    sub_cfg.max_dim = cfg.max_dim.max(nk + nh);
    let full = construct_calderon_map(&CoupleVector::new(z)?, &CoupleVector::new(w)?, &mu, &sub_cfg)?;
    let t = full.t.entries().view((nk, 0), (nh, nk)).into_owned();
    let phases = preprocess_phases(x0, y0);
    let mut cert = ContractionCertificate::skeleton(lambda_k.clone(), full.rho, phases.phases_x, phases.phases_y);
    cert.codomain_weights = lambda_h.clone();
    cert.t = OperatorMatrix::new(t)?;
    cert.splitting = full.splitting;
    cert.condensed_mismatch = full.condensed_mismatch;
    cert.attempts = full.attempts;
    measure_certificate(&mut cert, x0, y0, cfg)?;
    Ok(cert)
}

/// Moves the weights of the target summand up so that every pair of weights in the direct sum
/// is separated by a factor `g > 1`, with each weight moved by a factor at most `max_factor`.
/// Raising a target weight only strengthens the inequality that is finally certified, since
/// `k_lambda(t, x)` increases with `lambda`. The gap starts at `(max_factor - 1) / (2N)` and is
/// halved until a placement exists, but never below a relative `1e-9`.
fn spread_weights(lambda_k: &[f64], lambda_h: &[f64], max_factor: f64) -> Result<Vec<f64>> {
    let total = (lambda_k.len() + lambda_h.len()) as f64;
    let mut gap = if max_factor.is_finite() { (max_factor - 1.0) / (2.0 * total) } else { 0.5 };
    let mut order: Vec<usize> = (0..lambda_h.len()).collect();
    order.sort_by(|&i, &j| lambda_h[i].partial_cmp(&lambda_h[j]).unwrap());
    while gap >= 1e-9 {
        let g = 1.0 + gap;
        let mut placed = lambda_k.to_vec();
        let mut out = lambda_h.to_vec();
        let mut ok = true;
        for &h in &order {
            let mut w = lambda_h[h];
            while let Some(&p) = placed.iter().find(|&&p| p.max(w) / p.min(w) < g) {
                w = w.max(p) * g;
            }
            if w / lambda_h[h] > max_factor {
                ok = false;
                break;
            }
            placed.push(w);
            out[h] = w;
        }
        if ok {
            return Ok(out);
        }
        gap /= 2.0;
    }
    Err(Error::NoAdmissibleRho("weights of the two couples cannot be separated".into()))
}

fn proportional(x0: &CoupleVector, y0: &CoupleVector) -> Option<Complex64> {
    let (x, y) = (x0.coords(), y0.coords());
    let k = x.iter().enumerate().max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())?.0;
    let c = y[k] / x[k];
    let scale = x.iter().chain(y).map(|z| z.norm()).fold(0.0, f64::max);
    x.iter().zip(y).all(|(&xi, &yi)| (yi - c * xi).norm() <= 1e-14 * scale).then_some(c)
}

/// A map `T` on the couple with weights `lambda` with `T x0 = y0`, `||T||_0 <= M0` and
/// `||T||_1 <= M1`: the source couple is renormed by `M0` and `M1`, the relative construction
/// is applied, and the result is scaled back.
pub fn scaled_map(
    x0: &CoupleVector,
    y0: &CoupleVector,
    lambda: &WeightVector,
    m0: f64,
    m1: f64,
    cfg: &ConstructionConfig,
) -> Result<ContractionCertificate> {
    if !(m0 > 0.0 && m1 > 0.0 && m0.is_finite() && m1.is_finite()) {
        return Err(Error::InvalidArgument("M0 and M1 must be positive and finite".into()));
    }
    check_dim(lambda.len(), x0.len())?;
    let source = lambda.scaled(m1 * m1 / (m0 * m0))?;
    let u0 = CoupleVector::new(x0.coords().iter().map(|z| z * m0).collect())?;
    let inner = construct_relative_map(&u0, &source, y0, lambda, cfg)?;
    let phases = preprocess_phases(x0, y0);
    let mut cert = ContractionCertificate::skeleton(lambda.clone(), inner.rho, phases.phases_x, phases.phases_y);
    cert.source_weights = source;
    cert.source_scale = m0;
    cert.bound_scale = (m0, m1);
    cert.t = OperatorMatrix::new(inner.t.entries() * Complex64::new(m0, 0.0))?;
    cert.splitting = inner.splitting;
    cert.condensed_mismatch = inner.condensed_mismatch;
    cert.attempts = inner.attempts;
    measure_certificate(&mut cert, x0, y0, cfg)?;
    Ok(cert)
}
