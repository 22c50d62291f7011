//! The construction transplanted to the couple `(l_p, l_p(lambda))`: the same zero splitting
//! applied to `p`-th powers of the data. The resulting map sends the data exactly but carries no
//! norm guarantee, so its norms are measured.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::construct::{condensed_matrix, node_polynomial, polynomial_from_masses};
use super::roots::{split_zeros_with, RootTolerances, ZeroSplitting};
use crate::couple::{check_dim, kp_functional, CoupleVector, OperatorMatrix, TimeGrid, WeightVector};
use crate::error::{Error, Result};

/// Measurements of the map produced by [`lp_experimental_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpReport {
    /// Real part of the assembled matrix.
    pub t: OperatorMatrix,
    /// The assembled matrix before taking real parts.
    pub t_complex: OperatorMatrix,
    pub split: ZeroSplitting,
    /// `||T x0 - y0||_inf`.
    pub residual: f64,
    /// Estimated `||T||` on `l_p`.
    pub norm_p: f64,
    /// Estimated `||T||` on `l_p(lambda)`.
    pub norm_p_weighted: f64,
    /// `max_t K_p(t, y0) / K_p(t, x0)` on the grid.
    pub data_ratio: f64,
    /// `max K_p(t, Ty) / K_p(t, y)` over the grid and random `y`.
    pub kp_sup_ratio: f64,
}

/// Settings of [`lp_experimental_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions {
    pub grid: TimeGrid,
    pub seed: u64,
    pub power_iterations: usize,
    pub power_starts: usize,
    pub trials: usize,
    pub roots: RootTolerances,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            grid: TimeGrid::log_spaced(1e-4, 1e4, 33, false).expect("valid grid"),
            seed: 0,
            power_iterations: 200,
            power_starts: 8,
            trials: 20,
            roots: RootTolerances::default(),
        }
    }
}

/// Builds `P / L = sum x_i^p beta_i / (t + beta_i) - sum y_i^p alpha_i / (t + alpha_i)` with
/// `beta = lambda` and `alpha = rho lambda`, splits its zeros and assembles
/// `tau_ik = Re[x_k^{p-1} beta_k L_delta L_c(-alpha_i) L_alpha(-beta_k) / ((alpha_i - beta_k)
/// y_i^{p-1} alpha_i L_delta L_c(-beta_k) L_alpha'(-alpha_i))]`.
pub fn lp_experimental_matrix(
    x0: &[f64],
    y0: &[f64],
    lambda: &WeightVector,
    p: f64,
    rho: f64,
    opts: &LpOptions,
) -> Result<LpReport> {
    let n = lambda.len();
    check_dim(n, x0.len())?;
    check_dim(n, y0.len())?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    if !(rho > 1.0) {
        return Err(Error::InvalidArgument(format!("rho = {rho} must exceed 1")));
    }
    if x0.iter().chain(y0).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("data must be strictly positive".into()));
    }
    if !lambda.is_sorted_strict() {
        return Err(Error::InvalidArgument("weights must be strictly increasing".into()));
    }
    let beta = lambda.clone();
    let alpha = lambda.scaled(rho)?;
    let xm: Vec<f64> = x0.iter().map(|x| x.powf(p)).collect();
    let ym: Vec<f64> = y0.iter().map(|y| y.powf(p)).collect();
    let poly = polynomial_from_masses(&xm, &ym, &alpha, &beta, &opts.grid)?;
    let l = node_polynomial(&alpha, &beta)?;
    let split = split_zeros_with(&poly, &l, &opts.roots)?;
    let tc = condensed_matrix(x0, y0, alpha.values(), beta.values(), &split, p - 1.0)?;
    let tr = tc.map(|z| z.re);

    let residual = (0..n)
        .map(|i| ((0..n).map(|k| tr[(i, k)] * x0[k]).sum::<f64>() - y0[i]).abs())
        .fold(0.0, f64::max);
    let norm_p = lp_operator_norm(&tr, p, opts.power_iterations, opts.power_starts, opts.seed);
    let d: Vec<f64> = lambda.values().iter().map(|l| l.powf(1.0 / p)).collect();
    let weighted = DMatrix::from_fn(n, n, |i, k| tr[(i, k)] * d[i] / d[k]);
    let norm_p_weighted = lp_operator_norm(&weighted, p, opts.power_iterations, opts.power_starts, opts.seed);

    let xv = CoupleVector::from_real(x0)?;
    let yv = CoupleVector::from_real(y0)?;
    let mut data_ratio: f64 = 0.0;
    for &t in opts.grid.points() {
        data_ratio = data_ratio.max(kp_functional(t, &yv, lambda, p)? / kp_functional(t, &xv, lambda, p)?);
    }
    let t_op = OperatorMatrix::new(tr.map(|v| Complex64::new(v, 0.0)))?;
    let mut rng = crate::random::rng(opts.seed);
    let mut kp_sup_ratio: f64 = 0.0;
    for _ in 0..opts.trials {
        let y = CoupleVector::from_real(&crate::random::real_vector(&mut rng, n))?;
        let ty = t_op.apply(&y)?;
        for &t in opts.grid.points() {
            kp_sup_ratio = kp_sup_ratio.max(kp_functional(t, &ty, lambda, p)? / kp_functional(t, &y, lambda, p)?);
        }
    }
    Ok(LpReport {
        t: t_op,
        t_complex: OperatorMatrix::new(tc)?,
        split,
        residual,
        norm_p,
        norm_p_weighted,
        data_ratio,
        kp_sup_ratio,
    })
}

fn p_norm(v: &[f64], p: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn dual_map(v: &[f64], p: f64) -> Vec<f64> {
    v.iter().map(|x| x.signum() * x.abs().powf(p - 1.0)).collect()
}

/// Lower estimate of `||A||_{p -> p}` by the nonlinear power iteration
/// `x <- psi_q(A^T psi_p(A x))`, normalized in `l_p`, from several starts.
pub fn lp_operator_norm(a: &DMatrix<f64>, p: f64, iterations: usize, starts: usize, seed: u64) -> f64 {
    let n = a.ncols();
    let q = p / (p - 1.0);
    let mut rng = crate::random::rng(seed);
    let mut best: f64 = 0.0;
    let apply = |m: &DMatrix<f64>, x: &[f64]| -> Vec<f64> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)] * x[k]).sum()).collect()
    };
    let at = a.transpose();
    for s in 0..starts.max(1) {
        let mut x: Vec<f64> = if s == 0 { vec![1.0; n] } else { crate::random::real_vector(&mut rng, n) };
        for _ in 0..iterations {
            let nx = p_norm(&x, p);
            if nx == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let ax = apply(a, &x);
            best = best.max(p_norm(&ax, p));
            let z = apply(&at, &dual_map(&ax, p));
            let next = dual_map(&z, q);
            if next.iter().all(|v| *v == 0.0) {
                break;
            }
            x = next;
        }
        let nx = p_norm(&x, p);
        if nx > 0.0 {
            let xn: Vec<f64> = x.iter().map(|v| v / nx).collect();
            best = best.max(p_norm(&apply(a, &xn), p));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calderon::construct::{assemble_contraction, build_domination_polynomial};

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn scalar_case() {
        let r = lp_experimental_matrix(&[1.0], &[0.5], &wv(&[1.0]), 3.0, 2.0, &LpOptions::default()).unwrap();
        assert!((r.t.entries()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn p_two_matches_hilbert_assembly() {
        let lam = wv(&[0.5, 2.0, 9.0]);
        let (x, y) = ([1.0, 0.7, 0.4], [0.3, 0.5, 0.2]);
        let rho = 1.2;
        let r = lp_experimental_matrix(&x, &y, &lam, 2.0, rho, &LpOptions::default()).unwrap();
        let alpha = lam.scaled(rho).unwrap();
        let p = build_domination_polynomial(&x, &y, &alpha, &lam, &TimeGrid::default()).unwrap();
        let l = node_polynomial(&alpha, &lam).unwrap();
        let split = crate::calderon::roots::split_zeros(&p, &l).unwrap();
        let t = assemble_contraction(&x, &y, &alpha, &lam, &split, &p, &l).unwrap();
        let diff = (t.entries() - r.t_complex.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-9, "{diff}");
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn power_iteration_matches_known_norms() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let two = lp_operator_norm(&a, 2.0, 200, 8, 0);
        assert!((two - a.singular_values()[0]).abs() < 1e-10);
        // Brute force over the l_3 unit circle.
        let p = 3.0;
        let brute = (0..200_000)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / 200_000.0;
                let x = [th.cos(), th.sin()];
                let nx = p_norm(&x, p);
                let ax = [(a[(0, 0)] * x[0] + a[(0, 1)] * x[1]) / nx, (a[(1, 0)] * x[0] + a[(1, 1)] * x[1]) / nx];
                p_norm(&ax, p)
            })
            .fold(0.0, f64::max);
        let est = lp_operator_norm(&a, p, 200, 8, 0);
        assert!(est <= brute * (1.0 + 1e-9) && est >= brute * (1.0 - 1e-8), "{est} {brute}");
    }
}
