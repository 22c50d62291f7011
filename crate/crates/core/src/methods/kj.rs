//! The K- and J-methods with a measure, the correspondence between their measures, and the
//! power-p functions obtained by replacing the quadratic functionals with their `p`-th power
//! analogues.

use nalgebra::{DMatrix, DVector};

use crate::couple::{big_k_functional, check_dim, CoupleVector, WeightVector};
use crate::error::{Error, Result};
use crate::pick::{ExtendedMeasure, PickFunctionRep};

/// Which method a measure parametrizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    /// `||x||^2 = int (1 + 1/t) K(t, x) d rho(t)`.
    K,
    /// `||x||^2 = inf { int J(t, u(t)) / (1 + t) d nu(t) : x = int u d nu }`.
    J,
}

/// A quadratic interpolation method given by a nonzero measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub measure: ExtendedMeasure,
}

impl MethodSpec {
    pub fn new(kind: MethodKind, measure: ExtendedMeasure) -> Result<Self> {
        if measure.is_zero() {
            return Err(Error::InvalidArgument("method measure must be nonzero".into()));
        }
        Ok(Self { kind, measure })
    }

    /// The function `h` with `||x||^2 = sum h(lambda_i) |x_i|^2`.
    pub fn h(&self, lambda: f64) -> Result<f64> {
        match self.kind {
            MethodKind::K => crate::pick::eval_pick(&PickFunctionRep::new(self.measure.clone()), lambda),
            MethodKind::J => h_from_j_measure(&self.measure, lambda),
        }
    }

    /// Squared norm of `x`: the K-integral for the K-method, `sum h(lambda_i) |x_i|^2` for the
    /// J-method.
    pub fn norm_sq(&self, lambda: &WeightVector, x: &CoupleVector) -> Result<f64> {
        match self.kind {
            MethodKind::K => k_method_norm(&self.measure, lambda, x),
            MethodKind::J => {
                check_dim(lambda.len(), x.len())?;
                lambda.values().iter().zip(x.coords()).map(|(&l, z)| Ok(self.h(l)? * z.norm_sqr())).sum()
            }
        }
    }
}

/// `int (1 + 1/t) K(t, x) d rho(t)` with `k(0) = ||x||_1^2` at `t = 0` and `||x||_0^2` at
/// `t = inf`, the density integrated by its quadrature rule.
pub fn k_method_norm(rho: &ExtendedMeasure, lambda: &WeightVector, x: &CoupleVector) -> Result<f64> {
    check_dim(lambda.len(), x.len())?;
    let integrand = |t: f64| (1.0 + 1.0 / t) * big_k_functional(t, x, lambda).expect("validated input");
    let v = rho.integrate(integrand, x.norm1_sq(lambda)?, x.norm0_sq());
    if !v.is_finite() {
        return Err(Error::Numerical(format!("K-integral evaluated to {v}")));
    }
    Ok(v)
}

/// `(1 + t) / (1 + t lambda)`, with the limits `1` at `t = 0` and `1 / lambda` at `t = inf`.
pub fn j_kernel(t: f64, lambda: f64) -> f64 {
    if t.is_infinite() {
        1.0 / lambda
    } else {
        (1.0 + t) / (1.0 + t * lambda)
    }
}

/// `h(lambda) = 1 / int (1 + t) / (1 + t lambda) d nu(t)`.
pub fn h_from_j_measure(nu: &ExtendedMeasure, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    if nu.is_zero() {
        return Err(Error::InvalidArgument("J-measure must be nonzero".into()));
    }
    let inv = nu.integrate(|t| j_kernel(t, lambda), 1.0, 1.0 / lambda);
    if !(inv > 0.0 && inv.is_finite()) {
        return Err(Error::Numerical(format!("J-integral evaluated to {inv}")));
    }
    Ok(1.0 / inv)
}

/// The J-measure of exponent `theta`: `c_theta t^theta / (1 + t) dt / t`, which is the
/// K-measure of exponent `1 - theta`.
pub fn j_geometric(theta: f64) -> Result<ExtendedMeasure> {
    ExtendedMeasure::geometric(1.0 - theta)
}

/// Direct and closed-form values of the J-norm for an atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct JNormCheck {
    /// Minimum of the quadratic program.
    pub direct: f64,
    /// `sum h(lambda_i) |x_i|^2`.
    pub closed_form: f64,
    /// `|direct - closed_form| / closed_form` (absolute when `closed_form = 0`).
    pub gap: f64,
    /// Largest coordinate difference between the minimizer and `phi_t(A) x` with
    /// `phi_t(lambda) = (1 + t) / (1 + t lambda) h(lambda)`.
    pub minimizer_gap: f64,
}

/// Solves `min sum_j m_j J(t_j, u_j) / (1 + t_j)` subject to `sum_j m_j u_j = x` for an atomic
/// `nu = sum_j m_j delta_{t_j}` through the KKT system of each coordinate, and compares the
/// value with the closed form.
pub fn j_method_norm_direct(nu: &ExtendedMeasure, lambda: &WeightVector, x: &CoupleVector) -> Result<JNormCheck> {
    check_dim(lambda.len(), x.len())?;
    if nu.density().is_some() {
        return Err(Error::InvalidArgument("the direct J-norm needs an atomic measure".into()));
    }
    let atoms = nu.discretized();
    if atoms.is_empty() {
        return Err(Error::InvalidArgument("J-measure has no atoms: the constraint is singular".into()));
    }
    let r = atoms.len();
    let mut direct = 0.0;
    let mut closed_form = 0.0;
    let mut minimizer_gap: f64 = 0.0;
    for (&l, z) in lambda.values().iter().zip(x.coords()) {
        // Objective weight of u_j is m_j (1 + t_j l) / (1 + t_j) = m_j / j_kernel(t_j, l).
        let d: Vec<f64> = atoms.iter().map(|&(t, m)| m / j_kernel(t, l)).collect();
        let mut kkt = DMatrix::<f64>::zeros(r + 1, r + 1);
        for j in 0..r {
            kkt[(j, j)] = 2.0 * d[j];
            kkt[(j, r)] = atoms[j].1;
            kkt[(r, j)] = atoms[j].1;
        }
        let lu = kkt.lu();
        let solve = |rhs: f64| -> Result<DVector<f64>> {
            let mut b = DVector::<f64>::zeros(r + 1);
            b[r] = rhs;
            lu.solve(&b).ok_or_else(|| Error::Numerical("singular J-constraint system".into()))
        };
        // The program separates into real and imaginary parts.
        let (ur, ui) = (solve(z.re)?, solve(z.im)?);
        let value: f64 = (0..r).map(|j| d[j] * (ur[j] * ur[j] + ui[j] * ui[j])).sum();
        direct += value;
        let h = h_from_j_measure(nu, l)?;
        closed_form += h * z.norm_sqr();
        for (j, &(t, _)) in atoms.iter().enumerate() {
            let phi = j_kernel(t, l) * h;
            minimizer_gap = minimizer_gap.max((ur[j] - phi * z.re).abs()).max((ui[j] - phi * z.im).abs());
        }
    }
    let gap = if closed_form > 0.0 { (direct - closed_form).abs() / closed_form } else { (direct - closed_form).abs() };
    Ok(JNormCheck { direct, closed_form, gap, minimizer_gap })
}

/// Worst relative gap of `int (1 + t) lambda / (1 + t lambda) d rho = 1 / int (1 + t) / (1 + t lambda) d nu`
/// over `grid`.
pub fn kj_bijection_check(rho: &ExtendedMeasure, nu: &ExtendedMeasure, grid: &[f64]) -> Result<f64> {
    let h = PickFunctionRep::new(rho.clone());
    let mut worst: f64 = 0.0;
    for &l in grid {
        let k = crate::pick::eval_pick(&h, l)?;
        let j = h_from_j_measure(nu, l)?;
        worst = worst.max((k - j).abs() / k.abs().max(j.abs()));
    }
    Ok(worst)
}

/// The `p`-th power analogue of a method.
///
/// K: `h(lambda) = int ((1 + t^r) / (1 + (t lambda)^r))^{p-1} lambda d rho(t)`, `r = 1/(p-1)`,
/// with limits `lambda` at `t = 0` and `1` at `t = inf`.
/// J: `h(lambda)^{-r} = int ((1 + t) / (1 + t lambda))^r d nu(t)`, with limits `1` and
/// `lambda^{-r}`.
pub fn power_p_function(measure: &ExtendedMeasure, p: f64, kind: MethodKind, lambda: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let r = 1.0 / (p - 1.0);
    let v = match kind {
        MethodKind::K => {
            let f = |t: f64| ((1.0 + t.powf(r)) / (1.0 + (t * lambda).powf(r))).powf(p - 1.0) * lambda;
            measure.integrate(f, lambda, 1.0)
        }
        MethodKind::J => {
            let f = |t: f64| ((1.0 + t) / (1.0 + t * lambda)).powf(r);
            let inv = measure.integrate(f, 1.0, lambda.powf(-r));
            inv.powf(-(p - 1.0))
        }
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Numerical(format!("power-{p} function evaluated to {v}")));
    }
    Ok(v)
}
