//! The complex method on a scalar couple: minimize the boundary energy
//! `int |f(it)|^2 P_0(theta, t) dt + lambda int |f(1 + it)|^2 P_1(theta, t) dt` over polynomials
//! `f` of bounded degree with `f(theta) = 1`. The minima decrease to `lambda^theta`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::couple::{check_dim, CoupleVector, WeightVector};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Largest polynomial degree accepted; beyond it the boundary Gram matrices are too
/// ill-conditioned for the result to be meaningful.
pub const MAX_DEGREE: usize = 16;

/// Scale `a` of the substitution `t = a u / (1 - u^2)` mapping `(-1, 1)` onto the real line.
/// It resolves the kernel peaks near `t = 0` for `theta` close to 0 or 1 while its tails reach
/// far enough for degree-16 moments.
const MAP_SCALE: f64 = 0.5;

/// Node `t` and Jacobian `dt/du` of the substitution.
fn substitute(u: f64) -> (f64, f64) {
    let d = 1.0 - u * u;
    (MAP_SCALE * u / d, MAP_SCALE * (1.0 + u * u) / (d * d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMethodConfig {
    pub theta: f64,
    pub poly_degree: usize,
    pub quad_nodes: usize,
}

impl ComplexMethodConfig {
    pub fn new(theta: f64, poly_degree: usize) -> Result<Self> {
        let cfg = Self { theta, poly_degree, quad_nodes: 512 };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidArgument(format!("theta = {} must lie in (0, 1)", self.theta)));
        }
        if self.poly_degree == 0 {
            return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
        }
        if self.poly_degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "degree {} exceeds the cap {MAX_DEGREE}: the Gram matrix is ill-conditioned",
                self.poly_degree
            )));
        }
        if self.quad_nodes < 2 {
            return Err(Error::InvalidArgument("at least two quadrature nodes are needed".into()));
        }
        Ok(())
    }
}

/// Poisson kernel of the strip `0 < Re z < 1` at `theta` for the boundary line `Re z = j`:
/// `e^{-pi t} sin(theta pi) / (sin^2(theta pi) + (cos(theta pi) - (-1)^j e^{-pi t})^2)`.
pub fn poisson_kernel(j: u8, theta: f64, t: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("theta = {theta} must lie in (0, 1)")));
    }
    if j > 1 {
        return Err(Error::InvalidArgument(format!("boundary index {j} must be 0 or 1")));
    }
    let pi = std::f64::consts::PI;
    let (s, c) = (theta * pi).sin_cos();
    let sign = if j == 0 { 1.0 } else { -1.0 };
    // For t < 0 divide through by e^{-2 pi t} so that nothing overflows.
    let v = if t >= 0.0 {
        let e = (-pi * t).exp();
        e * s / (s * s + (c - sign * e).powi(2))
    } else {
        let e = (pi * t).exp();
        e * s / (s * s * e * e + (c * e - sign).powi(2))
    };
    Ok(v)
}

/// `T_0(w), ..., T_n(w)` at `w = 2z - 1` by the three-term recurrence.
fn chebyshev_row(z: Complex64, n: usize) -> Vec<Complex64> {
    let w = z * 2.0 - 1.0;
    let mut row = Vec::with_capacity(n + 1);
    row.push(Complex64::new(1.0, 0.0));
    if n >= 1 {
        row.push(w);
    }
    for k in 2..=n {
        let next = w * row[k - 1] * 2.0 - row[k - 2];
        row.push(next);
    }
    row
}

/// `h_N(lambda)`: the minimal boundary energy over polynomials of degree `N` with `f(theta) = 1`,
/// computed from the QR factorization of the weighted boundary samples.
pub fn complex_method_norm(lambda: f64, cfg: &ComplexMethodConfig) -> Result<f64> {
    cfg.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let n = cfg.poly_degree;
    let rule = gauss_legendre(cfg.quad_nodes);
    let q = rule.len();
    let mut b = DMatrix::<Complex64>::zeros(2 * q, n + 1);
    for (i, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let (t, jac) = substitute(u);
        let dt = w * jac;
        let w0 = (dt * poisson_kernel(0, cfg.theta, t)?).sqrt();
        let w1 = (lambda * dt * poisson_kernel(1, cfg.theta, t)?).sqrt();
        for (k, v) in chebyshev_row(Complex64::new(0.0, t), n).into_iter().enumerate() {
            b[(i, k)] = v * w0;
        }
        for (k, v) in chebyshev_row(Complex64::new(1.0, t), n).into_iter().enumerate() {
            b[(q + i, k)] = v * w1;
        }
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("boundary samples overflowed".into()));
    }
    let r = b.qr().r();
    let c: Vec<Complex64> = chebyshev_row(Complex64::new(cfg.theta, 0.0), n);
    // Forward substitution for R* y = c.
    let mut y = vec![Complex64::new(0.0, 0.0); n + 1];
    for i in 0..=n {
        let mut acc = c[i];
        for (k, yk) in y.iter().enumerate().take(i) {
            acc -= r[(k, i)].conj() * yk;
        }
        let d = r[(i, i)].conj();
        if d.norm() == 0.0 {
            return Err(Error::Numerical("singular boundary Gram matrix".into()));
        }
        y[i] = acc / d;
    }
    let energy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    Ok(1.0 / energy)
}

/// `sum h_N(lambda_i) |x_i|^2`: the complex-method norm decouples over the eigenbasis.
pub fn complex_method_vector_norm(lambda: &WeightVector, x: &CoupleVector, cfg: &ComplexMethodConfig) -> Result<f64> {
    check_dim(lambda.len(), x.len())?;
    lambda.values().iter().zip(x.coords()).map(|(&l, z)| Ok(complex_method_norm(l, cfg)? * z.norm_sqr())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_measure(j: u8, theta: f64) -> f64 {
        let rule = gauss_legendre(512);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| {
                let (t, jac) = substitute(u);
                w * jac * poisson_kernel(j, theta, t).unwrap()
            })
            .sum()
    }

    #[test]
    fn kernel_masses() {
        for theta in [0.02, 0.1, 0.3, 0.5, 0.8, 0.98] {
            let (m0, m1) = (harmonic_measure(0, theta), harmonic_measure(1, theta));
            assert!((m0 + m1 - 1.0).abs() < 1e-8);
            assert!((m1 - theta).abs() < 1e-8, "theta {theta}: {m1}");
        }
        for t in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            let (a, b) = (poisson_kernel(0, 0.5, t).unwrap(), poisson_kernel(1, 0.5, -t).unwrap());
            assert!((a - b).abs() < 1e-15 * a && a > 0.0);
        }
        assert!(poisson_kernel(0, 0.5, -500.0).unwrap() >= 0.0);
        assert!(poisson_kernel(2, 0.5, 0.0).is_err());
    }

    #[test]
    fn unit_weight_is_exact() {
        for theta in [0.2, 0.5, 0.9] {
            for n in [1, 4, 12] {
                let h = complex_method_norm(1.0, &ComplexMethodConfig::new(theta, n).unwrap()).unwrap();
                assert!((h - 1.0).abs() < 1e-12, "{theta} {n}: {h}");
            }
        }
    }

    #[test]
    fn converges_from_above_to_the_power() {
        let mut prev = f64::INFINITY;
        for n in 2..=12 {
            let h = complex_method_norm(4.0, &ComplexMethodConfig::new(0.5, n).unwrap()).unwrap();
            assert!(h <= prev * (1.0 + 1e-12) && h >= 2.0 - 1e-9, "N = {n}: {h}");
            prev = h;
        }
        assert!((prev - 2.0).abs() <= 0.02, "{prev}");
        assert!(ComplexMethodConfig::new(0.5, 17).is_err());
    }
}
