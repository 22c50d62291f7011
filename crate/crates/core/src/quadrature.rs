//! Gaussian quadrature rules.

use nalgebra::DMatrix;

/// Nodes and weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre rule on `[-1, 1]` by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Jacobi rule on `[0, 1]` for the weight `u^b (1 - u)^a` (`a, b > -1`) by the
/// Golub-Welsch eigenvalue method. `total_mass` is the integral of the weight.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64, total_mass: f64) -> Rule {
    // Recurrence coefficients of the monic Jacobi polynomials for (1-x)^a (1+x)^b on [-1, 1].
    let alpha = |k: usize| -> f64 {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        if k == 0.0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        }
    };
    let beta = |k: usize| -> f64 {
        let k = k as f64;
        if k == 1.0 {
            4.0 * (1.0 + a) * (1.0 + b) / ((a + b + 2.0).powi(2) * (a + b + 3.0))
        } else {
            let s = 2.0 * k + a + b;
            4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        }
    };
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = alpha(k);
        if k + 1 < n {
            let off = beta(k + 1).sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let off: Vec<f64> = (1..=n).map(|k| beta(k).sqrt()).collect();
    // Orthonormal recurrence at x: (p_n, p_n', sum_{k<n} p_k^2).
    let recur = |x: f64| -> (f64, f64, f64) {
        let (mut p0, mut p1, mut d0, mut d1, mut sum) = (0.0, 1.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            sum += p1 * p1;
            let back = if k == 0 { 0.0 } else { off[k - 1] };
            let p2 = ((x - alpha(k)) * p1 - back * p0) / off[k];
            let d2 = (p1 + (x - alpha(k)) * d1 - back * d0) / off[k];
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        (p1, d1, sum)
    };
    let eigenvalues = jm.symmetric_eigenvalues();
    let mut pairs: Vec<(f64, f64)> = eigenvalues
        .iter()
        .map(|&x0| {
            let mut x = x0;
            for _ in 0..3 {
                let (p, d, _) = recur(x);
                if d == 0.0 {
                    break;
                }
                let step = p / d;
                if !step.is_finite() || step.abs() > 1e-6 {
                    break;
                }
                x -= step;
            }
            let (_, _, sum) = recur(x);
            ((1.0 + x) / 2.0, total_mass / sum)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(20);
        assert!((r.integrate(|x| x.powi(10)) - 2.0 / 11.0).abs() < 1e-14);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let r = gauss_legendre(512);
        assert!((r.integrate(|x| x.exp()) - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn jacobi_moments() {
        // Weight u^{-1/2} (1-u)^{-1/2} on [0,1]: total mass pi, first moment pi/2.
        let r = gauss_jacobi_unit(64, -0.5, -0.5, std::f64::consts::PI);
        assert!((r.integrate(|_| 1.0) - std::f64::consts::PI).abs() < 1e-12);
        assert!((r.integrate(|u| u) - std::f64::consts::PI / 2.0).abs() < 1e-12);
        // Weight u^{-0.3} (1-u)^{-0.7}: mass pi / sin(0.3 pi), mean 0.7.
        let mass = std::f64::consts::PI / (0.3 * std::f64::consts::PI).sin();
        let r = gauss_jacobi_unit(64, -0.7, -0.3, mass);
        assert!((r.integrate(|u| u) / mass - 0.7).abs() < 1e-12);
    }
}
