//! Real polynomials in monomial or Newton form, with the product helpers used at the
//! interpolation nodes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Basis in which [`RealPolynomial::coefficients`] are stated.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `sum c_k t^k`, lowest degree first.
    Monomial,
    /// `sum c_k prod_{j<k} (t - centers_j)`.
    Newton { centers: Vec<f64> },
}

/// A real polynomial. When built by interpolation it remembers its nodes and node values; when
/// built from roots it remembers the roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
    basis: Basis,
    degree: usize,
    nodes: Vec<f64>,
    node_values: Vec<f64>,
    /// Barycentric weights `1 / prod_{k != j} (node_j - node_k)` of interpolated polynomials.
    weights: Vec<f64>,
    real_roots: Option<Vec<f64>>,
}

impl RealPolynomial {
    pub fn from_monomial(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficients"));
        }
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        let degree = coefficients.len() - 1;
        Ok(Self { coefficients, basis: Basis::Monomial, degree, nodes: vec![], node_values: vec![], weights: vec![], real_roots: None })
    }

    /// Monic polynomial `prod (t - r_j)` with real roots, remembered for product evaluation.
    pub fn from_real_roots(roots: &[f64]) -> Result<Self> {
        let mut coefficients = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; coefficients.len() + 1];
            for (k, &c) in coefficients.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coefficients = next;
        }
        let mut p = Self::from_monomial(coefficients)?;
        p.real_roots = Some(roots.to_vec());
        Ok(p)
    }

    /// Interpolating polynomial of degree `< nodes.len()` through `(nodes_j, values_j)`. The
    /// coefficients are Newton divided differences; evaluation uses the barycentric form
    /// `l(t) sum_j w_j v_j / (t - node_j)`, which stays accurate far from the nodes where the
    /// nested Newton form loses all digits.
    pub fn interpolate(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::InvalidArgument("interpolation needs matching nonempty nodes/values".into()));
        }
        let n = nodes.len();
        for i in 0..n {
            for j in 0..i {
                if nodes[i] == nodes[j] {
                    return Err(Error::InvalidArgument("interpolation nodes must be distinct".into()));
                }
            }
        }
        let mut dd = values.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
            }
        }
        if dd.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("divided differences"));
        }
        let mut degree = n - 1;
        while degree > 0 && dd[degree] == 0.0 {
            degree -= 1;
        }
        let weights = (0..n)
            .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product::<f64>())
            .collect();
        Ok(Self {
            coefficients: dd,
            basis: Basis::Newton { centers: nodes[..n - 1].to_vec() },
            degree,
            nodes: nodes.to_vec(),
            node_values: values.to_vec(),
            weights,
            real_roots: None,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn real_roots(&self) -> Option<&[f64]> {
        self.real_roots.as_deref()
    }

    /// Coefficient of `t^degree`.
    pub fn leading_coefficient(&self) -> f64 {
        if !self.weights.is_empty() && self.degree + 1 == self.nodes.len() {
            return self.weights.iter().zip(&self.node_values).map(|(w, v)| w * v).sum();
        }
        self.coefficients[self.degree]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_complex(Complex64::new(t, 0.0)).re
    }

    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        if let Some(roots) = &self.real_roots {
            return roots.iter().fold(Complex64::new(self.leading_coefficient(), 0.0), |acc, &r| acc * (t - r));
        }
        if !self.weights.is_empty() {
            if let Some(j) = self.nodes.iter().position(|&x| t == Complex64::new(x, 0.0)) {
                return Complex64::new(self.node_values[j], 0.0);
            }
            let l = self.nodes.iter().fold(Complex64::new(1.0, 0.0), |acc, &x| acc * (t - x));
            let sum: Complex64 = (0..self.nodes.len())
                .map(|j| self.weights[j] * self.node_values[j] / (t - self.nodes[j]))
                .sum();
            return l * sum;
        }
        match &self.basis {
            Basis::Monomial => self
                .coefficients
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c),
            Basis::Newton { centers } => {
                let mut acc = Complex64::new(self.coefficients[self.degree], 0.0);
                for k in (0..self.degree).rev() {
                    acc = acc * (t - centers[k]) + self.coefficients[k];
                }
                acc
            }
        }
    }

    /// Monomial coefficients, lowest degree first.
    pub fn to_monomial(&self) -> Vec<f64> {
        match &self.basis {
            Basis::Monomial => self.coefficients.clone(),
            Basis::Newton { centers } => {
                let mut out = vec![self.coefficients[self.degree]];
                for k in (0..self.degree).rev() {
                    // out <- out * (t - centers_k) + c_k
                    let mut next = vec![0.0; out.len() + 1];
                    for (j, &c) in out.iter().enumerate() {
                        next[j + 1] += c;
                        next[j] -= centers[k] * c;
                    }
                    next[0] += self.coefficients[k];
                    out = next;
                }
                out
            }
        }
    }

    /// Derivative in monomial form.
    pub fn derivative(&self) -> Result<Self> {
        let m = self.to_monomial();
        if m.len() <= 1 {
            return Self::from_monomial(vec![0.0]);
        }
        Self::from_monomial(m.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Largest relative deviation between the stored node values and the polynomial evaluated at
    /// the nodes.
    pub fn node_reproduction_error(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.node_values)
            .map(|(&t, &v)| (self.eval(t) - v).abs() / v.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

/// `prod_j (t + s_j)`: the node polynomial with zeros at `-s_j`.
pub fn shifted_product(t: Complex64, shifts: &[f64]) -> Complex64 {
    shifts.iter().fold(Complex64::new(1.0, 0.0), |acc, &s| acc * (t + s))
}

/// Derivative of `prod_j (t + s_j)` at its own zero `-s_k`, as a product of differences.
pub fn shifted_product_derivative_at(k: usize, shifts: &[f64]) -> f64 {
    shifts
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .fold(1.0, |acc, (_, &s)| acc * (s - shifts[k]))
}

/// `prod_j (t + c_j)(t + conj c_j)`, which equals `prod |t + c_j|^2` for real `t`.
pub fn conjugate_pair_product(t: Complex64, pairs: &[Complex64]) -> Complex64 {
    pairs.iter().fold(Complex64::new(1.0, 0.0), |acc, &c| acc * (t + c) * (t + c.conj()))
}

/// `prod_j (t + c_j)` for complex shifts.
pub fn complex_shift_product(t: Complex64, shifts: &[Complex64]) -> Complex64 {
    shifts.iter().fold(Complex64::new(1.0, 0.0), |acc, &c| acc * (t + c))
}
