//! Zeros of `P = L r` where `r(t) = sum_j c_j / (t - z_j)` has simple real poles, and their
//! classification into the `delta`, `gamma` and complex families.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::polynomial::{shifted_product_derivative_at, RealPolynomial};
use crate::error::{Error, Result};

/// Classified zeros of the domination polynomial. Real zeros `-delta_i` satisfy
/// `L(-delta) P'(-delta) > 0`, real zeros `-gamma_i` satisfy `L(-gamma) P'(-gamma) < 0`, and each
/// complex conjugate pair of zeros `-c, -conj(c)` is listed once with `Im c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSplitting {
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub complex_pairs: Vec<Complex64>,
    pub m: usize,
    /// `L(-delta_i) P'(-delta_i)` for each delta.
    pub delta_signs: Vec<f64>,
    /// `L(-gamma_i) P'(-gamma_i)` for each gamma.
    pub gamma_signs: Vec<f64>,
}

impl ZeroSplitting {
    /// Total number of zeros `2m - 1 + 2(n - m)`.
    pub fn zero_count(&self) -> usize {
        self.deltas.len() + self.gammas.len() + 2 * self.complex_pairs.len()
    }
}

/// Tolerances governing root polishing and classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTolerances {
    /// Two zeros closer than `gap * max(|a|, |b|)` count as a multiple zero.
    pub simple_gap: f64,
    /// A zero with `|Im| <= real_tol * |z|` is real.
    pub real_tol: f64,
    /// `|r'(zeta)|` below `classify_tol * sum |c_j| / (zeta - z_j)^2` is not classifiable.
    pub classify_tol: f64,
}

impl Default for RootTolerances {
    fn default() -> Self {
        Self { simple_gap: 1e-7, real_tol: 1e-9, classify_tol: 1e-10 }
    }
}

fn r_and_derivative(t: Complex64, z: &[f64], c: &[f64]) -> (Complex64, Complex64) {
    let mut r = Complex64::new(0.0, 0.0);
    let mut dr = Complex64::new(0.0, 0.0);
    for (&zj, &cj) in z.iter().zip(c) {
        let inv = (t - zj).inv();
        r += cj * inv;
        dr -= cj * inv * inv;
    }
    (r, dr)
}

fn polish(mut t: Complex64, z: &[f64], c: &[f64], real: bool) -> Complex64 {
    if real {
        t = Complex64::new(t.re, 0.0);
    }
    for _ in 0..100 {
        if z.iter().any(|&zj| t == Complex64::new(zj, 0.0)) {
            break;
        }
        let (r, dr) = r_and_derivative(t, z, c);
        if dr.norm() == 0.0 || !dr.re.is_finite() {
            break;
        }
        let mut step = r / dr;
        if real {
            step = Complex64::new(step.re, 0.0);
        }
        // Damped update: never step across a pole or increase |r| by large factors.
        let mut candidate = t - step;
        let mut tries = 0;
        while tries < 30 {
            let (rc, _) = r_and_derivative(candidate, z, c);
            if rc.norm().is_finite() && rc.norm() <= 2.0 * r.norm() {
                break;
            }
            step *= 0.5;
            candidate = t - step;
            tries += 1;
        }
        t = candidate;
        if step.norm() <= 4.0 * f64::EPSILON * t.norm() {
            break;
        }
    }
    t
}

/// Zeros of the numerator of `r(t) = sum c_j / (t - z_j)` (degree `len - 1` when
/// `sum c_j != 0`), from the eigenvalues of the diagonal-plus-rank-one matrix
/// `diag(z) - a b^T` with `a_j b_j = c_j z_j / sum c`, deflated by its known null vector and
/// polished by Newton steps on `r`. Poles must be nonzero and distinct; all `c_j` nonzero.
pub fn rational_zeros(z: &[f64], c: &[f64], tol: &RootTolerances) -> Result<Vec<Complex64>> {
    let n = z.len();
    if n != c.len() {
        return Err(Error::InvalidArgument("poles and residues differ in length".into()));
    }
    if n <= 1 {
        return Ok(vec![]);
    }
    let s: f64 = c.iter().sum();
    let scale: f64 = c.iter().map(|v| v.abs()).sum();
    if s.abs() <= 1e-14 * scale {
        return Err(Error::SplittingInconsistent("leading coefficient vanishes".into()));
    }
    let d: Vec<f64> = c.iter().zip(z).map(|(&cj, &zj)| (cj * zj).abs().sqrt()).collect();
    let a: Vec<f64> = (0..n).map(|j| c[j] * z[j] / s / d[j]).collect();
    let mut m = DMatrix::<f64>::from_fn(n, n, |i, k| -a[i] * d[k]);
    for i in 0..n {
        m[(i, i)] += z[i];
    }
    // Null vector v = diag(z)^{-1} a; deflate with the Householder reflector mapping v to e_1.
    let v: Vec<f64> = (0..n).map(|j| a[j] / z[j]).collect();
    let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut w = v.clone();
    w[0] += if v[0] >= 0.0 { vnorm } else { -vnorm };
    let wn2: f64 = w.iter().map(|x| x * x).sum();
    let h = DMatrix::<f64>::from_fn(n, n, |i, k| if i == k { 1.0 } else { 0.0 } - 2.0 * w[i] * w[k] / wn2);
    let hmh = &h * m * &h;
    let block = hmh.view((1, 1), (n - 1, n - 1)).into_owned();
    let eig = block.complex_eigenvalues();
    let mut roots: Vec<Complex64> = Vec::with_capacity(n - 1);
    for e in eig.iter() {
        let start = Complex64::new(e.re, e.im);
        let real = e.im.abs() <= tol.real_tol * e.norm().max(f64::MIN_POSITIVE) || e.im == 0.0;
        let mut root = polish(start, z, c, real);
        if !real && root.im.abs() <= tol.real_tol * root.norm() {
            root = polish(Complex64::new(root.re, 0.0), z, c, true);
        }
        if !root.re.is_finite() || !root.im.is_finite() {
            return Err(Error::Numerical("root polishing diverged".into()));
        }
        roots.push(root);
    }
    for i in 0..roots.len() {
        for j in 0..i {
            let gap = (roots[i] - roots[j]).norm();
            if gap <= tol.simple_gap * roots[i].norm().max(roots[j].norm()) {
                return Err(Error::NearMultipleZero(format!(
                    "zeros {} and {} are not separated",
                    roots[i], roots[j]
                )));
            }
        }
    }
    Ok(roots)
}

/// Classifies zeros of `P = L r` given the poles `z_j` (zeros of `L`) and residues
/// `c_j = P(z_j) / L'(z_j)`. Extra zeros of `P` that coincide with poles (from vanishing
/// residues) are passed in `forced_deltas` and `forced_gammas` as positive numbers.
pub fn classify(
    z: &[f64],
    c: &[f64],
    forced_deltas: &[f64],
    forced_gammas: &[f64],
    tol: &RootTolerances,
) -> Result<ZeroSplitting> {
    let roots = rational_zeros(z, c, tol)?;
    let mut deltas = forced_deltas.to_vec();
    let mut gammas = forced_gammas.to_vec();
    // Zeros shared with L have L(-r) P'(-r) = 0.
    let mut delta_signs = vec![0.0; deltas.len()];
    let mut gamma_signs = vec![0.0; gammas.len()];
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for root in roots {
        if root.im == 0.0 {
            let zeta = root.re;
            let (_, dr) = r_and_derivative(root, z, c);
            let magnitude: f64 = z.iter().zip(c).map(|(&zj, &cj)| cj.abs() / ((zeta - zj) * (zeta - zj))).sum();
            let dr = dr.re;
            if dr.abs() <= tol.classify_tol * magnitude {
                return Err(Error::NearMultipleZero(format!("real zero {zeta} not classifiable")));
            }
            // L(zeta) P'(zeta) = L(zeta)^2 r'(zeta).
            let l_sq: f64 = z.iter().map(|&zj| (zeta - zj) * (zeta - zj)).product();
            if dr > 0.0 {
                deltas.push(-zeta);
                delta_signs.push(l_sq * dr);
            } else {
                gammas.push(-zeta);
                gamma_signs.push(l_sq * dr);
            }
        } else if root.im > 0.0 {
            upper.push(root);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower {
        return Err(Error::SplittingInconsistent(format!(
            "{} zeros above the axis but {} below",
            upper.len(),
            lower
        )));
    }
    if deltas.len() != gammas.len() + 1 {
        return Err(Error::SplittingInconsistent(format!(
            "{} deltas and {} gammas",
            deltas.len(),
            gammas.len()
        )));
    }
    // A zero -c with Im(-c) < 0 has Im c > 0; keep that representative.
    let complex_pairs: Vec<Complex64> = upper.iter().map(|r| -r.conj()).collect();
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].partial_cmp(&deltas[b]).unwrap());
    let deltas_sorted = order.iter().map(|&i| deltas[i]).collect();
    let delta_signs_sorted = order.iter().map(|&i| delta_signs[i]).collect();
    let mut order: Vec<usize> = (0..gammas.len()).collect();
    order.sort_by(|&a, &b| gammas[a].partial_cmp(&gammas[b]).unwrap());
    let gammas_sorted = order.iter().map(|&i| gammas[i]).collect();
    let gamma_signs_sorted = order.iter().map(|&i| gamma_signs[i]).collect();
    let m = deltas.len();
    Ok(ZeroSplitting {
        deltas: deltas_sorted,
        gammas: gammas_sorted,
        complex_pairs,
        m,
        delta_signs: delta_signs_sorted,
        gamma_signs: gamma_signs_sorted,
    })
}

/// Splits the zeros of `P` relative to `L` with default tolerances.
pub fn split_zeros(p: &RealPolynomial, l: &RealPolynomial) -> Result<ZeroSplitting> {
    split_zeros_with(p, l, &RootTolerances::default())
}

/// Splits the zeros of `P` relative to `L`. `L` must carry its real, simple roots; residues
/// `P(z_j) / L'(z_j)` are read from the stored node values of `P` where available.
///
/// A vanishing residue means `P` and `L` share the zero `z_j`. It is assigned to the family it
/// joins in the limit of a vanishing coordinate: `gamma` where `L'(z_j) > 0`, `delta` where
/// `L'(z_j) < 0`.
pub fn split_zeros_with(p: &RealPolynomial, l: &RealPolynomial, tol: &RootTolerances) -> Result<ZeroSplitting> {
    let poles = l
        .real_roots()
        .ok_or_else(|| Error::InvalidArgument("L must be given by its roots".into()))?
        .to_vec();
    if p.degree() + 1 > poles.len() {
        return Err(Error::DegreeBound(format!(
            "P has degree {} but L has {} zeros",
            p.degree(),
            poles.len()
        )));
    }
    let shifts: Vec<f64> = poles.iter().map(|z| -z).collect();
    let mut z_active = Vec::new();
    let mut c_active = Vec::new();
    let mut forced_deltas = Vec::new();
    let mut forced_gammas = Vec::new();
    for (k, &zk) in poles.iter().enumerate() {
        let value = match p.nodes().iter().position(|&t| t == zk) {
            Some(i) => p.node_values()[i],
            None => p.eval(zk),
        };
        let dl = shifted_product_derivative_at(k, &shifts);
        if value == 0.0 {
            if dl > 0.0 {
                forced_gammas.push(-zk);
            } else {
                forced_deltas.push(-zk);
            }
        } else {
            z_active.push(zk);
            c_active.push(value / dl);
        }
    }
    let split = classify(&z_active, &c_active, &forced_deltas, &forced_gammas, tol)?;
    if split.zero_count() != poles.len() - 1 {
        return Err(Error::SplittingInconsistent(format!(
            "{} zeros found for degree {}",
            split.zero_count(),
            poles.len() - 1
        )));
    }
    Ok(split)
}
