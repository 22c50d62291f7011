//! Fitting a positive Pick function to samples by nonnegative least squares over candidate
//! atom locations.

use nalgebra::{DMatrix, DVector};

use super::measure::{pick_kernel, ExtendedMeasure, PickFunctionRep};
use crate::couple::log_space;
use crate::error::{Error, Result};
use crate::linalg::lstsq;

/// Relative residual below which a fit counts as feasible.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Outcome of [`fit_pick_measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum PickFit {
    Feasible { rep: PickFunctionRep, residual: f64 },
    Infeasible { residual: f64 },
}

impl PickFit {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PickFit::Feasible { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            PickFit::Feasible { residual, .. } | PickFit::Infeasible { residual } => *residual,
        }
    }
}

/// 200 log-spaced candidate locations in `[1e-8, 1e8]`.
pub fn default_fit_grid() -> Vec<f64> {
    log_space(1e-8, 1e8, 200)
}

/// Nonnegative least squares `min ||a x - b||, x >= 0` by the Lawson-Hanson active set method.
/// Returns the solution and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> Result<(DVector<f64>, f64)> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::InvalidArgument(format!("right side has length {} for {m} rows", b.len())));
    }
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 10.0 * f64::EPSILON * a.amax() * m.max(n) as f64 * b.amax().max(1.0);
    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(m, cols.len(), |i, k| a[(i, cols[k])]);
        let z = lstsq(&sub, b, 1e-15);
        let mut full = DVector::<f64>::zeros(n);
        for (k, &j) in cols.iter().enumerate() {
            full[j] = z[k];
        }
        full
    };
    let mut iterations = 0;
    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;
        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::IterationCap { routine: "nnls", iterations: max_iter });
            }
            let z = solve_passive(&passive);
            if (0..n).filter(|&k| passive[k]).all(|k| z[k] > 0.0) {
                x = z;
                break;
            }
            let step = (0..n)
                .filter(|&k| passive[k] && z[k] <= 0.0)
                .map(|k| x[k] / (x[k] - z[k]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * step;
            for k in 0..n {
                if passive[k] && x[k] <= tol {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    let residual = (b - a * &x).norm();
    Ok((x, residual))
}

/// Maximum number of local grid refinements attempted by [`fit_pick_measure`].
pub const REFINEMENT_ROUNDS: usize = 12;

/// Fits `h_i = m_0 lambda_i + m_inf + sum_j m_j (1 + t_j) lambda_i / (1 + t_j lambda_i)` with
/// nonnegative masses on `{0, inf} U t_grid`. The residual is the root mean square of the
/// relative errors `(fit_i - h_i) / h_i`, and the fit is feasible when it is at most `1e-6`.
///
/// While the fit is infeasible, the geometric midpoints between each active location and its
/// neighbours are added as candidates, so atoms lying between grid points can still be matched.
pub fn fit_pick_measure(points: &[(f64, f64)], t_grid: &[f64]) -> Result<PickFit> {
    fit_pick_measure_with_tol(points, t_grid, FIT_TOLERANCE)
}

/// [`fit_pick_measure`] with the feasibility threshold `tol` on the relative residual.
pub fn fit_pick_measure_with_tol(points: &[(f64, f64)], t_grid: &[f64], tol: f64) -> Result<PickFit> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("fit tolerance {tol} must be positive")));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("no sample points".into()));
    }
    for (i, &(l, h)) in points.iter().enumerate() {
        if !(l > 0.0 && l.is_finite()) || !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} = ({l}, {h}) must be positive")));
        }
        if points[..i].iter().any(|p| p.0 == l) {
            return Err(Error::InvalidArgument(format!("sample location {l} repeated")));
        }
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("candidate locations must be positive and finite".into()));
    }
    let mut locations: Vec<f64> = t_grid.to_vec();
    locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    locations.dedup();
    let b = DVector::from_element(points.len(), 1.0);
    let mut round = 0;
    loop {
        let (masses, residual) = solve_on(points, &locations, &b)?;
        if residual <= tol {
            let n = locations.len();
            let atoms: Vec<(f64, f64)> = (0..n).filter(|&j| masses[j + 1] > 0.0).map(|j| (locations[j], masses[j + 1])).collect();
            let measure = ExtendedMeasure::new(masses[0], masses[n + 1], atoms)?;
            return Ok(PickFit::Feasible { rep: PickFunctionRep::new(measure), residual });
        }
        if round == REFINEMENT_ROUNDS || locations.is_empty() {
            return Ok(PickFit::Infeasible { residual });
        }
        round += 1;
        let mut extra = Vec::new();
        for (j, &t) in locations.iter().enumerate() {
            if masses[j + 1] > 0.0 {
                if j > 0 {
                    extra.push((t * locations[j - 1]).sqrt());
                }
                if j + 1 < locations.len() {
                    extra.push((t * locations[j + 1]).sqrt());
                }
            }
        }
        if extra.is_empty() {
            return Ok(PickFit::Infeasible { residual });
        }
        locations.extend(extra);
        locations.sort_by(|a, b| a.partial_cmp(b).unwrap());
        locations.dedup();
    }
}

/// NNLS on the columns `{0} U locations U {inf}`, rows divided by `h_i` and columns scaled to
/// unit norm. Returns the masses in that order and the relative residual.
fn solve_on(points: &[(f64, f64)], locations: &[f64], b: &DVector<f64>) -> Result<(Vec<f64>, f64)> {
    let cols: Vec<f64> = std::iter::once(0.0).chain(locations.iter().copied()).chain(std::iter::once(f64::INFINITY)).collect();
    let m = points.len();
    let raw = DMatrix::from_fn(m, cols.len(), |i, j| pick_kernel(cols[j], points[i].0) / points[i].1);
    let scales: Vec<f64> = (0..cols.len()).map(|j| raw.column(j).norm()).collect();
    let a = DMatrix::from_fn(m, cols.len(), |i, j| raw[(i, j)] / scales[j]);
    let (z, res) = nnls(&a, b, 30 * cols.len())?;
    Ok(((0..cols.len()).map(|j| z[j] / scales[j]).collect(), res / b.norm()))
}
