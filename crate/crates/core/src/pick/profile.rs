//! Growth profiles of positive functions: the dilation function `H(t) = sup_s h(st) / h(s)` and
//! two-sided power envelopes.

/// Relative slack allowed in the grid comparisons below.
pub const GRID_TOL: f64 = 1e-9;

/// Outcome of a comparison over a finite grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCheck {
    pub pass: bool,
    /// Largest value of `left / right` over the grid (at most `1 + 1e-9` on a pass).
    pub worst_ratio: f64,
    /// The grid point attaining `worst_ratio` when the check fails.
    pub witness: Option<(f64, f64)>,
}

/// `H(t) = max over s in s_grid of h(st) / h(s)` for every `t` in `t_grid`.
pub fn type_h_profile(h: impl Fn(f64) -> f64, s_grid: &[f64], t_grid: &[f64]) -> Vec<(f64, f64)> {
    t_grid
        .iter()
        .map(|&t| (t, s_grid.iter().map(|&s| h(s * t) / h(s)).fold(f64::NEG_INFINITY, f64::max)))
        .collect()
}

/// Checks `h(lambda) / h(mu) <= H(lambda / mu) (1 + 1e-9)` over all pairs of `grid`. The
/// witness is the worst pair `(lambda, mu)`.
pub fn type_h_bound_check(h: impl Fn(f64) -> f64, big_h: impl Fn(f64) -> f64, grid: &[f64]) -> GridCheck {
    let mut worst = (f64::NEG_INFINITY, (f64::NAN, f64::NAN));
    for &l in grid {
        for &m in grid {
            let r = h(l) / h(m) / big_h(l / m);
            if r > worst.0 {
                worst = (r, (l, m));
            }
        }
    }
    let pass = worst.0 <= 1.0 + GRID_TOL;
    GridCheck { pass, worst_ratio: worst.0, witness: (!pass).then_some(worst.1) }
}

/// Checks `min(l^a, l^b) <= h(c l) / h(c) <= max(l^a, l^b)` on the grid, `a = theta_minus`,
/// `b = theta_plus`. The ratio reported is the larger of the two sides' violations, and the
/// witness is `(l, h(c l) / h(c))`.
pub fn exponent_envelope_check(
    h: impl Fn(f64) -> f64,
    theta_minus: f64,
    theta_plus: f64,
    c: f64,
    grid: &[f64],
) -> crate::Result<GridCheck> {
    if !(theta_minus <= theta_plus) {
        return Err(crate::Error::InvalidArgument(format!("theta_minus = {theta_minus} exceeds theta_plus = {theta_plus}")));
    }
    if !(c > 0.0) {
        return Err(crate::Error::InvalidArgument(format!("c = {c} must be positive")));
    }
    let hc = h(c);
    let mut worst = (f64::NEG_INFINITY, (f64::NAN, f64::NAN));
    for &l in grid {
        let v = h(c * l) / hc;
        let (p, q) = (l.powf(theta_minus), l.powf(theta_plus));
        let r = (v / p.max(q)).max(p.min(q) / v);
        if r > worst.0 {
            worst = (r, (l, v));
        }
    }
    let pass = worst.0 <= 1.0 + GRID_TOL;
    Ok(GridCheck { pass, worst_ratio: worst.0, witness: (!pass).then_some(worst.1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couple::log_space;
    use crate::pick::measure::{ExtendedMeasure, PickFunctionRep};

    #[test]
    fn powers_have_power_profiles() {
        let grid = log_space(1e-3, 1e3, 25);
        for (t, ht) in type_h_profile(|l| l.powf(0.3), &grid, &grid) {
            assert!((ht - t.powf(0.3)).abs() <= 1e-12 * t.powf(0.3));
        }
        let prof = type_h_profile(|l| 2.0 * l / (1.0 + l), &grid, &[1.0]);
        assert_eq!(prof[0].1, 1.0);
        let c = type_h_bound_check(|l| l.powf(0.3), |t| t.powf(0.3), &grid);
        assert!(c.pass && (c.worst_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pick_samples_are_quasi_concave() {
        let grid = log_space(1e-3, 1e3, 25);
        let mut rng = crate::random::rng(5);
        for _ in 0..5 {
            let h = PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 3));
            for (t, ht) in type_h_profile(|l| h.value(l), &grid, &grid) {
                assert!(ht <= t.max(1.0) + 1e-9);
            }
            assert!(type_h_bound_check(|l| h.value(l), |t| t.max(1.0), &grid).pass);
        }
    }

    #[test]
    fn square_violates_quasi_concavity() {
        let c = type_h_bound_check(|l| l * l, |t| t.max(1.0), &[1.0, 2.0]);
        assert!(!c.pass);
        assert_eq!(c.witness, Some((2.0, 1.0)));
        assert_eq!(c.worst_ratio, 2.0);
    }

    #[test]
    fn envelopes() {
        let grid = log_space(1e-3, 1e3, 41);
        let c = exponent_envelope_check(|l| l.powf(0.4), 0.4, 0.4, 3.0, &grid).unwrap();
        assert!(c.pass && (c.worst_ratio - 1.0).abs() < 1e-12);
        let c = exponent_envelope_check(|l| l.powf(0.3) + l.powf(0.7), 0.3, 0.7, 1.0, &grid).unwrap();
        assert!(c.pass);
        let c = exponent_envelope_check(|l| l, 0.5, 0.5, 1.0, &grid).unwrap();
        assert!(!c.pass && c.witness.is_some());
        assert!(exponent_envelope_check(|l| l, 0.6, 0.5, 1.0, &grid).is_err());
    }
}
