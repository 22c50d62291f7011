//! The reflections `h~(lambda) = lambda h(1/lambda)` and `h*(lambda) = 1 / h(1/lambda)`, and
//! Donoghue's transfer `k(lambda) = lambda h((1 - lambda) / lambda)` to the unit interval.

use super::fit::{fit_pick_measure, PickFit};
use super::measure::PickFunctionRep;
use crate::error::{Error, Result};

/// `lambda -> lambda h(1/lambda)`.
pub fn tilde(h: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    move |l| l * h(1.0 / l)
}

/// `lambda -> 1 / h(1/lambda)`.
pub fn star(h: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    move |l| 1.0 / h(1.0 / l)
}

/// Both reflections of a measure-backed function, each re-fitted on the sample grid as a
/// membership check.
#[derive(Debug, Clone, PartialEq)]
pub struct DualTransforms {
    /// `h~`, represented exactly by the reflected measure.
    pub tilde: PickFunctionRep,
    pub tilde_fit: PickFit,
    pub star_fit: PickFit,
}

impl DualTransforms {
    pub fn both_feasible(&self) -> bool {
        self.tilde_fit.is_feasible() && self.star_fit.is_feasible()
    }
}

/// Computes `h~` and fits both `h~` and `h*` on `sample` with candidate atoms `t_grid`.
pub fn dual_transforms(h: &PickFunctionRep, sample: &[f64], t_grid: &[f64]) -> Result<DualTransforms> {
    if h.measure.is_zero() {
        return Err(Error::InvalidArgument("the zero measure has no reflections".into()));
    }
    let tilde_rep = PickFunctionRep::new(h.measure.reflected()?);
    let hv = |l: f64| h.value(l);
    let t = tilde(hv);
    let s = star(hv);
    let tilde_fit = fit_pick_measure(&sample.iter().map(|&l| (l, t(l))).collect::<Vec<_>>(), t_grid)?;
    let star_fit = fit_pick_measure(&sample.iter().map(|&l| (l, s(l))).collect::<Vec<_>>(), t_grid)?;
    Ok(DualTransforms { tilde: tilde_rep, tilde_fit, star_fit })
}

fn check_unit(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    Ok(())
}

/// `k(lambda) = lambda h((1 - lambda) / lambda)` for `lambda in (0, 1)`.
pub fn donoghue_transform(h: impl Fn(f64) -> f64, lambda: f64) -> Result<f64> {
    check_unit(lambda)?;
    Ok(lambda * h((1.0 - lambda) / lambda))
}

/// The inverse substitution `h(mu) = (1 + mu) k(1 / (1 + mu))`.
pub fn donoghue_inverse(k: impl Fn(f64) -> f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu = {mu} must be positive")));
    }
    Ok((1.0 + mu) * k(1.0 / (1.0 + mu)))
}

/// The measure of `h` carried to `[0, 1]` by `s = 1 / (1 + t)`, representing
/// `k(lambda) = sum m lambda (1 - lambda) / (s lambda + (1 - s)(1 - lambda))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DonoghueMeasure {
    /// `(s, mass)` pairs; `s = 1` is the image of `t = 0` and `s = 0` that of `t = inf`.
    pub atoms: Vec<(f64, f64)>,
}

impl DonoghueMeasure {
    pub fn from_pick(h: &PickFunctionRep) -> Self {
        let atoms = h
            .measure
            .discretized()
            .into_iter()
            .map(|(t, m)| (if t.is_infinite() { 0.0 } else { 1.0 / (1.0 + t) }, m))
            .collect();
        Self { atoms }
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        check_unit(lambda)?;
        Ok(self
            .atoms
            .iter()
            .map(|&(s, m)| m * lambda * (1.0 - lambda) / (s * lambda + (1.0 - s) * (1.0 - lambda)))
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couple::log_space;
    use crate::pick::fit::default_fit_grid;
    use crate::pick::measure::ExtendedMeasure;

    #[test]
    fn power_reflections() {
        let t = tilde(|l: f64| l.powf(0.3));
        let s = star(|l: f64| l.powf(0.3));
        for l in [0.1, 2.0, 30.0] {
            assert!((t(l) - l.powf(0.7)).abs() < 1e-12 * l.powf(0.7));
            assert!((s(l) - l.powf(0.3)).abs() < 1e-12 * l.powf(0.3));
        }
        let t = tilde(|_| 1.0);
        let s = star(|_| 1.0);
        assert_eq!((t(3.0), s(3.0)), (3.0, 1.0));
    }

    #[test]
    fn random_samples_stay_in_the_class() {
        let mut rng = crate::random::rng(21);
        let sample = log_space(0.05, 20.0, 6);
        for _ in 0..5 {
            let h = PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 3));
            let d = dual_transforms(&h, &sample, &default_fit_grid()).unwrap();
            assert!(d.both_feasible(), "{:?} {:?}", d.tilde_fit.residual(), d.star_fit.residual());
            for &l in &sample {
                assert!((d.tilde.value(l) - l * h.value(1.0 / l)).abs() < 1e-9 * d.tilde.value(l));
            }
        }
    }

    #[test]
    fn donoghue_examples() {
        assert!((donoghue_transform(|l| l, 0.3).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(donoghue_transform(|_| 1.0, 0.3).unwrap(), 0.3);
        let h = PickFunctionRep::new(ExtendedMeasure::geometric(0.5).unwrap());
        assert!((donoghue_transform(|l| h.value(l), 0.5).unwrap() - 0.5).abs() < 1e-10);
        assert!(donoghue_transform(|l| l, 1.0).is_err());
    }

    #[test]
    fn donoghue_measure_and_inverse() {
        let mut rng = crate::random::rng(4);
        let h = PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 4));
        let dm = DonoghueMeasure::from_pick(&h);
        for lam in [0.01, 0.2, 0.5, 0.9, 0.999] {
            let k = donoghue_transform(|l| h.value(l), lam).unwrap();
            assert!((dm.eval(lam).unwrap() - k).abs() <= 1e-12 * k);
        }
        for mu in log_space(1e-3, 1e3, 13) {
            let back = donoghue_inverse(|l| donoghue_transform(|v| h.value(v), l).unwrap(), mu).unwrap();
            assert!((back - h.value(mu)).abs() <= 1e-10 * h.value(mu));
        }
    }
}
