//! Positive measures on `[0, inf]` and the positive Pick functions they represent.

use crate::couple::{big_k_functional, check_dim, CoupleVector, WeightVector};
use crate::error::{Error, Result};
use crate::quadrature::gauss_jacobi_unit;
use crate::random::{log_uniform, Prng};
use rand::Rng;

/// Default number of quadrature nodes attached to a density.
pub const DENSITY_NODES: usize = 256;

/// Named absolutely continuous parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    /// `c_theta t^{-theta} / (1 + t) dt` with `c_theta = sin(theta pi) / pi`, a probability
    /// measure whose Pick function is `lambda^theta`.
    Geometric { theta: f64 },
}

/// A density together with the quadrature rule used to integrate against it: the measure is
/// replaced by `sum_j weights_j delta_{nodes_j}` with nodes in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub kind: DensityKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Density {
    /// Geometric density with an `n`-point Gauss-Jacobi rule in `u = t / (1 + t)`, where the
    /// measure becomes `c_theta u^{-theta} (1 - u)^{theta - 1} du`.
    pub fn geometric(theta: f64, n: usize) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidArgument(format!("geometric density needs 0 < theta < 1, got {theta}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("density rule needs at least one node".into()));
        }
        let pi = std::f64::consts::PI;
        let s = (theta * pi).sin();
        let rule = gauss_jacobi_unit(n, theta - 1.0, -theta, pi / s);
        let c = s / pi;
        Ok(Self {
            kind: DensityKind::Geometric { theta },
            nodes: rule.nodes.iter().map(|u| u / (1.0 - u)).collect(),
            weights: rule.weights.iter().map(|w| w * c).collect(),
        })
    }

    /// The same density mirrored by `t -> 1/t`.
    fn reflected(&self) -> Result<Self> {
        match self.kind {
            DensityKind::Geometric { theta } => Self::geometric(1.0 - theta, self.nodes.len()),
        }
    }
}

/// `mass_at_zero delta_0 + mass_at_inf delta_inf + sum atoms + density` on `[0, inf]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMeasure {
    pub mass_at_zero: f64,
    pub mass_at_inf: f64,
    atoms: Vec<(f64, f64)>,
    density: Option<Density>,
}

impl ExtendedMeasure {
    /// Atoms are `(t, mass)` with distinct finite `t > 0` and `mass > 0`.
    pub fn new(mass_at_zero: f64, mass_at_inf: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if !(mass_at_zero >= 0.0 && mass_at_inf >= 0.0 && mass_at_zero.is_finite() && mass_at_inf.is_finite()) {
            return Err(Error::InvalidArgument("endpoint masses must be finite and nonnegative".into()));
        }
        for (i, &(t, m)) in atoms.iter().enumerate() {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom {i} has location {t}")));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom {i} has mass {m}")));
            }
            if atoms[..i].iter().any(|&(s, _)| s == t) {
                return Err(Error::InvalidArgument(format!("atom location {t} repeated")));
            }
        }
        Ok(Self { mass_at_zero, mass_at_inf, atoms, density: None })
    }

    pub fn dirac_zero() -> Self {
        Self { mass_at_zero: 1.0, mass_at_inf: 0.0, atoms: vec![], density: None }
    }

    pub fn dirac_inf() -> Self {
        Self { mass_at_zero: 0.0, mass_at_inf: 1.0, atoms: vec![], density: None }
    }

    /// The geometric measure of exponent `theta` with the default rule.
    pub fn geometric(theta: f64) -> Result<Self> {
        Self::geometric_with_nodes(theta, DENSITY_NODES)
    }

    pub fn geometric_with_nodes(theta: f64, nodes: usize) -> Result<Self> {
        Ok(Self { mass_at_zero: 0.0, mass_at_inf: 0.0, atoms: vec![], density: Some(Density::geometric(theta, nodes)?) })
    }

    /// Adds a density part scaled by `scale > 0`.
    pub fn with_density(mut self, mut density: Density, scale: f64) -> Result<Self> {
        if self.density.is_some() {
            return Err(Error::InvalidArgument("measure already carries a density".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("density scale {scale} must be positive")));
        }
        density.weights.iter_mut().for_each(|w| *w *= scale);
        self.density = Some(density);
        Ok(self)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_at_zero
            + self.mass_at_inf
            + self.atoms.iter().map(|a| a.1).sum::<f64>()
            + self.density.as_ref().map_or(0.0, |d| d.weights.iter().sum())
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass() == 0.0
    }

    /// All masses multiplied by `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale {c} must be finite and nonnegative")));
        }
        let mut out = self.clone();
        out.mass_at_zero *= c;
        out.mass_at_inf *= c;
        if c == 0.0 {
            out.atoms.clear();
            out.density = None;
        } else {
            out.atoms.iter_mut().for_each(|a| a.1 *= c);
            if let Some(d) = out.density.as_mut() {
                d.weights.iter_mut().for_each(|w| *w *= c);
            }
        }
        Ok(out)
    }

    /// Image under `t -> 1/t`, which swaps the endpoint masses.
    pub fn reflected(&self) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(t, m)| (1.0 / t, m)).collect();
        atoms.reverse();
        let density = match &self.density {
            Some(d) => {
                let mass: f64 = d.weights.iter().sum();
                let mut r = d.reflected()?;
                let rmass: f64 = r.weights.iter().sum();
                r.weights.iter_mut().for_each(|w| *w *= mass / rmass);
                Some(r)
            }
            None => None,
        };
        Ok(Self { mass_at_zero: self.mass_at_inf, mass_at_inf: self.mass_at_zero, atoms, density })
    }

    /// `int f dmeasure`, with `at_zero` and `at_inf` the values (or limits) of `f` at the
    /// endpoints. Atoms are integrated exactly and the density through its rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, at_zero: f64, at_inf: f64) -> f64 {
        let mut s = 0.0;
        if self.mass_at_zero > 0.0 {
            s += self.mass_at_zero * at_zero;
        }
        if self.mass_at_inf > 0.0 {
            s += self.mass_at_inf * at_inf;
        }
        s += self.atoms.iter().map(|&(t, m)| m * f(t)).sum::<f64>();
        if let Some(d) = &self.density {
            s += d.nodes.iter().zip(&d.weights).map(|(&t, &w)| w * f(t)).sum::<f64>();
        }
        s
    }

    /// Every point mass of the discretized measure as `(t, mass)`, with `t = 0` and `t = inf`
    /// for the endpoints.
    pub fn discretized(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if self.mass_at_zero > 0.0 {
            out.push((0.0, self.mass_at_zero));
        }
        out.extend_from_slice(&self.atoms);
        if let Some(d) = &self.density {
            out.extend(d.nodes.iter().copied().zip(d.weights.iter().copied()));
        }
        if self.mass_at_inf > 0.0 {
            out.push((f64::INFINITY, self.mass_at_inf));
        }
        out
    }

    /// A random measure: small endpoint masses, `atoms` log-uniform atoms in `[1e-2, 1e2]`,
    /// and with probability one half a geometric density of random exponent.
    pub fn random(rng: &mut Prng, atoms: usize) -> Self {
        let mut list: Vec<(f64, f64)> = Vec::with_capacity(atoms);
        while list.len() < atoms {
            let t = log_uniform(rng, 1e-2, 1e2);
            if list.iter().all(|&(s, _)| s != t) {
                list.push((t, rng.random_range(0.1..1.0)));
            }
        }
        let m = Self::new(rng.random_range(0.0..0.5), rng.random_range(0.0..0.5), list).expect("valid random measure");
        if rng.random::<bool>() {
            let theta = rng.random_range(0.1..0.9);
            let d = Density::geometric(theta, DENSITY_NODES).expect("theta in range");
            m.with_density(d, rng.random_range(0.1..1.0)).expect("fresh density")
        } else {
            m
        }
    }
}

/// The kernel `(1 + t) lambda / (1 + t lambda)`, equal to `lambda` at `t = 0` and `1` at
/// `t = inf`.
pub fn pick_kernel(t: f64, lambda: f64) -> f64 {
    if t == 0.0 {
        lambda
    } else if t.is_infinite() {
        1.0
    } else {
        (1.0 + t) * lambda / (1.0 + t * lambda)
    }
}

/// A positive Pick function regular on `(0, inf)`, represented by its measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PickFunctionRep {
    pub measure: ExtendedMeasure,
}

impl PickFunctionRep {
    pub fn new(measure: ExtendedMeasure) -> Self {
        Self { measure }
    }

    /// Evaluation without argument checks, for use inside closures.
    pub fn value(&self, lambda: f64) -> f64 {
        self.measure.integrate(|t| pick_kernel(t, lambda), lambda, 1.0)
    }
}

/// `h(lambda) = int (1 + t) lambda / (1 + t lambda) d rho(t)`.
pub fn eval_pick(h: &PickFunctionRep, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let v = h.value(lambda);
    if !v.is_finite() {
        return Err(Error::Numerical(format!("quadrature returned {v} at lambda = {lambda}")));
    }
    Ok(v)
}

/// Both sides of the norm identity `int (1 + 1/t) K(t, x) d rho = sum h(lambda_i) |x_i|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / rhs` (absolute when `rhs = 0`).
    pub gap: f64,
}

/// Evaluates the left side from the K-functional through the measure's quadrature and the
/// right side from the Pick function on the spectrum.
pub fn quadratic_norm_check(h: &PickFunctionRep, lambda: &WeightVector, x: &CoupleVector) -> Result<NormIdentity> {
    check_dim(lambda.len(), x.len())?;
    let k_at = |t: f64| -> f64 {
        let k = big_k_functional(t, x, lambda).expect("validated input");
        (1.0 + 1.0 / t) * k
    };
    let lhs = h.measure.integrate(k_at, x.norm1_sq(lambda)?, x.norm0_sq());
    let rhs: f64 = lambda
        .values()
        .iter()
        .zip(x.coords())
        .map(|(&l, z)| eval_pick(h, l).map(|v| v * z.norm_sqr()))
        .sum::<Result<f64>>()?;
    let gap = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { (lhs - rhs).abs() };
    Ok(NormIdentity { lhs, rhs, gap })
}

/// A positive measure on `[0, inf]^2` with finitely many atoms; `inf` is encoded as
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoVarMeasure {
    atoms: Vec<(f64, f64, f64)>,
}

impl TwoVarMeasure {
    pub fn new(atoms: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(t1, t2, m) in &atoms {
            if !(t1 >= 0.0 && t2 >= 0.0) || t1.is_nan() || t2.is_nan() {
                return Err(Error::InvalidArgument(format!("atom ({t1}, {t2}) outside [0, inf]^2")));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom mass {m} must be positive")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64, f64)] {
        &self.atoms
    }

    /// `h(a, b) = sum m (1 + t1) a / (1 + t1 a) (1 + t2) b / (1 + t2 b)`.
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        self.atoms.iter().map(|&(t1, t2, m)| m * pick_kernel(t1, a) * pick_kernel(t2, b)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_atoms() {
        let zero = PickFunctionRep::new(ExtendedMeasure::dirac_zero());
        let inf = PickFunctionRep::new(ExtendedMeasure::dirac_inf());
        assert_eq!(eval_pick(&zero, 3.5).unwrap(), 3.5);
        assert_eq!(eval_pick(&inf, 3.5).unwrap(), 1.0);
        assert!(eval_pick(&inf, 0.0).is_err());
    }

    #[test]
    fn geometric_measure_gives_powers() {
        for theta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let h = PickFunctionRep::new(ExtendedMeasure::geometric(theta).unwrap());
            assert!((h.measure.total_mass() - 1.0).abs() < 1e-12, "{}", h.measure.total_mass() - 1.0);
            for lam in [1e-3, 0.25, 1.0, 4.0, 1e3] {
                let v = eval_pick(&h, lam).unwrap();
                let want = f64::powf(lam, theta);
                assert!((v - want).abs() <= 1e-8 * want, "theta {theta} lambda {lam}: {v} vs {want}");
            }
        }
        let h = PickFunctionRep::new(ExtendedMeasure::geometric(0.5).unwrap());
        assert!((eval_pick(&h, 4.0).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn norm_identity_at_endpoints() {
        let lam = WeightVector::new(vec![0.5, 3.0]).unwrap();
        let x = CoupleVector::from_real(&[1.0, -2.0]).unwrap();
        let c = quadratic_norm_check(&PickFunctionRep::new(ExtendedMeasure::dirac_inf()), &lam, &x).unwrap();
        assert_eq!((c.lhs, c.rhs), (5.0, 5.0));
        let c = quadratic_norm_check(&PickFunctionRep::new(ExtendedMeasure::dirac_zero()), &lam, &x).unwrap();
        assert!((c.lhs - 12.5).abs() < 1e-14 && (c.rhs - 12.5).abs() < 1e-14);
        let c = quadratic_norm_check(&PickFunctionRep::new(ExtendedMeasure::geometric(0.3).unwrap()), &lam, &x).unwrap();
        assert!(c.gap <= 1e-7);
    }

    #[test]
    fn reflection_is_the_tilde_transform() {
        let mut rng = crate::random::rng(3);
        let m = ExtendedMeasure::random(&mut rng, 3);
        let h = PickFunctionRep::new(m.clone());
        let r = PickFunctionRep::new(m.reflected().unwrap());
        for lam in [0.1, 1.0, 7.0] {
            let want = lam * h.value(1.0 / lam);
            assert!((r.value(lam) - want).abs() <= 1e-9 * want);
        }
    }

    #[test]
    fn two_variable_product_kernel() {
        let m = TwoVarMeasure::new(vec![(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(m.eval(2.0, 3.0), 6.0);
        let m = TwoVarMeasure::new(vec![(f64::INFINITY, 0.0, 2.0)]).unwrap();
        assert_eq!(m.eval(2.0, 3.0), 6.0);
    }
}
