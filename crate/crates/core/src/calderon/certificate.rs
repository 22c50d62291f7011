//! Certificates for constructed maps and their independent re-verification.

use num_complex::Complex64;

use super::construct::ConstructionConfig;
use super::roots::ZeroSplitting;
use crate::couple::{check_dim, k_raw, operator_norms_between, CoupleVector, OperatorMatrix, TimeGrid, WeightVector};
use crate::error::{Error, Result};

/// A constructed map together with the measured quantities that witness its properties.
///
/// The map acts from the couple with weights `domain_weights` into the one with weights
/// `codomain_weights`. Its claimed properties are `T x0 = y0`, `||T||_0 <= bound_scale.0`,
/// `||T||_1 <= bound_scale.1 * rho^{-1/2}` and the pointwise inequality
/// `k_{rho C}(t, Tx) <= k_S(t, s x)` with `C = codomain_weights`, `S = source_weights` and
/// `s = source_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate {
    pub t: OperatorMatrix,
    pub rho: f64,
    pub norm0: f64,
    pub norm1: f64,
    pub bound_scale: (f64, f64),
    /// `||T x0 - y0||_inf`.
    pub map_residual: f64,
    /// Smallest `k_S(t, s x) - k_{rho C}(t, Tx)` over the grid and unit test vectors.
    pub domination_margin: f64,
    pub phases_x: Vec<Complex64>,
    pub phases_y: Vec<Complex64>,
    pub domain_weights: WeightVector,
    pub codomain_weights: WeightVector,
    pub source_weights: WeightVector,
    pub source_scale: f64,
    /// Zero splitting of the domination polynomial, in sorted coordinates.
    pub splitting: Option<ZeroSplitting>,
    /// Relative deviation between the basis-polynomial entries and the closed-form entries.
    pub condensed_mismatch: f64,
    pub attempts: usize,
}

impl ContractionCertificate {
    /// A certificate for a square map on `lambda` with nothing measured yet.
    pub fn skeleton(lambda: WeightVector, rho: f64, phases_x: Vec<Complex64>, phases_y: Vec<Complex64>) -> Self {
        let n = lambda.len();
        Self {
            t: OperatorMatrix::identity(n),
            rho,
            norm0: f64::NAN,
            norm1: f64::NAN,
            bound_scale: (1.0, 1.0),
            map_residual: f64::NAN,
            domination_margin: f64::NAN,
            phases_x,
            phases_y,
            domain_weights: lambda.clone(),
            codomain_weights: lambda.clone(),
            source_weights: lambda,
            source_scale: 1.0,
            splitting: None,
            condensed_mismatch: 0.0,
            attempts: 1,
        }
    }

    /// `(bound on ||T||_0, bound on ||T||_1)`.
    pub fn norm_bounds(&self) -> (f64, f64) {
        (self.bound_scale.0, self.bound_scale.1 / self.rho.sqrt())
    }

    /// Whether the splitting has fewer real `delta` zeros than the dimension, the regime in which
    /// the norm bounds are attained.
    pub fn has_complex_zeros(&self) -> bool {
        self.splitting.as_ref().is_some_and(|s| s.m < self.t.ncols())
    }
}

/// Settings of [`verify_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub grid: TimeGrid,
    pub trials: usize,
    pub seed: u64,
    /// Relative to `max(||x0||_inf, ||y0||_inf)`.
    pub residual_tol: f64,
    pub norm_tol: f64,
    pub margin_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { grid: TimeGrid::default(), trials: 50, seed: 0, residual_tol: 1e-8, norm_tol: 1e-9, margin_tol: 1e-9 }
    }
}

impl VerifyOptions {
    pub fn from_config(cfg: &ConstructionConfig) -> Self {
        Self {
            grid: cfg.grid.clone(),
            trials: cfg.verify_trials,
            seed: cfg.seed,
            residual_tol: cfg.residual_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Residual,
    Norm0,
    Norm1,
    Domination,
}

/// A violating input: the vector `x` and the parameter `t` at which `lhs > rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub t: f64,
    pub x: CoupleVector,
    pub lhs: f64,
    pub rhs: f64,
}

/// How far the measured norms stay below their bounds when the splitting has complex zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Sharpness {
    pub norm0_deficit: f64,
    pub norm1_deficit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub pass: bool,
    pub residual: f64,
    pub residual_pass: bool,
    pub norm0: f64,
    pub norm1: f64,
    pub bounds: (f64, f64),
    pub norms_pass: bool,
    pub domination_margin: f64,
    pub domination_pass: bool,
    pub witness: Option<Witness>,
    pub sharpness: Option<Sharpness>,
    pub failures: Vec<String>,
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Smallest `k_S(t, s x) - k_{rho C}(t, Tx)` over the grid (and `t = 0`) for the coordinate
/// vectors and `trials` random unit vectors, with the minimizing `(t, x)`.
fn domination_margin(
    cert: &ContractionCertificate,
    grid: &TimeGrid,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64, CoupleVector, f64, f64)> {
    let n = cert.t.ncols();
    let source = cert.source_weights.values();
    let target: Vec<f64> = cert.codomain_weights.values().iter().map(|c| c * cert.rho).collect();
    let mut rng = crate::random::rng(seed);
    let mut tests: Vec<CoupleVector> = (0..n)
        .map(|k| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[k] = Complex64::new(1.0, 0.0);
            CoupleVector::new(e)
        })
        .collect::<Result<_>>()?;
    for _ in 0..trials {
        let v = crate::random::complex_vector(&mut rng, n);
        let norm = v.norm0_sq().sqrt();
        tests.push(CoupleVector::new(v.coords().iter().map(|z| z / norm).collect())?);
    }
    let mut ts: Vec<f64> = Vec::with_capacity(grid.points().len() + 1);
    if grid.include_zero_limit {
        ts.push(0.0);
    }
    ts.extend_from_slice(grid.points());
    let mut best = (f64::INFINITY, 0.0, tests[0].clone(), 0.0, 0.0);
    for x in &tests {
        let sx: Vec<Complex64> = x.coords().iter().map(|z| z * cert.source_scale).collect();
        let tx = cert.t.apply(x)?;
        for &t in &ts {
            let lhs = k_raw(t, tx.coords(), &target);
            let rhs = k_raw(t, &sx, source);
            if rhs - lhs < best.0 {
                best = (rhs - lhs, t, x.clone(), lhs, rhs);
            }
        }
    }
    Ok(best)
}

/// Re-measures every claim of a certificate: the interpolation residual, both operator norms
/// against their bounds, and the pointwise domination inequality on the grid. Reports the first
/// violation as a witness and, for splittings with complex zeros, how sharp the norms are.
pub fn verify_certificate(
    cert: &ContractionCertificate,
    x0: &CoupleVector,
    y0: &CoupleVector,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_dim(cert.t.ncols(), x0.len())?;
    check_dim(cert.t.nrows(), y0.len())?;
    check_dim(cert.t.ncols(), cert.domain_weights.len())?;
    check_dim(cert.t.nrows(), cert.codomain_weights.len())?;
    if cert.t.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("certificate matrix"));
    }
    let mut failures = Vec::new();
    let mut witness = None;

    let tx = cert.t.apply(x0)?;
    let diff: Vec<Complex64> = tx.coords().iter().zip(y0.coords()).map(|(a, b)| a - b).collect();
    let residual = sup_norm(&diff);
    let scale = sup_norm(x0.coords()).max(sup_norm(y0.coords()));
    let residual_pass = residual <= opts.residual_tol * scale;
    if !residual_pass {
        failures.push(format!("residual {residual:e} exceeds {:e}", opts.residual_tol * scale));
        witness = Some(Witness { kind: WitnessKind::Residual, t: 0.0, x: x0.clone(), lhs: residual, rhs: opts.residual_tol * scale });
    }

    let (norm0, norm1) = operator_norms_between(&cert.t, &cert.domain_weights, &cert.codomain_weights)?;
    let bounds = cert.norm_bounds();
    let norm0_pass = norm0 <= bounds.0 + opts.norm_tol;
    let norm1_pass = norm1 <= bounds.1 + opts.norm_tol;
    if !norm0_pass {
        failures.push(format!("||T||_0 = {norm0} exceeds {}", bounds.0));
        if witness.is_none() {
            let v = top_singular_vector(cert.t.entries())?;
            witness = Some(Witness { kind: WitnessKind::Norm0, t: 0.0, x: v, lhs: norm0, rhs: bounds.0 });
        }
    }
    if !norm1_pass {
        failures.push(format!("||T||_1 = {norm1} exceeds {}", bounds.1));
        if witness.is_none() {
            let conj = crate::couple::conjugate_by_weights(
                cert.t.entries(),
                cert.domain_weights.values(),
                cert.codomain_weights.values(),
            );
            let v = top_singular_vector(&conj)?;
            let x = CoupleVector::new(
                v.coords().iter().zip(cert.domain_weights.values()).map(|(z, l)| z / l.sqrt()).collect(),
            )?;
            witness = Some(Witness { kind: WitnessKind::Norm1, t: f64::INFINITY, x, lhs: norm1, rhs: bounds.1 });
        }
    }

    let (margin, t_min, x_min, lhs, rhs) = domination_margin(cert, &opts.grid, opts.trials, opts.seed)?;
    let domination_pass = margin >= -opts.margin_tol;
    if !domination_pass {
        failures.push(format!("domination margin {margin:e} at t = {t_min:e}"));
        if witness.is_none() {
            witness = Some(Witness { kind: WitnessKind::Domination, t: t_min, x: x_min, lhs, rhs });
        }
    }

    let sharpness = cert
        .has_complex_zeros()
        .then(|| Sharpness { norm0_deficit: bounds.0 - norm0, norm1_deficit: bounds.1 - norm1 });
    Ok(VerificationReport {
        pass: failures.is_empty(),
        residual,
        residual_pass,
        norm0,
        norm1,
        bounds,
        norms_pass: norm0_pass && norm1_pass,
        domination_margin: margin,
        domination_pass,
        witness,
        sharpness,
        failures,
    })
}

fn top_singular_vector(m: &crate::linalg::CMatrix) -> Result<CoupleVector> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("singular vectors unavailable".into()))?;
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    CoupleVector::new(v_t.row(k).iter().map(|z| z.conj()).collect())
}

/// Fills the measured fields of a freshly built certificate and fails if any claim is violated.
pub(crate) fn measure_certificate(
    cert: &mut ContractionCertificate,
    x0: &CoupleVector,
    y0: &CoupleVector,
    cfg: &ConstructionConfig,
) -> Result<()> {
    let report = verify_certificate(cert, x0, y0, &VerifyOptions::from_config(cfg))?;
    cert.norm0 = report.norm0;
    cert.norm1 = report.norm1;
    cert.map_residual = report.residual;
    cert.domination_margin = report.domination_margin;
    if !report.pass {
        return Err(Error::Numerical(format!("constructed map fails verification: {}", report.failures.join("; "))));
    }
    Ok(())
}
