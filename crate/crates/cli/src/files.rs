//! JSON formats read and written by the command-line tool.

use std::collections::BTreeMap;
use std::path::Path;

use exact_interp::calderon::roots::ZeroSplitting;
use exact_interp::calderon::ContractionCertificate;
use exact_interp::couple::{CoupleVector, OperatorMatrix, WeightVector};
use exact_interp::pick::measure::{Density, DensityKind, DENSITY_NODES};
use exact_interp::pick::ExtendedMeasure;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A scalar written either as a real number or as a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn to_complex(self) -> Complex64 {
        match self {
            Entry::Real(r) => Complex64::new(r, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    /// Real numbers are written as plain numbers.
    pub fn from_complex(z: Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

pub fn entries(v: &[Complex64]) -> Vec<Entry> {
    v.iter().map(|&z| Entry::from_complex(z)).collect()
}

pub fn matrix_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Entry>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::from_complex(m[(i, j)])).collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<Entry>]) -> Result<DMatrix<Complex64>, CliError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Input("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].to_complex()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("malformed {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = to_json(value);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

/// Weights and named vectors of one weighted couple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupleFile {
    pub weights: Vec<f64>,
    pub vectors: BTreeMap<String, Vec<Entry>>,
}

impl CoupleFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file: Self = read_json(path)?;
        let n = file.weights.len();
        if let Some((name, v)) = file.vectors.iter().find(|(_, v)| v.len() != n) {
            return Err(CliError::Input(format!("vector {name} has length {} but there are {n} weights", v.len())));
        }
        Ok(file)
    }

    pub fn weight_vector(&self) -> Result<WeightVector, CliError> {
        WeightVector::new(self.weights.clone()).map_err(CliError::input)
    }

    pub fn vector(&self, name: &str) -> Result<CoupleVector, CliError> {
        let v = self
            .vectors
            .get(name)
            .ok_or_else(|| CliError::Input(format!("no vector named {name:?}")))?;
        CoupleVector::new(v.iter().map(|e| e.to_complex()).collect()).map_err(CliError::input)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    pub t: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DensityEntry {
    /// `scale` times the geometric probability measure of exponent `theta`.
    Geometric {
        theta: f64,
        #[serde(default = "unit")]
        scale: f64,
    },
}

fn unit() -> f64 {
    1.0
}

/// A positive measure on `[0, inf]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    #[serde(default)]
    pub mass_at_zero: f64,
    #[serde(default)]
    pub mass_at_inf: f64,
    #[serde(default)]
    pub atoms: Vec<AtomEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityEntry>,
}

impl MeasureFile {
    pub fn load(path: &Path) -> Result<ExtendedMeasure, CliError> {
        read_json::<Self>(path)?.to_measure()
    }

    pub fn to_measure(&self) -> Result<ExtendedMeasure, CliError> {
        let atoms = self.atoms.iter().map(|a| (a.t, a.mass)).collect();
        let m = ExtendedMeasure::new(self.mass_at_zero, self.mass_at_inf, atoms).map_err(CliError::input)?;
        match self.density {
            None => Ok(m),
            Some(DensityEntry::Geometric { theta, scale }) => {
                let d = Density::geometric(theta, DENSITY_NODES).map_err(CliError::input)?;
                m.with_density(d, scale).map_err(CliError::input)
            }
        }
    }

    pub fn from_measure(m: &ExtendedMeasure) -> Self {
        let density = m.density().map(|d| match d.kind {
            DensityKind::Geometric { theta } => DensityEntry::Geometric { theta, scale: d.weights.iter().sum() },
        });
        Self {
            mass_at_zero: m.mass_at_zero,
            mass_at_inf: m.mass_at_inf,
            atoms: m.atoms().iter().map(|&(t, mass)| AtomEntry { t, mass }).collect(),
            density,
        }
    }
}

/// Samples `(lambda, h)` given either as a bare list of pairs or under the key `points`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PointsFile {
    Bare(Vec<[f64; 2]>),
    Keyed { points: Vec<[f64; 2]> },
}

impl PointsFile {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let p = match self {
            PointsFile::Bare(p) | PointsFile::Keyed { points: p } => p,
        };
        p.iter().map(|&[l, h]| (l, h)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingFile {
    pub deltas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub complex_pairs: Vec<[f64; 2]>,
    pub m: usize,
    pub delta_signs: Vec<f64>,
    pub gamma_signs: Vec<f64>,
}

impl From<&ZeroSplitting> for SplittingFile {
    fn from(s: &ZeroSplitting) -> Self {
        Self {
            deltas: s.deltas.clone(),
            gammas: s.gammas.clone(),
            complex_pairs: s.complex_pairs.iter().map(|z| [z.re, z.im]).collect(),
            m: s.m,
            delta_signs: s.delta_signs.clone(),
            gamma_signs: s.gamma_signs.clone(),
        }
    }
}

impl From<&SplittingFile> for ZeroSplitting {
    fn from(s: &SplittingFile) -> Self {
        Self {
            deltas: s.deltas.clone(),
            gammas: s.gammas.clone(),
            complex_pairs: s.complex_pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
            m: s.m,
            delta_signs: s.delta_signs.clone(),
            gamma_signs: s.gamma_signs.clone(),
        }
    }
}

/// A contraction certificate together with the names of the vectors it maps and the seed used
/// to measure its domination margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertFile {
    pub x: String,
    pub y: String,
    pub seed: u64,
    pub t: Vec<Vec<Entry>>,
    pub rho: f64,
    pub norm0: f64,
    pub norm1: f64,
    pub bound_scale: [f64; 2],
    pub norm_bounds: [f64; 2],
    pub map_residual: f64,
    pub domination_margin: f64,
    pub phases_x: Vec<Entry>,
    pub phases_y: Vec<Entry>,
    pub domain_weights: Vec<f64>,
    pub codomain_weights: Vec<f64>,
    pub source_weights: Vec<f64>,
    pub source_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingFile>,
    pub condensed_mismatch: f64,
    pub attempts: usize,
}

impl CertFile {
    pub fn new(cert: &ContractionCertificate, x: &str, y: &str, seed: u64) -> Self {
        let bounds = cert.norm_bounds();
        Self {
            x: x.to_owned(),
            y: y.to_owned(),
            seed,
            t: matrix_rows(cert.t.entries()),
            rho: cert.rho,
            norm0: cert.norm0,
            norm1: cert.norm1,
            bound_scale: [cert.bound_scale.0, cert.bound_scale.1],
            norm_bounds: [bounds.0, bounds.1],
            map_residual: cert.map_residual,
            domination_margin: cert.domination_margin,
            phases_x: entries(&cert.phases_x),
            phases_y: entries(&cert.phases_y),
            domain_weights: cert.domain_weights.values().to_vec(),
            codomain_weights: cert.codomain_weights.values().to_vec(),
            source_weights: cert.source_weights.values().to_vec(),
            source_scale: cert.source_scale,
            splitting: cert.splitting.as_ref().map(SplittingFile::from),
            condensed_mismatch: cert.condensed_mismatch,
            attempts: cert.attempts,
        }
    }

    pub fn to_certificate(&self) -> Result<ContractionCertificate, CliError> {
        let weights = |v: &[f64]| WeightVector::new(v.to_vec()).map_err(CliError::input);
        let t = OperatorMatrix::new(matrix_from_rows(&self.t)?).map_err(CliError::input)?;
        Ok(ContractionCertificate {
            t,
            rho: self.rho,
            norm0: self.norm0,
            norm1: self.norm1,
            bound_scale: (self.bound_scale[0], self.bound_scale[1]),
            map_residual: self.map_residual,
            domination_margin: self.domination_margin,
            phases_x: self.phases_x.iter().map(|e| e.to_complex()).collect(),
            phases_y: self.phases_y.iter().map(|e| e.to_complex()).collect(),
            domain_weights: weights(&self.domain_weights)?,
            codomain_weights: weights(&self.codomain_weights)?,
            source_weights: weights(&self.source_weights)?,
            source_scale: self.source_scale,
            splitting: self.splitting.as_ref().map(ZeroSplitting::from),
            condensed_mismatch: self.condensed_mismatch,
            attempts: self.attempts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_accept_both_forms() {
        let v: Vec<Entry> = serde_json::from_str("[1.5, [0.0, -2.0]]").unwrap();
        assert_eq!(v[0].to_complex(), Complex64::new(1.5, 0.0));
        assert_eq!(v[1].to_complex(), Complex64::new(0.0, -2.0));
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.5,[0.0,-2.0]]");
    }

    #[test]
    fn floats_round_trip_exactly() {
        let x = [0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, 5e-324];
        let back: Vec<f64> = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn measure_file_round_trip() {
        let f: MeasureFile = serde_json::from_str(
            r#"{"mass_at_zero": 0.5, "atoms": [{"t": 2.0, "mass": 1.0}], "density": {"type": "geometric", "theta": 0.3}}"#,
        )
        .unwrap();
        let m = f.to_measure().unwrap();
        assert_eq!(m.mass_at_inf, 0.0);
        let back = MeasureFile::from_measure(&m);
        assert_eq!(back.atoms, f.atoms);
        let Some(DensityEntry::Geometric { theta, scale }) = back.density else { panic!() };
        assert_eq!(theta, 0.3);
        assert!((scale - 1.0).abs() < 1e-12);
        assert!(serde_json::from_str::<MeasureFile>(r#"{"density": {"type": "cauchy"}}"#).is_err());
    }

    #[test]
    fn points_in_both_layouts() {
        let a: PointsFile = serde_json::from_str("[[1, 2], [3, 4]]").unwrap();
        let b: PointsFile = serde_json::from_str(r#"{"points": [[1, 2], [3, 4]]}"#).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.points(), vec![(1.0, 2.0), (3.0, 4.0)]);
    }
}
