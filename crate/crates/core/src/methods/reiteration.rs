//! Reiteration: applying the method of `h` to the couple of spaces given by `h0` and `h1`
//! yields the method of `phi(lambda) = h0(lambda) h(h1(lambda) / h0(lambda))`.

use super::kj::k_method_norm;
use crate::couple::{check_dim, CoupleVector, WeightVector};
use crate::error::{Error, Result};
use crate::pick::PickFunctionRep;

/// The three functions of a reiteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Reiteration {
    pub h: PickFunctionRep,
    pub h0: PickFunctionRep,
    pub h1: PickFunctionRep,
}

/// The two evaluations of the reiterated norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReiterationCheck {
    /// K-integral of `h` on the derived couple.
    pub derived: f64,
    /// `sum phi(lambda_i) |x_i|^2`.
    pub direct: f64,
    pub gap: f64,
}

/// Builds the reiteration of `h` over `(h0, h1)`; all three measures must be nonzero.
pub fn reiterate(h: &PickFunctionRep, h0: &PickFunctionRep, h1: &PickFunctionRep) -> Result<Reiteration> {
    for (name, f) in [("h", h), ("h0", h0), ("h1", h1)] {
        if f.measure.is_zero() {
            return Err(Error::InvalidArgument(format!("{name} has the zero measure")));
        }
    }
    Ok(Reiteration { h: h.clone(), h0: h0.clone(), h1: h1.clone() })
}

impl Reiteration {
    /// `phi(lambda) = h0(lambda) h(h1(lambda) / h0(lambda))`.
    pub fn phi(&self, lambda: f64) -> f64 {
        let s = self.h0.value(lambda);
        s * self.h.value(self.h1.value(lambda) / s)
    }

    /// Computes the norm of `x` on the derived couple, which has base weights `h0(lambda_i)` and
    /// relative weights `h1(lambda_i) / h0(lambda_i)`, and compares it with the direct formula.
    pub fn check(&self, lambda: &WeightVector, x: &CoupleVector) -> Result<ReiterationCheck> {
        check_dim(lambda.len(), x.len())?;
        let base: Vec<f64> = lambda.values().iter().map(|&l| self.h0.value(l)).collect();
        let derived_weights =
            WeightVector::new(lambda.values().iter().zip(&base).map(|(&l, &b)| self.h1.value(l) / b).collect())?;
        let y = CoupleVector::new(x.coords().iter().zip(&base).map(|(z, b)| z * b.sqrt()).collect())?;
        let derived = k_method_norm(&self.h.measure, &derived_weights, &y)?;
        let direct: f64 = lambda.values().iter().zip(x.coords()).map(|(&l, z)| self.phi(l) * z.norm_sqr()).sum();
        let gap = if direct > 0.0 { (derived - direct).abs() / direct } else { (derived - direct).abs() };
        Ok(ReiterationCheck { derived, direct, gap })
    }
}
