//! Exact quadratic interpolation on finite-dimensional weighted Hilbert couples.
//!
//! * [`couple`]: weights, vectors, operators and the functionals `K`, `k`, `K_p`, `E_p`, `J`.
//! * [`calderon`]: explicit contractions `T` with `T x0 = y0` from K-domination, with
//!   re-checkable certificates.
//! * [`pick`]: positive Pick functions given by measures, fitting, and randomized matrix-order
//!   verifiers.
//! * [`methods`]: K- and J-method norms, reiteration, power-p functions and the complex method.

pub mod calderon;
pub mod couple;
pub mod error;
pub mod linalg;
pub mod methods;
pub mod pick;
pub mod quadrature;
pub mod random;

pub use error::{Error, Result};
