//! Interpolation methods on weighted couples: the K- and J-methods given by a measure, the
//! correspondence between their measures, reiteration, power-p variants and the complex method.

pub mod complex;
pub mod kj;
pub mod reiteration;

pub use complex::{complex_method_norm, complex_method_vector_norm, poisson_kernel, ComplexMethodConfig, MAX_DEGREE};
pub use kj::{
    h_from_j_measure, j_geometric, j_kernel, j_method_norm_direct, k_method_norm, kj_bijection_check, power_p_function,
    JNormCheck, MethodKind, MethodSpec,
};
pub use reiteration::{reiterate, Reiteration, ReiterationCheck};
