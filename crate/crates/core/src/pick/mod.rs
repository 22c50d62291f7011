//! Positive Pick functions `h(lambda) = int (1 + t) lambda / (1 + t lambda) d rho(t)`: evaluation,
//! fitting, the reflections `lambda h(1/lambda)` and `1 / h(1/lambda)`, growth profiles, and
//! randomized checks of the matrix-order properties these functions enjoy.

pub mod fit;
pub mod measure;
pub mod order;
pub mod profile;
pub mod transforms;

pub use fit::{default_fit_grid, fit_pick_measure, fit_pick_measure_with_tol, nnls, PickFit};
pub use measure::{
    eval_pick, pick_kernel, quadratic_norm_check, Density, DensityKind, ExtendedMeasure, NormIdentity, PickFunctionRep,
    TwoVarMeasure,
};
pub use order::{
    exact_interp_randomized_test, exact_interp_test_with_candidates, hansen_test, matrix_concavity_test,
    matrix_monotone_test, monotone_embedding, two_var_apply, two_var_interp_test, Counterexample, OrderReport,
    TwoVarReport,
};
pub use profile::{exponent_envelope_check, type_h_bound_check, type_h_profile, GridCheck};
pub use transforms::{donoghue_inverse, donoghue_transform, dual_transforms, star, tilde, DonoghueMeasure, DualTransforms};
