//! Exact interpolation maps between weighted Hilbert couples.

pub mod certificate;
pub mod construct;
pub mod loewner;
pub mod lp;
pub mod polynomial;
pub mod roots;

pub use certificate::{verify_certificate, ContractionCertificate, VerificationReport, VerifyOptions};
pub use loewner::{loewner_maps, LoewnerCase, LoewnerMaps};
pub use lp::{lp_experimental_matrix, LpOptions, LpReport};
pub use construct::{
    check_domination, construct_calderon_map, construct_relative_map, preprocess_phases, scaled_map, ConstructionConfig,
    DominationReport,
};
