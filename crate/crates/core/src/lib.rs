//! Parity-pseudospin CHSH Bell operators for the two-mode squeezed vacuum.
//!
//! The state lives in truncated Fock space in Schmidt form ([`fock`]). A
//! pseudospin family is fixed by a half-space unitary ([`pseudospin`]); from
//! it the correlation tensor and the key correlation `F` follow
//! ([`correlations`]), the CHSH value is optimized over measurement
//! directions ([`bell`]) and over the family itself ([`optimize`]).

// NaN must fail validation, so comparisons are written negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod optimize;
pub mod pseudospin;
pub mod quadrature;

pub use bell::{bell_value, direct_search, horodecki_max, BellOutcome, BellSetting, Method, TSIRELSON};
pub use correlations::{
    bell_from_f, correlation_tensor, f_closed, f_direct, f_position_integral, f_trace, ClosedForm,
    CorrelationTensor, FResult, PlaneQuadrature, Route,
};
pub use error::{Error, Result};
pub use fock::{
    reduced_density, squeeze_oracle, tmsv_state, truncation_for, FockTruncation, ReducedDensity,
    SqueezeParam, TmsvState, TwoModeVector,
};
pub use hermite::hermite_psi;
pub use optimize::{
    nonmonotonicity_certificate, optimize_phases, random_unitary_search, ConfigSearchResult,
    NonmonotonicityReport, RandomUnitarySearch,
};
pub use pseudospin::{
    alt_phase, number_config, operator_set, phase_config, position_config, position_config_exact,
    verify_su2, AlgebraReport, ConfigLabel, OperatorSet, PseudospinConfig,
};
pub use quadrature::QuadratureSpec;

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
