use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("squeezing parameter {zeta} exceeds the cap {cap}")]
    CapExceeded { zeta: f64, cap: f64 },

    #[error("invalid squeezing parameter {0}: must be finite and non-negative")]
    InvalidSqueeze(f64),

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("invalid Fock dimension {0}: must be even and at least 2")]
    InvalidDimension(usize),

    #[error("dimension {dim} exceeds the oracle limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("truncation at N = {dim} discards weight {discarded:e} for zeta = {zeta}, above tail_tol {tail_tol:e}")]
    TruncationTooSmall {
        dim: usize,
        zeta: f64,
        discarded: f64,
        tail_tol: f64,
    },

    #[error("quadrature insufficient: residual {residual:e} exceeds tolerance {tol:e}")]
    QuadratureInsufficient { residual: f64, tol: f64 },

    #[error("configuration is not unitary: residual {residual:e} exceeds tolerance {tol:e}")]
    NonUnitaryConfig { residual: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("grid too coarse: {points} points, need at least {required}")]
    GridTooCoarse { points: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by numerical capacity (truncation, quadrature,
    /// oracle size) rather than by malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. }
                | Error::DimensionTooLarge { .. }
                | Error::TruncationTooSmall { .. }
                | Error::QuadratureInsufficient { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
