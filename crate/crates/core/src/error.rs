use thiserror::Error;

use crate::boson::ModeMonomial;

#[derive(Debug, Error)]
pub enum Error {
    /// Ring size / field order below 2.
    #[error("order must be at least 2, got {0}")]
    InvalidOrder(u32),

    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },

    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("monomial {0} has odd degree; only even-degree polynomials can be substituted")]
    OddDegree(ModeMonomial),

    #[error("monomial {0} does not conserve particle number")]
    SectorViolation(ModeMonomial),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("no transcribed expression for n = {0} (available: 3, 4, 5)")]
    UnsupportedSpecialCase(u32),

    #[error("invalid rational {0:?}: expected an integer or p/q")]
    InvalidRational(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
