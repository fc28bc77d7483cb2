use thiserror::Error;

/// Errors raised by the lattice, duality, spectral and census routines.
///
/// Every variant corresponds to one documented failure; the CLI maps them
/// onto exit status 1 and prints the variant name verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotAnInvolution: (T*T)[{row}][{col}] differs from the identity")]
    NotAnInvolution { row: usize, col: usize },

    #[error("AdjointnessViolation: (P*T)[{row}][{col}] differs from (Tdual^T * P)[{row}][{col}]")]
    AdjointnessViolation { row: usize, col: usize },

    #[error("RankGuardExceeded: rank {rank} exceeds the limit {limit}")]
    RankGuardExceeded { rank: usize, limit: usize },

    #[error("InvalidCurveData: {0}")]
    InvalidCurveData(String),

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("InternalInconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Stable variant name, used in reports and exit diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotAnInvolution { .. } => "NotAnInvolution",
            Error::AdjointnessViolation { .. } => "AdjointnessViolation",
            Error::RankGuardExceeded { .. } => "RankGuardExceeded",
            Error::InvalidCurveData(_) => "InvalidCurveData",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InternalInconsistency(_) => "InternalInconsistency",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
