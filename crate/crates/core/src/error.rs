//! Error type shared by every solver module.

use thiserror::Error;

/// Failure modes of the solver library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Model parameters violate an invariant (counts, signs, ranges).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A configuration or quantum index is out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Matrix dimension exceeds the dense-solver limit.
    #[error("matrix dimension {dim} exceeds dense-solver limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    /// Eigensolver input was not symmetric/Hermitian within tolerance.
    #[error("matrix not symmetric: max asymmetry {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    /// A photon or quantum cutoff is too small for the requested accuracy.
    #[error("cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },

    /// States live in incompatible bases, frames, or cutoffs.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// An iterative procedure exhausted its schedule without converging.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A density matrix failed positivity beyond tolerance.
    #[error("matrix not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
}

impl Error {
    /// Stable machine-readable code for CLI reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "E_PARAMS",
            Error::IndexOutOfRange(_) => "E_INDEX",
            Error::DimensionTooLarge { .. } => "E_DIM",
            Error::NotSymmetric { .. } => "E_SYMMETRY",
            Error::CutoffTooSmall { .. } => "E_CUTOFF",
            Error::BasisMismatch(_) => "E_BASIS",
            Error::NoConvergence(_) => "E_CONVERGENCE",
            Error::NotPositive { .. } => "E_POSITIVITY",
        }
    }

    /// True for failures of numerical control (cutoffs, convergence,
    /// dimension limits) as opposed to malformed requests.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::CutoffTooSmall { .. }
                | Error::NoConvergence(_)
                | Error::DimensionTooLarge { .. }
                | Error::NotPositive { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
