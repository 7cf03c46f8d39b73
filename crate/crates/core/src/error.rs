use thiserror::Error;

/// Unified error type for every fallible operation in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix violates the class constraints (size, zero coupling, non-finite entry).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Spectral data violates its structural invariants.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A discrete measure is unusable (repeated nodes, non-positive weights, bad mass).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// The dense characteristic-polynomial oracle exceeded its magnitude guard.
    #[error("oracle overflow: intermediate magnitude exceeded 1e300")]
    OracleOverflow,

    /// A requested branch does not exist or yields a non-realizable solution.
    #[error("infeasible branch: {0}")]
    InfeasibleBranch(String),

    /// The orthogonalization recurrence lost rank.
    #[error("recurrence breakdown: {0}")]
    Breakdown(String),

    /// A reconstructed matrix failed to reproduce the prescribed data.
    #[error("verification failed (worst residual {residual:.3e}): {detail}")]
    VerificationFailed { residual: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
