use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the requested operation
    /// (e.g. the supra eigenfunction at s = 0, or a closed form at t = T).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid parameter (non-positive σ, grid too coarse, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature hit its subdivision cap before reaching the
    /// requested tolerance.
    #[error(
        "quadrature did not converge: estimated error {achieved:.3e} > requested {requested:.3e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    /// A numerical scheme produced non-finite values.
    #[error("numerical instability: {0}")]
    Instability(String),

    /// A built-in redundancy check (two independent evaluation routes for
    /// the same quantity) disagreed beyond tolerance.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
