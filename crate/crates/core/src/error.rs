use thiserror::Error;

pub type Result<T, E = MomentError> = std::result::Result<T, E>;

/// Failure modes of the moment engine.
///
/// Moments that do not exist (order at or above the degrees of freedom) are
/// *not* errors; they come back as an undefined [`crate::MomentResult`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("domain error: {what} = {value} is outside the admissible range")]
    Domain { what: String, value: f64 },

    #[error("moment of order {order} is undefined (requires order > {limit})")]
    Undefined { order: f64, limit: f64 },

    #[error("{what} did not converge after {terms} terms (last term {last_term:e})")]
    SeriesNoConvergence { what: &'static str, terms: usize, last_term: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
    QuadratureNoConvergence { achieved: f64, requested: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: entries ({row}, {col}) differ by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("invalid rectangle in coordinate {coord}: lower {lower} must be below upper {upper}")]
    InvalidRectangle { coord: usize, lower: f64, upper: f64 },

    #[error("no Monte Carlo draw fell inside the rectangle ({samples} draws)")]
    NoAcceptedSamples { samples: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl MomentError {
    pub(crate) fn domain(what: impl Into<String>, value: f64) -> Self {
        MomentError::Domain { what: what.into(), value }
    }

    /// True for failures caused by numerical non-convergence rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, MomentError::SeriesNoConvergence { .. } | MomentError::QuadratureNoConvergence { .. })
    }
}
