use thiserror::Error;

/// Errors produced by grid construction, metric validation, and the
/// elliptic solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("band limit exceeded: {0}")]
    BandLimit(String),

    #[error("degenerate metric at grid point {index} (coordinates {coords:?}): {detail}")]
    DegenerateMetric {
        index: usize,
        coords: Vec<f64>,
        detail: String,
    },

    #[error(
        "solver failed to converge after {iterations} iterations \
         (relative residual {residual:.3e})"
    )]
    SolverFailure {
        iterations: usize,
        residual: f64,
        /// Relative residual after each iteration, for post-mortem analysis.
        history: Vec<f64>,
    },

    #[error("right-hand side is not orthogonal to the operator kernel: {0}")]
    InconsistentSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
