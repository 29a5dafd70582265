use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A series violated a structural requirement (wrong constant term,
    /// non-finite coefficient, mismatched truncation orders).
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    /// Parameters outside the admissible domain (complex mu/nu roots,
    /// invalid hypergeometric lower parameters, weight parameters out of
    /// range, ...).
    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(String),

    /// An iterative evaluation (series acceleration, adaptive quadrature)
    /// exhausted its budget before reaching the requested accuracy. Carries
    /// the best value obtained and its error estimate.
    #[error("{what} did not converge (best value {value}, estimate {estimate})")]
    NonConvergence {
        what: String,
        value: f64,
        estimate: f64,
    },

    /// The bound formula hit a non-positive denominator.
    #[error("degenerate bound: {0}")]
    DegenerateBound(String),

    /// Failure reading or parsing an external input (custom weight tables,
    /// config files).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
