//! Library error type.

use thiserror::Error;

/// Errors surfaced by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument was outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A constellation or channel draw was too degenerate to analyze
    /// (collinear received points, vanishing basis determinant, ...).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Two routes to the same quantity disagreed beyond tolerance.
    #[error("internal consistency: {0}")]
    Inconsistent(String),

    /// Experiment configuration rejected before any computation ran.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Too few usable data points for a statistical fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// I/O failure while reading or writing an experiment artifact.
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Configuration file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),
}
