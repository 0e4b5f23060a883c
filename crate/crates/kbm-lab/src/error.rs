//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of geometry evaluation, integration, statistics and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter lies outside its admissible range.
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A metric was evaluated below its admissible radius.
    #[error("radius {r} is below the metric domain minimum {domain_min}")]
    Domain { r: f64, domain_min: f64 },

    /// A simulated radius left the admissible domain.
    #[error("trajectory left the domain at t = {time} (r = {r})")]
    DomainExit { time: f64, r: f64 },

    /// A state violates its structural invariants.
    #[error("invalid state: {0}")]
    State(String),

    /// An integrator produced a non-finite component.
    #[error("numerical blow-up at step {step}: {detail}")]
    NumericalBlowUp { step: u64, detail: String },

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Adaptive quadrature failed to converge.
    #[error(
        "quadrature on [{a}, {b}] did not converge: estimate {estimate}, error {error_estimate} after {evaluations} evaluations"
    )]
    Quadrature {
        a: f64,
        b: f64,
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// Malformed input data (unsorted samples, bad grids, mismatched lengths).
    #[error("invalid input: {0}")]
    Input(String),

    /// A statistical routine received too few samples or a violated precondition.
    #[error("statistics error: {0}")]
    Statistics(String),

    /// A requested time range is not covered by the data.
    #[error("range error: {0}")]
    Range(String),

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Filesystem or serialization failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV serialization failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code associated with this error class.
    ///
    /// Configuration and usage problems map to 1, numerical problems to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParameterDomain { .. } | Error::Config(_) | Error::Input(_) | Error::Range(_) => 1,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            Error::Statistics(_) => 2,
            Error::Domain { .. }
            | Error::DomainExit { .. }
            | Error::State(_)
            | Error::NumericalBlowUp { .. }
            | Error::Numerical(_)
            | Error::Quadrature { .. } => 3,
        }
    }
}
