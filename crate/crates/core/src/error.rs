use thiserror::Error;

/// Errors shared by all toolkit modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("polar cone requires a cone, got {0}")]
    NotACone(String),

    #[error("iteration did not settle: residual {residual:.3e} after {iterations} cycles")]
    NotConverged {
        iterate: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("numerical breakdown (non-finite value) at step {step}")]
    NumericalBreakdown { step: usize },

    #[error("displacement routes disagree by {defect:.3e}; an operator oracle is inconsistent")]
    InternalInconsistency { defect: f64 },

    #[error("trace too short: {got} steps, need at least {need}")]
    TraceTooShort { got: usize, need: usize },

    #[error("operator descriptor missing: {0}")]
    DescriptorMissing(String),

    #[error(
        "range pair is sampled, not closed-form; projection routines refuse inexact descriptors"
    )]
    InexactRangePair,

    #[error("no sufficient condition for the split decomposition holds: {0}")]
    NoSufficientCondition(String),

    #[error("operator error: {0}")]
    Operator(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }
}
