use thiserror::Error;

/// Errors raised by the channel, entropy and optimization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dephasing rate must be finite and non-negative, got {0}")]
    InvalidRate(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "environment truncation too small: env_dim={env_dim}, worst residual {residual:e} at level m={level} exceeds {bound:e}"
    )]
    EnvironmentTruncation {
        env_dim: usize,
        level: usize,
        residual: f64,
        bound: f64,
    },

    #[error("Kraus truncation j_max={j_max} leaves completeness residual {residual:e} above {tolerance:e}")]
    KrausTruncation {
        j_max: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("step size {step} too coarse for stiffness {stiffness}; estimated local error {local_error:e}")]
    StepTooCoarse {
        step: f64,
        stiffness: f64,
        local_error: f64,
    },

    #[error("non-finite gradient component at index {index}")]
    NonFiniteGradient { index: usize },

    #[error("golden-section search failed: {0}")]
    Bracket(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
