use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    QubitMismatch { expected: usize, got: usize },

    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParamLength { expected: usize, got: usize },

    #[error("{n} qubits exceeds the configured cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("correlated noise grouping is not supported by {0}; use Monte Carlo")]
    CorrelatedNoise(&'static str),

    #[error("point is not stationary (gradient max-norm {0:.3e})")]
    NotStationary(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("could not generate a uniquely satisfiable instance after {0} attempts")]
    GenerationFailed(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
