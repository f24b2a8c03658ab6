use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("mode index {m} out of range (grid retains {available} eigenfunctions)")]
    ModeOutOfRange { m: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },
    #[error("CFL violated at t = {t}: courant number {courant:.3}")]
    CflViolation { t: f64, courant: f64 },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("malformed dump: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
