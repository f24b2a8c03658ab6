use std::fmt;

use boussinesq_core::Error as CoreError;
use serde::Serialize;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Exit code 2.
    Config(String),
    /// Exit code 3.
    Numerical(String),
    /// Exit code 4.
    Unresolved(String),
    /// A hard check failed; exit code 1.
    CheckFailed(String),
    /// Exit code 1.
    Io(String),
}

/// Machine-readable error record.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord<'a> {
    pub status: i32,
    pub kind: &'a str,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Unresolved(_) => 4,
            CliError::CheckFailed(_) | CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Unresolved(_) => "unresolved",
            CliError::CheckFailed(_) => "check_failed",
            CliError::Io(_) => "io",
        }
    }

    pub fn record(&self) -> ErrorRecord<'_> {
        ErrorRecord { status: self.exit_code(), kind: self.kind(), message: self.to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("error record serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Unresolved(m) => write!(f, "unresolved: {m}"),
            CliError::CheckFailed(m) => write!(f, "check failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BlowUp { .. } | CoreError::CflViolation { .. } => CliError::Numerical(e.to_string()),
            CoreError::Io(m) => CliError::Io(m),
            CoreError::Format(_) => CliError::Io(e.to_string()),
            CoreError::Hypothesis(_) => CliError::CheckFailed(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
