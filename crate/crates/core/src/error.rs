use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum FdError {
    /// Shapes or sizes that do not fit together (grid mismatch, too few curves, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (non-PSD covariance, dependent basis, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// No direction with sufficient projection MAD could be found within the draw budget.
    #[error("regularization infeasible at u = {u}: {accepted} of {requested} directions accepted after {draws} draws (beta = {beta:.6e}; {summary})")]
    Infeasible { u: f64, beta: f64, accepted: usize, requested: usize, draws: usize, summary: String },

    /// Invalid experiment or model configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input file.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FdError {
    /// Process exit code used by the command line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            FdError::Numerical(_) | FdError::Infeasible { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, FdError>;
