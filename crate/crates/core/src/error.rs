use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants are grouped by how a caller is expected to react: configuration
/// and parse problems are user errors, hypothesis failures mean an experiment
/// must not produce a verdict, and the remaining variants flag inputs the
/// numerical routines cannot handle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("hypothesis check `{check}` failed: {detail}")]
    Hypothesis { check: String, detail: String },

    #[error("modular map is not monotone: {0}")]
    NonMonotone(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn hypothesis(check: &str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            check: check.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
