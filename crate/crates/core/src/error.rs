use thiserror::Error;

/// Errors raised by the numerical kernels, the fitters and the report layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} did not converge: best estimate {best:e}, error bound {bound:e}")]
    NotConverged { what: String, best: f64, bound: f64 },

    #[error("could not bracket level {level}: {msg}; retry with a larger half-width")]
    Bracket { level: usize, msg: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("solver failure at m = {m}, N = {n}: {source}")]
    Level {
        m: f64,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain { op, msg: msg.into() }
}
