use std::path::PathBuf;

/// Errors raised by the simulator, the analysis routines and the I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular or ill-conditioned system: {0}")]
    Singular(String),

    #[error("fixed point did not converge after {iterations} iterations (last step {last_step:.3e}, value {value:.6})")]
    NoConvergence {
        iterations: usize,
        last_step: f64,
        value: f64,
    },

    #[error("non-finite state at t = {t:.4} s: {detail}")]
    NonFinite { t: f64, detail: String },

    #[error("constraint violation at t = {t:.4} s: {detail}")]
    ConstraintAbort { t: f64, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
