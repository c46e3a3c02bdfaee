use thiserror::Error;

/// Errors raised by model construction, the convex kernels and the design loops.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shift k={k} puts the {n}-sample window outside a {m}-sample waveform")]
    ShiftOutOfRange { k: i64, n: usize, m: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("solver did not converge after {iterations} iterations: {detail}")]
    NotConverged { iterations: usize, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot round a zero matrix to a rank-one vector")]
    DegenerateRounding,

    #[error("insufficient Monte Carlo trials: {trials} trials at P_f={p_f} gives fewer than 10 expected exceedances")]
    InsufficientTrials { trials: usize, p_f: f64 },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
