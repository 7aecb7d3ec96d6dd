use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no crossing in bracket [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    /// A non-finite value appeared; `t` is the last time with a valid state.
    #[error("integration diverged after t = {t}")]
    Divergence { t: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
