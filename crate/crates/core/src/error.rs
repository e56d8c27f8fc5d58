use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("value outside [0,1): {value} at position {index}")]
    OutOfDomain { index: usize, value: f64 },

    #[error("spectrum not real-valued")]
    NonHermitian,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectrum covers |j| <= {available} but |j| <= {needed} is required")]
    SpectrumRange { needed: usize, available: usize },

    #[error("k_max too small: bias still dominates variance at k = {k_max}")]
    KMaxTooSmall { k_max: usize },

    #[error("tail bias unbounded")]
    TailUnbounded,

    #[error("density too peaked for rejection sampling (acceptance rate {efficiency:.4})")]
    RejectionEfficiency { efficiency: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("replication {replication} (seed {seed}) failed: {source}")]
    Replication {
        replication: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
