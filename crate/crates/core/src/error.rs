use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty degree sequence")]
    EmptyDegrees,

    #[error("enumeration guard exceeded: {what} is {value}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("law `{0}` has no evaluable inverse CDF")]
    NoInverse(String),

    #[error("matching reuses half-edge {0}")]
    OverlappingMatching(usize),

    #[error("policy carries no weight thresholds")]
    MissingThresholds,

    #[error("weights are not per-half-edge")]
    WrongWeightMode,

    #[error(
        "layer recursion is not increasing at k = {k}: tau - 2 + B (log k)^(gamma - 1) = {exponent} >= 1; minimal admissible k is {min_k}"
    )]
    NonMonotoneSchedule { k: f64, exponent: f64, min_k: u64 },

    #[error("start vertex {vertex} has degree {degree}, below the first layer threshold {threshold}")]
    StartBelowThreshold {
        vertex: usize,
        degree: usize,
        threshold: f64,
    },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("experiment grids differ: {0}")]
    MismatchedGrids(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
