use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("privacy level must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("sup norm must be positive and finite, got {0}")]
    BadSupNorm(f64),
    #[error("|ell(x)| = {value} exceeds the certified sup norm {sup_norm}")]
    SupNormViolation { value: f64, sup_norm: f64 },
    #[error("point {0:?} lies outside the representer domain")]
    OutsideDomain(Vec<f64>),
    #[error("atom {0:?} is not in the channel input alphabet")]
    UnknownAtom(Vec<f64>),
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("singular linear system while building kernel of order {order}, smoothness {smoothness}")]
    SingularMomentSystem { order: usize, smoothness: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("observation {0} is not one of the two channel outputs")]
    NotBinaryOutput(f64),
    #[error("probability map is not strictly increasing between theta = {0} and theta = {1}")]
    NonMonotoneMap(f64, f64),
    #[error("binary search plan is degenerate (N = {0}); the affine surrogate needs N >= 4")]
    DegeneratePlan(usize),
    #[error("enumeration of {0} outcomes exceeds the limit of 1e6")]
    EnumerationTooLarge(u128),
    #[error("channel fails the privacy audit: max log-ratio {max_log_ratio} > alpha {alpha}")]
    NotPrivate { max_log_ratio: f64, alpha: f64 },
    #[error("risk cell at n = {n} has non-positive risk {risk}")]
    NonPositiveRisk { n: u64, risk: f64 },
    #[error("rate fit needs at least {needed} usable cells, got {got}")]
    TooFewCells { needed: usize, got: usize },
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
