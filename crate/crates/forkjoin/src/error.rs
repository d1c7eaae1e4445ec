use thiserror::Error;

/// Errors raised by model construction and estimators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("task count k = {k} must satisfy 1 <= k <= n (n = {n})")]
    TaskCountOutOfRange { n: usize, k: usize },

    #[error("system is unstable: rho = lambda * E[S] = {rho} >= 1")]
    Unstable { rho: f64 },

    #[error("arrival rate must be positive, got {lambda}")]
    NonPositiveRate { lambda: f64 },

    #[error("warmup fraction must lie in [0, 1), got {value}")]
    WarmupOutOfRange { value: f64 },

    #[error("horizon_jobs must be positive")]
    EmptyHorizon,

    #[error("invalid service distribution: {reason}")]
    InvalidService { reason: String },

    #[error("M/M/1 task-delay law requires lambda < mu, got lambda = {lambda}, mu = {mu}")]
    MM1Unstable { lambda: f64, mu: f64 },

    #[error("queue-length sampling requires exponential service; got {got}")]
    QueueLengthNeedsExponential { got: String },

    #[error("marginal width m = {m} must satisfy 1 <= m <= k (k = {k})")]
    MarginalWidthOutOfRange { m: usize, k: usize },

    #[error("monotone-function enumeration is limited to k <= 5, got k = {k}")]
    EnumerationTooWide { k: usize },

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error(
        "truncated mass {mass:.4} exceeds {limit}; increase q_max so the \
         box captures more of the joint distribution"
    )]
    ExcessiveTruncation { mass: f64, limit: f64 },

    #[error("{0}")]
    Invalid(String),
}
