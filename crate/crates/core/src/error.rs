use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a distribution needs at least 2 categories, found {found}")]
    TooFewCategories { found: usize },

    #[error("category {index} has non-positive mass {value}")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("masses sum to {sum}, expected 1 within {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("length mismatch: {left} labels vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample size must be at least 1")]
    EmptySample,

    #[error("label sequences differ between the empirical and the reference distribution")]
    LabelMismatch,

    #[error("kernel is undefined at zero mass (category {index} is unobserved)")]
    ZeroMassUndefined { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation only applies to the Shannon family, got {0}")]
    WrongFamily(String),

    #[error("asymptotic variance of {family} is zero at this distribution; the CLT normalization is degenerate")]
    DegenerateVariance { family: String },

    #[error("exact enumeration would visit {outcomes} outcomes (limit {limit})")]
    TooLarge { outcomes: u128, limit: u128 },

    #[error("{excluded} of {replications} replications were excluded, above the 1% limit")]
    TooManyExclusions { excluded: usize, replications: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
