//! Crate-wide error type.
//!
//! Landmark indices in messages are 1-based, matching file formats and
//! reports; internal fields hold the 0-based values.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("landmark {} appears more than once across pairs and solos", .0 + 1)]
    DuplicateIndex(usize),

    #[error("landmark {} is not covered by any pair or solo", .0 + 1)]
    MissingIndex(usize),

    #[error("landmark {} is out of range for a configuration of {count} landmarks", .index + 1)]
    IndexOutOfRange { index: usize, count: usize },

    #[error("pairing scheme describes {scheme_landmarks} landmarks but the configuration has {config_landmarks}")]
    SchemeMismatch {
        scheme_landmarks: usize,
        config_landmarks: usize,
    },

    #[error("{what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{what} contains a non-finite value")]
    NonFinite { what: &'static str },

    #[error("{what} is empty")]
    EmptyInput { what: &'static str },

    #[error("normal vector has norm {norm}, expected a unit vector")]
    NonUnitNormal { norm: f64 },

    #[error("invalid rotation matrix: {detail}")]
    InvalidRotation { detail: String },

    #[error("degenerate configuration: {detail}")]
    DegenerateConfiguration { detail: &'static str },

    #[error("iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("weight at feature position {} is negative", .position + 1)]
    NegativeWeight { position: usize },

    #[error("weight vector has no positive entry")]
    ZeroWeights,

    #[error("mean distance between pair landmarks ({}, {}) is below 1e-12", .left + 1, .right + 1)]
    ZeroPairDistance { left: usize, right: usize },

    #[error("feature kind mismatch: expected {expected}, got {actual}")]
    KindMismatch {
        expected: &'static str,
        actual: String,
    },

    #[error("sample too small: need at least {needed} observations per group, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("zero variance: the samples carry no dispersion to test against")]
    ZeroVariance,

    #[error("{given} bootstrap replicates requested, minimum is {minimum}")]
    InsufficientReplicates { given: usize, minimum: usize },

    #[error("alpha must lie strictly between 0 and 0.5, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("malformed input: {detail}")]
    FileFormat { detail: String },

    #[error("testing commands need exactly two group labels, found {found}")]
    GroupCount { found: usize },

    #[error("input is flagged '{found}' but this operation needs {needed} registration; run the register command first")]
    NotRegistered {
        needed: &'static str,
        found: String,
    },

    #[error("unknown {what}: '{name}'")]
    UnknownName { what: &'static str, name: String },
}

impl Error {
    /// Stable machine-readable tag for the error JSON emitted by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateIndex(_) => "duplicate-index",
            Error::MissingIndex(_) => "missing-index",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::SchemeMismatch { .. } => "scheme-mismatch",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NonFinite { .. } => "non-finite",
            Error::EmptyInput { .. } => "empty-input",
            Error::NonUnitNormal { .. } => "non-unit-normal",
            Error::InvalidRotation { .. } => "invalid-rotation",
            Error::DegenerateConfiguration { .. } => "degenerate-configuration",
            Error::NonConvergence { .. } => "non-convergence",
            Error::NegativeWeight { .. } => "negative-weight",
            Error::ZeroWeights => "zero-weights",
            Error::ZeroPairDistance { .. } => "zero-pair-distance",
            Error::KindMismatch { .. } => "kind-mismatch",
            Error::SampleTooSmall { .. } => "sample-too-small",
            Error::ZeroVariance => "zero-variance",
            Error::InsufficientReplicates { .. } => "insufficient-replicates",
            Error::InvalidAlpha { .. } => "invalid-alpha",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::FileFormat { .. } => "file-format",
            Error::GroupCount { .. } => "group-count",
            Error::NotRegistered { .. } => "not-registered",
            Error::UnknownName { .. } => "unknown-name",
        }
    }
}
