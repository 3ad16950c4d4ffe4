use alloc::string::String;

/// Errors produced by the compositional toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodaError {
    /// A composition part is zero, negative, non-finite, or D < 2.
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    /// Two vectors that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An operation over a collection received no elements.
    #[error("empty input: {0}")]
    EmptyInput(String),
    /// Negative entries in data that must be non-negative.
    #[error("negative value: {0}")]
    NegativeValue(String),
    /// A part consists entirely of zeros and cannot be imputed.
    #[error("unimputable part {part}: all {rows} values are zero")]
    UnimputablePart { part: usize, rows: usize },
    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Clustering was asked for an unsatisfiable configuration.
    #[error("invalid cluster count: {0}")]
    InvalidClusterCount(String),
    /// Linear algebra or iteration broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
}
