use alloc::string::String;

use crate::data::Period;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("duplicate period {0}")]
    DuplicatePeriod(Period),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("cannot impute column `{column}` for month {month}: no observed values")]
    ImputationImpossible { column: String, month: u8 },

    #[error("design matrix would be empty: max lag {max_lag} with series length {len}")]
    EmptyMatrix { max_lag: usize, len: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("column mismatch: missing {missing:?}, extra {extra:?}")]
    ColumnMismatch {
        missing: alloc::vec::Vec<String>,
        extra: alloc::vec::Vec<String>,
    },

    #[error("invalid hyperparameter `{name}`: {message}")]
    Hyperparam { name: String, message: String },

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("reservoir has zero spectral radius after {0} attempts")]
    DegenerateReservoir(u32),

    #[error("{0} features exceed the exact enumeration limit of {1}; use sampled Shapley values")]
    TooManyFeatures(usize, usize),

    #[error("non-finite prediction at forecast step {0}")]
    NonFiniteForecast(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined statistic: {0}")]
    Undefined(String),
}
