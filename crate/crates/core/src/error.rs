use thiserror::Error;

#[derive(Debug, Error)]
pub enum LcfError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty batch: the mean loss is undefined")]
    EmptyBatch,

    #[error("feature `{name}` has standard deviation {std:e}, below the minimum {min:e}")]
    ConstantFeature { name: String, std: f64, min: f64 },

    #[error("non-binary label `{value}` at row {row}")]
    NonBinaryLabel { row: usize, value: String },

    #[error("invalid cell at row {row}, column `{column}`: {reason}")]
    InvalidCell {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite gradient for parameter {0}")]
    NonFiniteGradient(String),

    #[error("non-finite parameter {0} after update")]
    NonFiniteParameter(String),

    #[error("unknown dataset `{0}` (expected one of mock1..mock6)")]
    UnknownDataset(String),

    #[error("unknown strategy `{name}` (registered: {known})")]
    UnknownStrategy { name: String, known: String },

    #[error("no center supplied for features: {}", .0.join(", "))]
    MissingCenters(Vec<String>),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LcfError>;
