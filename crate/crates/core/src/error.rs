use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed numeric input: non-finite values, length mismatches, empty samples.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value violates a model constraint. `field` is a dotted path
    /// into the scenario document (e.g. `regime.floor`, `b_profile.values[3]`).
    #[error("invalid config at `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Survey/CSV parse failures. `row` is the 1-based data row; 0 means the header.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
