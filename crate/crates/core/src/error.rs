use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown appliance '{0}': supply its category explicitly")]
    UnknownAppliance(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("series length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("coefficient {value} at interval {index} is outside [0, 1]")]
    CoefficientOutOfRange { index: usize, value: f64 },

    #[error("appliance '{appliance}' has no feasible start: {reason}")]
    InfeasibleWindow { appliance: String, reason: String },

    #[error("invalid household '{household}': {reason}")]
    InvalidHousehold { household: String, reason: String },

    #[error("invalid tariff: {0}")]
    InvalidTariff(String),

    #[error("infeasible battery spec: {0}")]
    InfeasibleSpec(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error at {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("stage '{stage}' failed: {reason}")]
    Stage { stage: String, reason: String },

    #[error("warning promoted to error (--strict): {0}")]
    Strict(String),

    #[error("malformed table, row {row}: {reason}")]
    Parse { row: usize, reason: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn stage(stage: impl Into<String>, reason: impl std::fmt::Display) -> Self {
        Error::Stage {
            stage: stage.into(),
            reason: reason.to_string(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
