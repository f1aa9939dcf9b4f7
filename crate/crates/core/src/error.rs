use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "Descartes relation violated: curvature residual {curvature_residual:.3e}, center residual {center_residual:.3e}"
    )]
    DescartesViolation {
        curvature_residual: f64,
        center_residual: f64,
    },

    #[error("Schottky disks {first} and {second} overlap or touch")]
    OverlappingDisks { first: usize, second: usize },

    #[error("packing is enumerated only to curvature {bound}, but T = {requested} was requested")]
    UnderEnumerated { requested: f64, bound: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("measure has empty support: {0}")]
    EmptySupport(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
