use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: u32, found: u32 },

    #[error("level {level} exceeds the supported maximum of {max}")]
    LevelCap { level: u32, max: u32 },

    #[error("box index {index} out of range at level {level}")]
    IndexOutOfRange { level: u32, index: u64 },

    #[error("coordinate {axis} = {value} lies outside [0, 1]")]
    PointOutOfDomain { axis: usize, value: f64 },

    #[error("empty box set passed to {0}")]
    EmptySet(&'static str),

    #[error("oracle `{oracle}` violated its contract: {detail}")]
    OracleContract { oracle: String, detail: String },

    #[error("box set has spanning component {id}; no separation exists")]
    SpanningComponent { id: usize },

    #[error("trace did not certify a spanning component (first failure at level {level})")]
    NotSpanning { level: u32 },

    #[error("trace level {k} is shallower than twice the curve order {order}")]
    CurveTooCoarse { k: u32, order: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tabulated oracle: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
