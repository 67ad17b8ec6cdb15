use std::path::PathBuf;

use thiserror::Error;

use crate::hv::ElementType;

pub type Result<T, E = HdcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HdcError {
    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("element type mismatch: {left} vs {right}")]
    DtypeMismatch { left: ElementType, right: ElementType },

    #[error("operation requires a binary or bipolar element type, got {0}")]
    NotBinaryOrBipolar(ElementType),

    #[error("value {value} is not a legal {dtype} element")]
    IllegalElement { value: i64, dtype: ElementType },

    #[error("sparsity {0} is outside (0, 1)")]
    InvalidSparsity(f64),

    #[error("position {position} is outside 1..={gram}")]
    PositionOutOfRange { position: usize, gram: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty text cannot be tokenized")]
    EmptyText,

    #[error("empty token sequence")]
    EmptySequence,

    #[error("token id {id} is outside the item memory (size {size})")]
    TokenOutOfRange { id: usize, size: usize },

    #[error("invalid architecture: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("class {0} has no training examples")]
    EmptyClass(usize),

    #[error("label {label} is outside 0..{classes}")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("at least two classes are required, got {0}")]
    TooFewClasses(usize),

    #[error("metric is undefined: {0}")]
    UndefinedMetric(String),

    #[error("non-finite reward {0}")]
    NonFiniteReward(f64),

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    DataLine {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("split: {0}")]
    Split(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
