use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("class column `{0}` not found")]
    MissingClassColumn(String),

    #[error("row {row}: class column has a missing value")]
    MissingClassValue { row: usize },

    #[error("class attribute `{name}` needs at least two values, found {found}")]
    DegenerateClass { name: String, found: usize },

    #[error("attribute `{attribute}`, row {row}: `{value}` is not numeric")]
    NonNumeric {
        attribute: String,
        row: usize,
        value: String,
    },

    #[error("schema: {0}")]
    Schema(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("arc between {0} and {1} already present")]
    DuplicateArc(usize, usize),

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("attribute `{attribute}` has no value `{value}`")]
    UnknownValue { attribute: String, value: String },

    #[error("value index {index} out of range for `{attribute}`")]
    ValueOutOfRange { attribute: String, index: usize },

    #[error("BIF line {line}: {message}")]
    Bif { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
