use thiserror::Error;

/// Errors produced by the analysis toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// The input stream does not look like the declared log format
    /// (more than half of the data lines failed to parse).
    #[error(
        "log format mismatch: {malformed} of {total} lines malformed, \
         first offending line {line}: {content:?}"
    )]
    FormatMismatch {
        line: u64,
        content: String,
        malformed: usize,
        total: usize,
    },

    #[error("invalid address {raw:?}: {reason}")]
    AddressParse { raw: String, reason: &'static str },

    /// Parent links in the org chart form a cycle.
    #[error("org chart cycle: {0}")]
    ChartCycle(String),

    #[error("unit {unit:?} references unknown parent {parent:?}")]
    UnknownParent { unit: String, parent: String },

    #[error("org chart entry {unit:?}: {reason}")]
    ChartEntry { unit: String, reason: String },

    #[error("cannot lift unit {unit:?} (level {level}) to level {target}")]
    Level {
        unit: String,
        level: u32,
        target: u32,
    },

    #[error("tld {0:?} is configured as both commercial and non-commercial")]
    TldOverlap(String),

    #[error("no style value for node {0:?}")]
    MissingStyleValue(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The power-law model does not apply to the fitted exponent.
    #[error("model not applicable: {0}")]
    ModelInapplicable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
