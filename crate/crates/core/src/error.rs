use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// Variants follow the failure taxonomy of the pipeline: structural problems
/// in model data, domain violations in arguments, resource budgets, numeric
/// solver failures, and range/ingestion problems in table queries and files.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed model structure (dangling vertex references, empty parts).
    #[error("structural error: {0}")]
    Structure(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A query beyond the range covered by the data (never silently truncated).
    #[error("out of range: {0}")]
    Range(String),

    /// Work or memory exceeded a configured budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// An iterative numeric method failed to converge or bracket.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A statistic requested of an empty census.
    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    /// A file did not match the expected schema.
    #[error("ingestion error at line {line}: {message}")]
    Ingest { line: usize, message: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
