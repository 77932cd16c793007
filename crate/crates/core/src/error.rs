//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Caller asked a regime-restricted evaluator for a point it does not
    /// cover; the dispatcher is responsible for routing around this.
    #[error("regime error: {0}")]
    Regime(String),

    /// An internal contract was violated (jet too short, table too short, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Exact data failed a structural check; never recoverable.
    #[error("data integrity failure: {0}")]
    DataIntegrity(String),

    /// An adaptive scheme exhausted its budget without reaching tolerance.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// Coefficient cache file problems (missing header, checksum mismatch, ...).
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
