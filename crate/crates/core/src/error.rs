use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid modulus {0}: n must be at least 2")]
    InvalidModulus(u64),

    #[error("wrong shape: {0}")]
    WrongShape(String),

    #[error("wrong domain: {0}")]
    WrongDomain(String),

    #[error("illegal prescription at index {index}: {reason}")]
    Illegal { index: usize, reason: String },

    #[error("adjustment exponent too small: divisor product {product} is not below {modulus}^{exponent}")]
    AdjustmentExponentTooSmall {
        product: String,
        modulus: u64,
        exponent: u32,
    },

    #[error("n = {n} exceeds the orbit cap {cap} (memory grows as n^2)")]
    ResourceBound { n: u64, cap: u64 },

    #[error("divisions never recur for n = {0}: it is not a Fibonacci omni-factor")]
    Divergence(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported sequence {0}")]
    UnsupportedSequence(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {reason}", path.display())]
    Parse { path: PathBuf, line: usize, reason: String },
}

impl Error {
    /// Stable, machine-parsable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateInput(_) => "degenerate-input",
            Error::InvalidModulus(_) => "invalid-modulus",
            Error::WrongShape(_) => "wrong-shape",
            Error::WrongDomain(_) => "wrong-domain",
            Error::Illegal { .. } => "illegal-prescription",
            Error::AdjustmentExponentTooSmall { .. } => "adjustment-exponent-too-small",
            Error::ResourceBound { .. } => "resource-bound",
            Error::Divergence(_) => "divergence",
            Error::Domain(_) => "domain",
            Error::UnsupportedSequence(_) => "unsupported-sequence",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }
}
