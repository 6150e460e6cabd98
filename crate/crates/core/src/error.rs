use thiserror::Error;

/// Errors raised by the arithmetic, expansion and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at evaluation point: {0}")]
    Pole(String),
    #[error("ambiguous expansion region: factor monomial {0} has mixed signs")]
    AmbiguousExpansion(String),
    #[error("non-expandable pure-q factor (1 - q^{0})")]
    NonExpandablePureQ(i64),
    #[error("evaluate requires finite expression")]
    InfiniteFactor,
    #[error("truncation specs do not match")]
    SpecMismatch,
    #[error("precision loss: series exact only up to v^{exact_to}, window needs v^{needed}")]
    PrecisionLoss { exact_to: i64, needed: i64 },
    #[error("expansion leaves power-series domain at z-monomial {0}")]
    NotPowerSeries(String),
    #[error("integrality violated: {0}")]
    Integrality(String),
    #[error("non-generic pattern: {0}")]
    NonGeneric(String),
    #[error("cutoff did not stabilize: {0}")]
    Stabilization(String),
    #[error("could not find {wanted} usable evaluation points (found {found})")]
    RetryBudget { wanted: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
