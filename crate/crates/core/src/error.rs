use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),
    #[error("element has {found} coordinates, group has {expected} factors")]
    CoordinateCount { expected: usize, found: usize },
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("operation requires a vector space F_p^n, got {0}")]
    NotPrimeVector(String),
    #[error("{0} is already in the span; adjoining it breaks dissociativity")]
    NotDissociated(usize),
    #[error("size cap exceeded: {what} is {size}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not a probability measure: {0}")]
    NotProbability(String),
    #[error("normalization drift {drift:e} after reweighting")]
    NormalizationDrift { drift: f64 },
    #[error("iteration overran its cap of {cap} steps")]
    IterationOverrun { cap: usize },
    #[error("resource gate: {needed} weight entries requested, budget is {budget}")]
    ResourceGate { needed: u128, budget: u128 },
    #[error("invalid weight quadruple: {0}")]
    InvalidQuadruple(String),
}

pub type Result<T> = core::result::Result<T, Error>;
