use thiserror::Error;

use crate::dyadic::ArithmeticError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error("schedule constraint violated: {0}")]
    Constraint(String),
    #[error("horizon exceeded: index {index} needs data beyond limit {limit}")]
    HorizonExceeded { index: u64, limit: u64 },
    #[error("inverse unavailable: {0}")]
    InvertibilityUnsupported(String),
    #[error("weight index {0} is not an interior block index")]
    InvalidWeightIndex(u64),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown set index {0}")]
    UnknownSet(usize),
    #[error("horizon exhausted while searching for: {0}")]
    HorizonExhausted(String),
    #[error("anchor block undefined: vector is supported in block 0")]
    AnchorUndefined,
}

pub type Result<T> = std::result::Result<T, Error>;
