use thiserror::Error;

/// Errors raised by the algebra, the R-matrix constructions and the checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pole encountered: {0}")]
    PoleEncountered(String),
    #[error("exponent has a nonzero constant term; exp is not defined as a formal series")]
    NonNilpotentConstantTerm,
    #[error("series is exact with non-constant terms; an explicit truncation order is required")]
    UnboundedOrder,
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("bad leg index {leg} for an operator on {n_legs} legs")]
    BadLegIndex { leg: usize, n_legs: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular operator: {0}")]
    SingularOperator(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for a pole, also when wrapped in a step context.
    pub fn is_pole(&self) -> bool {
        match self {
            Error::PoleEncountered(_) => true,
            Error::AtStep { source, .. } => source.is_pole(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
