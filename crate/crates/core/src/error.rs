use num_bigint::BigUint;
use thiserror::Error;

use crate::spec::{ParseError, ValidationReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid specification:\n{0}")]
    Invalid(ValidationReport),

    #[error("{what} budget exceeded: need {count}, budget {budget}")]
    Budget {
        what: &'static str,
        count: BigUint,
        budget: usize,
    },

    #[error("specification is {measured}-level-restricted, not {requested}-level-restricted")]
    NotLevelRestricted { measured: u32, requested: u32 },

    #[error("specification is {measured}-narrow, not {requested}-narrow")]
    NotNarrow { measured: u64, requested: u64 },

    #[error("base solver {solver} is not applicable: {reason}")]
    Inapplicable { solver: String, reason: String },

    #[error("unresolvable address {addr}: {reason}")]
    Address { addr: String, reason: String },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, count: impl Into<BigUint>, budget: usize) -> Self {
        Error::Budget {
            what,
            count: count.into(),
            budget,
        }
    }
}
