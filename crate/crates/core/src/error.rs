use num_bigint::BigInt;
use thiserror::Error;

use crate::qexpr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("constant term {0} is not a unit over the integers")]
    NonUnitConstantTerm(BigInt),

    #[error("index {index} is beyond the series order {order}")]
    IndexBeyondOrder { index: usize, order: usize },

    #[error("residue {residue} is beyond the series order {order}")]
    ResidueBeyondOrder { residue: usize, order: usize },

    #[error("exponent form takes the negative value {min}")]
    NegativeExponent { min: i64 },

    #[error("invalid Pochhammer factor: {0}")]
    InvalidFactor(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("the congruence has no integer solutions")]
    Infeasible,

    #[error(transparent)]
    Parse(#[from] ParseError),
}
