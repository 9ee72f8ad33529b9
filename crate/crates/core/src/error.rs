use thiserror::Error;

use crate::simplex::TailDirection;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "order precondition violated for {direction} tail at coordinate {coordinate}: \
         z = {z}, mu = {mu}"
    )]
    PreconditionOrderViolated {
        coordinate: usize,
        direction: TailDirection,
        z: f64,
        mu: f64,
    },

    #[error("coordinate {coordinate} must be strictly positive")]
    RequiresStrictInterior { coordinate: usize },

    #[error("coordinate {coordinate} lies outside the box")]
    OutOfBox { coordinate: usize },

    #[error("box has zero total width")]
    DegenerateBox,

    #[error("invalid box bounds: {0}")]
    InvalidBox(String),

    #[error("count vector sums to {actual}, expected {expected}")]
    CountMismatch { expected: u64, actual: u64 },

    #[error("invalid distribution parameters: {0}")]
    InvalidSpec(String),

    #[error("enumeration needs {required} lattice points, budget allows {allowed}")]
    BudgetExceeded { required: u128, allowed: u64 },

    #[error("invalid sampler model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
