//! Crate-wide error type. Solver routines treat pointwise evaluation
//! failures as infeasible points internally; errors that escape here
//! describe why a whole operation could not produce a result.

use crate::expr::{EvalError, ParseError};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid domain: {0}")]
    BadDomain(String),
    #[error("{what} {value} is outside the domain [{lo}, {hi}]")]
    OutsideDomain { what: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("game `{game}` fails validation: {}", failing.join(", "))]
    ValidationFailed { game: String, failing: Vec<String> },
    #[error("no interior symmetric Nash equilibrium: best-response displacement never changes sign")]
    NoInteriorNash,
    #[error("maximum lies on the domain boundary at {0}")]
    BoundaryOptimum(f64),
    #[error("objective is infeasible everywhere on the search grid ({0})")]
    NoMaximum(String),
    #[error("invalid rescaling: {0}")]
    BadRescaling(String),
    #[error("rescaling is not strictly monotone on its domain")]
    NotMonotone,
    #[error("value {0} is not attained by the rescaling on its domain")]
    ValueNotAttained(f64),
    #[error("no symmetric equilibrium to select")]
    NoSymmetricEquilibrium,
    #[error("{0} distinct symmetric equilibria; selection is ambiguous")]
    AmbiguousSymmetricEquilibrium(usize),
    #[error("no equilibrium found")]
    NoEquilibrium,
    #[error("no efficient symmetric Kantian equilibrium found")]
    NoEfficientMke,
    #[error("role payoff undefined: {0}")]
    UndefinedRole(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("unknown builtin game `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid spec: {0}")]
    BadSpec(String),
}
