//! Solver-agnostic MILP representation, linearization helpers, point
//! evaluation and free-format MPS import/export.

mod evaluate;
mod linearize;
mod model;
pub mod mps;

pub use evaluate::{evaluate, FeasibilityReport, Violation};
pub use linearize::{linearize_conditional_sum, linearize_max, linearize_product};
pub use model::{Constraint, LinExpr, MilpModel, Point, Sense, VarId, VarKind, Variable};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("invalid bounds for `{name}`: [{lower}, {upper}]")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("`{owner}` references unknown variable #{var}")]
    UnknownVar { owner: String, var: usize },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("`{name}`: variable `{var}` must be binary")]
    NotBinary { name: String, var: String },
    #[error("`{name}`: cap {cap} is below the number of summed binaries ({parts})")]
    CapTooSmall { name: String, cap: f64, parts: usize },
    #[error("`{name}`: negative weight {weight}")]
    NegativeWeight { name: String, weight: f64 },
}
