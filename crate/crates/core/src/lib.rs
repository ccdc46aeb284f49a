//! Joint energy-minimizing resource-block allocation and DU selection for
//! O-RAN, as a self-contained MILP toolkit: scenario generation, model
//! building with explicit linearizations, a simplex-based branch-and-bound
//! solver, a two-stage disjoint baseline and experiment sweeps.

pub mod baseline;
pub mod experiment;
pub mod joint;
pub mod milp;
pub mod oracle;
pub mod scenario;
pub mod scalar;
pub mod solver;

pub use scalar::Scalar;

/// Double-precision model, the default used throughout the crate.
pub type Model = milp::MilpModel<f64>;
/// Double-precision point.
pub type ModelPoint = milp::Point<f64>;
/// Double-precision expression.
pub type Expr = milp::LinExpr<f64>;
/// Single-precision model.
pub type ModelF32 = milp::MilpModel<f32>;
