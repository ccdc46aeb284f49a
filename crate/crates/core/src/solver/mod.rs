//! LP relaxation and deterministic branch-and-bound.

mod bnb;
mod factor;
mod simplex;

pub use bnb::{solve_milp, solve_milp_from, BoundEvent, MilpOutcome, MilpStatus};
pub use simplex::{solve_lp, solve_lp_from, solve_lp_with_bounds, Basis, BasisState, LpConfig, LpOutcome, LpStatus};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchRule {
    /// Binary closest to 0.5; ties go to the lowest variable id.
    MostFractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeOrder {
    /// Smallest LP bound first; ties in creation order.
    BestBound,
    /// Most recently created node first, up branch before down branch.
    DepthFirst,
}

/// Termination and tolerance settings for [`solve_milp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once `(incumbent - bound) / max(|incumbent|, 1e-9)` is at most this.
    pub rel_gap: f64,
    /// Wall-clock budget in seconds, checked between nodes. Infinite disables it.
    pub time_limit_s: f64,
    pub feas_tol: f64,
    pub int_tol: f64,
    pub branch_rule: BranchRule,
    pub node_order: NodeOrder,
    pub max_nodes: Option<usize>,
    /// Reserved for randomized rules; the default rules ignore it.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_gap: 0.10,
            time_limit_s: 60.0,
            feas_tol: 1e-6,
            int_tol: 1e-5,
            branch_rule: BranchRule::MostFractional,
            node_order: NodeOrder::BestBound,
            max_nodes: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Solve to proven optimality with no time or node limit.
    pub fn exact() -> Self {
        Self {
            rel_gap: 0.0,
            time_limit_s: f64::INFINITY,
            ..Self::default()
        }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.rel_gap = gap;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.feas_tol > 0.0 && self.int_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if !(self.rel_gap >= 0.0) {
            return Err("rel_gap must be nonnegative".into());
        }
        if !(self.time_limit_s > 0.0) {
            return Err("time_limit_s must be positive".into());
        }
        Ok(())
    }
}
