//! End-to-end joint solve: build, seed, branch-and-bound, decode, check.

use serde::Serialize;

use crate::scenario::Scenario;
use crate::solver::{solve_milp_from, MilpStatus, SolverConfig};

use super::heuristic::greedy_candidates;
use super::{build_joint, decode, encode, verify_with, Allocation, BuildError, BuildOptions, ConstraintReport};

/// Result of a full solve in either mode.
#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub status: MilpStatus,
    pub allocation: Option<Allocation>,
    pub energy_wh: Option<f64>,
    pub per_du_wh: Option<Vec<f64>>,
    pub dual_bound: f64,
    pub rel_gap: Option<f64>,
    pub nodes: usize,
    pub wall_seconds: f64,
    /// Checker verdict on `allocation`.
    pub report: Option<ConstraintReport>,
}

impl SolveOutcome {
    pub fn infeasible(nodes: usize, wall_seconds: f64) -> Self {
        Self {
            status: MilpStatus::Infeasible,
            allocation: None,
            energy_wh: None,
            per_du_wh: None,
            dual_bound: f64::INFINITY,
            rel_gap: None,
            nodes,
            wall_seconds,
            report: None,
        }
    }

    /// True when an allocation exists and the checker accepted it.
    pub fn verified(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.feasible)
    }
}

/// Solves the joint model. The search starts from the cheapest of the greedy
/// plans and `start` (when given), whichever pass the checker.
pub fn solve_joint(
    s: &Scenario,
    cfg: &SolverConfig,
    opts: &BuildOptions,
    start: Option<&Allocation>,
) -> Result<SolveOutcome, BuildError> {
    let (model, vm) = build_joint::<f64>(s, opts)?;
    let mut seeds = greedy_candidates(s, opts);
    if let Some(a) = start {
        let r = verify_with(s, a, opts);
        if r.feasible {
            seeds.push((r.energy_total_wh, a.clone()));
        }
    }
    let seed_point = seeds
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, a)| encode(&vm, &model, a));
    let out = solve_milp_from(&model, cfg, seed_point.as_ref());
    let allocation = match &out.incumbent {
        Some(p) => match decode(s, &vm, p) {
            Ok(a) => Some(a),
            Err(e) => {
                log::error!("incumbent did not decode: {e}");
                None
            }
        },
        None => None,
    };
    let report = allocation.as_ref().map(|a| verify_with(s, a, opts));
    Ok(SolveOutcome {
        status: out.status,
        energy_wh: report.as_ref().map(|r| r.energy_total_wh),
        per_du_wh: report.as_ref().map(|r| r.energy_per_du_wh.clone()),
        allocation,
        dual_bound: out.dual_bound,
        rel_gap: out.rel_gap,
        nodes: out.nodes,
        wall_seconds: out.wall_seconds,
        report,
    })
}
