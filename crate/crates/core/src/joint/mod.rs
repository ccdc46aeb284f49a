//! The joint RB-allocation and DU-selection model: construction, decoding of
//! solver points into allocations, and an independent checker that works on
//! the original nonlinear constraints.

mod build;
mod decode;
pub mod heuristic;
mod solve;
mod verify;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{MilpError, VarId};
use crate::scenario::{Demand, ScenarioViolation};

pub use build::build_joint;
pub use decode::{decode, decode_with_tol, encode, DecodeError};
pub use solve::{solve_joint, SolveOutcome};
pub use verify::{energy_of, verify, verify_with, AccountingError, ConstraintReport, Rule, RuleViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    /// At most one RU serves a demand in any TTI (the printed per-RB form is
    /// always present).
    pub one_ru_per_slot: bool,
    /// Add valid inequalities that tighten the LP relaxation.
    pub tighten: bool,
    /// Count the fronthaul delay once per serving (RU, DU, TTI) instead of
    /// once per allocated RB.
    pub per_du_propagation: bool,
    /// Extra TTIs appended to every demand's service window.
    pub window_slack: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            one_ru_per_slot: true,
            tighten: true,
            per_du_propagation: false,
            window_slack: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid scenario: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Scenario(Vec<ScenarioViolation>),
    #[error(transparent)]
    Model(#[from] MilpError),
}

/// Auxiliary `var >= gate * sum(...)` tied to RU `ru`, DU `du`, TTI `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Envelope {
    pub ru: usize,
    pub du: usize,
    pub slot: usize,
    pub var: VarId,
}

/// Variables owned by one demand.
#[derive(Debug, Clone)]
pub struct DemandVars {
    pub demand: Demand,
    /// First and last TTI (inclusive) the demand may be served in.
    pub first: usize,
    pub last: usize,
    /// `y[j * width + (t' - first)]`.
    pub y: Vec<VarId>,
    /// `a[(j * R + r) * width + (t' - first)]`.
    pub a: Vec<VarId>,
    /// Scheduling delay in TTIs (weighted max over served slots).
    pub delay: VarId,
    /// Fronthaul delay auxiliaries, only where the RU-DU delay is positive.
    pub prop: Vec<Envelope>,
}

impl DemandVars {
    pub fn width(&self) -> usize {
        self.last + 1 - self.first
    }

    pub fn slots(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

/// Index from domain tuples to model variables.
#[derive(Debug, Clone)]
pub struct VarMap {
    pub num_ue: usize,
    pub num_ru: usize,
    pub num_du: usize,
    pub num_tti: usize,
    pub num_rb: usize,
    pub num_classes: usize,
    pub c: Vec<VarId>,
    pub b: Vec<VarId>,
    pub u: Vec<VarId>,
    pub demands: Vec<DemandVars>,
    /// Objective envelopes for the dynamic energy term.
    pub energy: Vec<Envelope>,
    pub options: BuildOptions,
    by_slot: HashMap<(usize, usize), usize>,
}

impl VarMap {
    pub fn c(&self, l: usize, t: usize) -> VarId {
        self.c[l * self.num_tti + t]
    }

    pub fn b(&self, j: usize, l: usize, t: usize) -> VarId {
        self.b[(j * self.num_du + l) * self.num_tti + t]
    }

    pub fn u(&self, i: usize, t: usize, k: usize) -> VarId {
        self.u[(i * self.num_tti + t) * self.num_classes + k]
    }

    /// Position in `demands` of the demand of UE `i` arriving at `t`.
    pub fn demand_index(&self, i: usize, t: usize) -> Option<usize> {
        self.by_slot.get(&(i, t)).copied()
    }

    pub fn y(&self, i: usize, t: usize, j: usize, slot: usize) -> Option<VarId> {
        let d = &self.demands[self.demand_index(i, t)?];
        if slot < d.first || slot > d.last {
            return None;
        }
        Some(d.y[j * d.width() + slot - d.first])
    }

    pub fn a(&self, i: usize, t: usize, j: usize, r: usize, slot: usize) -> Option<VarId> {
        let d = &self.demands[self.demand_index(i, t)?];
        if slot < d.first || slot > d.last {
            return None;
        }
        Some(d.a[(j * self.num_rb + r) * d.width() + slot - d.first])
    }
}

/// RB assignment `(i, t, j, r, t')`.
pub type RbKey = (usize, usize, usize, usize, usize);

/// Decoded decisions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    /// `(i, t, j, r, t')`: RB `r` of RU `j` in TTI `t'` carries the demand of UE `i` from `t`.
    pub rb_assign: BTreeSet<RbKey>,
    /// `(j, l, t')`: RU `j` is bound to DU `l` in TTI `t'`.
    pub du_assign: BTreeSet<(usize, usize, usize)>,
    /// `(l, t)`: DU `l` is switched on in TTI `t`.
    pub du_active: BTreeSet<(usize, usize)>,
    /// `(i, t, k)`: UE `i` demands class `k` at `t`.
    pub demand_flags: BTreeSet<(usize, usize, usize)>,
    /// `(i, t, j, t')`: RU `j` serves the demand `(i, t)` in TTI `t'`.
    pub serve_flags: BTreeSet<(usize, usize, usize, usize)>,
}

impl Allocation {
    /// Recomputes `serve_flags` from `rb_assign`.
    pub fn canonical_serve_flags(&mut self) {
        self.serve_flags = self
            .rb_assign
            .iter()
            .map(|&(i, t, j, _, s)| (i, t, j, s))
            .collect();
    }

    pub fn is_empty(&self) -> bool {
        self.rb_assign.is_empty() && self.du_assign.is_empty() && self.du_active.is_empty()
    }

    /// Human-readable listing, one decision per line.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for &(l, t) in &self.du_active {
            out.push_str(&format!("active du={l} tti={t}\n"));
        }
        for &(j, l, t) in &self.du_assign {
            out.push_str(&format!("bind ru={j} du={l} tti={t}\n"));
        }
        for &(i, t, j, r, s) in &self.rb_assign {
            out.push_str(&format!("rb ue={i} arrival={t} ru={j} rb={r} tti={s}\n"));
        }
        out
    }
}
