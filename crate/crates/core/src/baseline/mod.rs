//! Two-stage baseline: RB allocation under a scheduling-only budget, then
//! DU selection for the fixed RBs under a fronthaul budget.

mod stages;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

pub use stages::{build_du_stage, build_rb_stage, decode_du_stage, decode_rb_stage, solve_disjoint, DuStageMap, RbStageMap};

/// How a class delay budget is divided between the two stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitMode {
    /// The fronthaul share is the largest RU-DU delay in the scenario.
    WorstCase,
    /// The scheduling share is the given fraction of the budget.
    Fraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetSplit {
    pub mode: SplitMode,
    /// Let the DU stage use whatever the realized schedule left over instead
    /// of its fixed share.
    pub residual_slack: bool,
}

impl Default for BudgetSplit {
    fn default() -> Self {
        Self {
            mode: SplitMode::WorstCase,
            residual_slack: false,
        }
    }
}

impl BudgetSplit {
    pub fn fraction(alpha: f64) -> Self {
        Self {
            mode: SplitMode::Fraction(alpha),
            residual_slack: false,
        }
    }

    /// Scheduling budget of class `k` in ms; negative when the class cannot
    /// be scheduled at all.
    pub fn sched_ms(&self, s: &Scenario, k: usize) -> f64 {
        let delta = s.classes[k].delay_budget_ms;
        match self.mode {
            SplitMode::WorstCase => delta - s.max_prop_delay(),
            SplitMode::Fraction(alpha) => alpha * delta,
        }
    }

    /// Fronthaul budget of class `k` in ms.
    pub fn prop_ms(&self, s: &Scenario, k: usize) -> f64 {
        let delta = s.classes[k].delay_budget_ms;
        match self.mode {
            SplitMode::WorstCase => s.max_prop_delay(),
            SplitMode::Fraction(alpha) => (1.0 - alpha) * delta,
        }
    }
}

impl fmt::Display for BudgetSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            SplitMode::WorstCase => write!(f, "worst-case")?,
            SplitMode::Fraction(a) => write!(f, "fraction:{a}")?,
        }
        if self.residual_slack {
            write!(f, "+residual")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad budget split {0:?}: expected worst-case or fraction:<alpha> with alpha in [0, 1], optionally followed by +residual")]
pub struct SplitParseError(pub String);

impl FromStr for BudgetSplit {
    type Err = SplitParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || SplitParseError(text.to_string());
        let (head, residual_slack) = match text.strip_suffix("+residual") {
            Some(h) => (h, true),
            None => (text, false),
        };
        let mode = if head == "worst-case" {
            SplitMode::WorstCase
        } else if let Some(a) = head.strip_prefix("fraction:") {
            let alpha: f64 = a.parse().map_err(|_| err())?;
            if !(0.0..=1.0).contains(&alpha) {
                return Err(err());
            }
            SplitMode::Fraction(alpha)
        } else {
            return Err(err());
        };
        Ok(Self { mode, residual_slack })
    }
}
