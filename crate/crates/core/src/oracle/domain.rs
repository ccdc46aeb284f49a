//! Exhaustive search over allocations.
//!
//! Every demand picks an inclusion-minimal set of RBs that covers its bits,
//! and every (RU, TTI) cell in use picks a DU. Dropping an RB from a
//! covering allocation never adds delay, energy or conflicts, so the
//! minimum over minimal sets is the minimum over all allocations.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::joint::{verify_with, Allocation, BuildOptions, RbKey};
use crate::scenario::{Demand, Scenario};

use super::{too_large, OracleError};

/// Size limits for [`enumerate_domain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_ue: usize,
    pub max_ru: usize,
    pub max_du: usize,
    pub max_tti: usize,
    pub max_rb: usize,
    /// Largest class budget in whole TTIs.
    pub max_window: usize,
    /// Complete allocations handed to the checker.
    pub max_evaluations: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_ue: 3,
            max_ru: 2,
            max_du: 2,
            max_tti: 4,
            max_rb: 2,
            max_window: 3,
            max_evaluations: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainOptimum {
    /// Cheapest feasible allocation and its energy; `None` when nothing is
    /// feasible.
    pub best: Option<(f64, Allocation)>,
    pub evaluated: usize,
}

impl DomainOptimum {
    pub fn energy_wh(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.0)
    }
}

/// Minimum-energy allocation by enumeration. Ties go to the smallest
/// `rb_assign`, then the smallest `du_assign`.
pub fn enumerate_domain(s: &Scenario, caps: &Caps, opts: &BuildOptions) -> Result<DomainOptimum, OracleError> {
    too_large("UE count", s.num_ue, caps.max_ue)?;
    too_large("RU count", s.num_ru, caps.max_ru)?;
    too_large("DU count", s.num_du, caps.max_du)?;
    too_large("TTI count", s.num_tti, caps.max_tti)?;
    too_large("RBs per TTI", s.rbs_per_tti, caps.max_rb)?;
    let window = s
        .classes
        .iter()
        .map(|c| (c.delay_budget_ms / s.tti_ms + 1e-9).floor().max(0.0) as usize)
        .max()
        .unwrap_or(0);
    too_large("delay window", window, caps.max_window)?;

    let demands = s.demands();
    let mut options: Vec<Vec<Vec<RbKey>>> = Vec::with_capacity(demands.len());
    let mut plans = 1usize;
    for d in &demands {
        let sets = covering_sets(s, d, opts);
        if sets.is_empty() {
            return Ok(DomainOptimum {
                best: None,
                evaluated: 0,
            });
        }
        plans = plans.saturating_mul(sets.len());
        options.push(sets);
    }
    too_large("RB plan count", plans, caps.max_evaluations)?;

    let mut search = Search {
        s,
        opts,
        demands: &demands,
        options: &options,
        limit: caps.max_evaluations,
        evaluated: 0,
        taken: BTreeSet::new(),
        chosen: Vec::new(),
        best: None,
    };
    search.walk(0)?;
    Ok(DomainOptimum {
        best: search.best,
        evaluated: search.evaluated,
    })
}

/// Inclusion-minimal RB sets that cover demand `d`, in lexicographic order.
/// RBs lie in TTIs the scheduling delay alone does not rule out.
fn covering_sets(s: &Scenario, d: &Demand, opts: &BuildOptions) -> Vec<Vec<RbKey>> {
    let budget = s.classes[d.class].delay_budget_ms;
    let mut cells: Vec<(RbKey, u64)> = Vec::new();
    for sl in d.tti..s.num_tti {
        if (sl - d.tti) as f64 * s.tti_ms > budget + 1e-9 {
            break;
        }
        for j in 0..s.num_ru {
            for r in 0..s.rbs_per_tti {
                let rate = s.rate_bits[j][d.ue][r][sl];
                if rate > 0 {
                    cells.push(((d.ue, d.tti, j, r, sl), rate));
                }
            }
        }
    }
    cells.sort();

    let mut out = Vec::new();
    let mut pick: Vec<usize> = Vec::new();
    subsets(&cells, d.bits, 0, 0, &mut pick, &mut out);
    out.retain(|set: &Vec<RbKey>| {
        let rb_once: BTreeSet<(usize, usize)> = set.iter().map(|&(_, _, _, r, sl)| (r, sl)).collect();
        let cells: BTreeSet<(usize, usize)> = set.iter().map(|&(_, _, j, _, sl)| (sl, j)).collect();
        let slots: BTreeSet<usize> = cells.iter().map(|&(sl, _)| sl).collect();
        rb_once.len() == set.len() && (!opts.one_ru_per_slot || cells.len() == slots.len())
    });
    out.sort();
    out
}

fn subsets(cells: &[(RbKey, u64)], need: u64, from: usize, got: u64, pick: &mut Vec<usize>, out: &mut Vec<Vec<RbKey>>) {
    if got >= need {
        let total: u64 = pick.iter().map(|&c| cells[c].1).sum();
        if pick.iter().all(|&c| total - cells[c].1 < need) {
            out.push(pick.iter().map(|&c| cells[c].0).collect());
        }
        return;
    }
    for c in from..cells.len() {
        pick.push(c);
        subsets(cells, need, c + 1, got + cells[c].1, pick, out);
        pick.pop();
    }
}

struct Search<'a> {
    s: &'a Scenario,
    opts: &'a BuildOptions,
    demands: &'a [Demand],
    options: &'a [Vec<Vec<RbKey>>],
    limit: usize,
    evaluated: usize,
    /// (RU, RB, TTI) already carrying a demand.
    taken: BTreeSet<(usize, usize, usize)>,
    chosen: Vec<usize>,
    best: Option<(f64, Allocation)>,
}

impl Search<'_> {
    fn walk(&mut self, at: usize) -> Result<(), OracleError> {
        if at == self.demands.len() {
            return self.bind_all();
        }
        for (n, set) in self.options[at].iter().enumerate() {
            if set.iter().any(|&(_, _, j, r, sl)| self.taken.contains(&(j, r, sl))) {
                continue;
            }
            for &(_, _, j, r, sl) in set {
                self.taken.insert((j, r, sl));
            }
            self.chosen.push(n);
            let res = self.walk(at + 1);
            self.chosen.pop();
            for &(_, _, j, r, sl) in set {
                self.taken.remove(&(j, r, sl));
            }
            res?;
        }
        Ok(())
    }

    /// Tries every DU for every (RU, TTI) cell the chosen RBs use.
    fn bind_all(&mut self) -> Result<(), OracleError> {
        let mut base = Allocation::default();
        for (at, (d, &n)) in self.demands.iter().zip(&self.chosen).enumerate() {
            base.demand_flags.insert((d.ue, d.tti, d.class));
            base.rb_assign.extend(self.options[at][n].iter().copied());
        }
        base.canonical_serve_flags();
        let cells: Vec<(usize, usize)> = base
            .rb_assign
            .iter()
            .map(|&(_, _, j, _, sl)| (j, sl))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let nl = self.s.num_du;
        let mut digits = vec![0usize; cells.len()];
        loop {
            self.evaluated += 1;
            too_large("evaluated allocations", self.evaluated, self.limit)?;
            let mut a = base.clone();
            for (&(j, sl), &l) in cells.iter().zip(&digits) {
                a.du_assign.insert((j, l, sl));
                a.du_active.insert((l, sl));
            }
            self.consider(a);

            let mut k = 0;
            while k < digits.len() {
                digits[k] += 1;
                if digits[k] < nl {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                return Ok(());
            }
        }
    }

    fn consider(&mut self, a: Allocation) {
        let report = verify_with(self.s, &a, self.opts);
        if !report.feasible {
            return;
        }
        let e = report.energy_total_wh;
        let better = match &self.best {
            None => true,
            Some((be, ba)) => match e.total_cmp(be) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => (&a.rb_assign, &a.du_assign) < (&ba.rb_assign, &ba.du_assign),
            },
        };
        if better {
            self.best = Some((e, a));
        }
    }
}
