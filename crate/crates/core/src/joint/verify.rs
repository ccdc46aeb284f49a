//! Direct checks of an allocation against the original constraints,
//! written without the model builder: the scheduling delay is a literal
//! maximum and the fronthaul term a literal sum of products.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::scenario::Scenario;

use super::{Allocation, BuildOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    /// Indices out of range, service before arrival, or RBs for a UE that
    /// demanded nothing.
    Window,
    /// Scheduling plus fronthaul delay within the class budget.
    Delay,
    /// Delivered bits cover the demand.
    Qos,
    /// Demand flags match the demand data.
    DemandIndicator,
    /// An RB carries at most one demand.
    RbExclusive,
    /// A demand takes a given RB index from at most one RU.
    RbOneRu,
    /// A demand is served by at most one RU per TTI.
    SlotOneRu,
    /// An RU is bound to at most one DU per TTI.
    OneDu,
    /// A serving RU is bound to some DU.
    Binding,
    /// Allocated RBs imply the serve flag.
    ServeLink,
    /// A DU with bound RUs is active.
    Activation,
    /// One traffic class per UE and TTI.
    OneClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleViolation {
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub violations: BTreeMap<Rule, Vec<RuleViolation>>,
    pub feasible: bool,
    pub energy_total_wh: f64,
    pub energy_per_du_wh: Vec<f64>,
}

impl ConstraintReport {
    pub fn of(&self, rule: Rule) -> &[RuleViolation] {
        self.violations.get(&rule).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self) -> usize {
        self.violations.values().map(Vec::len).sum()
    }

    /// One line per violation.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (rule, list) in &self.violations {
            for v in list {
                out.push_str(&format!("{rule:?} {:?} residual {}\n", v.indices, v.residual));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("RBs allocated at (ru, tti) pairs with no DU binding: {unbound:?}")]
pub struct AccountingError {
    pub unbound: Vec<(usize, usize)>,
    pub total_wh: f64,
    pub per_du_wh: Vec<f64>,
}

fn accounting(s: &Scenario, alloc: &Allocation) -> (f64, Vec<f64>, Vec<(usize, usize)>) {
    let mut per_du = vec![0.0; s.num_du];
    for &(l, _) in &alloc.du_active {
        if l < s.num_du {
            per_du[l] += s.e_static_wh[l];
        }
    }
    let mut unbound = Vec::new();
    for &(_, _, j, _, sl) in &alloc.rb_assign {
        let mut bound = false;
        for l in 0..s.num_du {
            if alloc.du_assign.contains(&(j, l, sl)) {
                per_du[l] += s.e_dynamic_wh[l];
                bound = true;
            }
        }
        if !bound && !unbound.contains(&(j, sl)) {
            unbound.push((j, sl));
        }
    }
    (per_du.iter().sum(), per_du, unbound)
}

/// Total and per-DU energy of an allocation.
pub fn energy_of(s: &Scenario, alloc: &Allocation) -> Result<(f64, Vec<f64>), AccountingError> {
    let (total_wh, per_du_wh, unbound) = accounting(s, alloc);
    if unbound.is_empty() {
        Ok((total_wh, per_du_wh))
    } else {
        Err(AccountingError {
            unbound,
            total_wh,
            per_du_wh,
        })
    }
}

pub fn verify(s: &Scenario, alloc: &Allocation) -> ConstraintReport {
    verify_with(s, alloc, &BuildOptions::default())
}

/// Checks every rule; `opts` selects the same variants the model builder
/// offers (per-slot RU uniqueness, fronthaul counting).
pub fn verify_with(s: &Scenario, alloc: &Allocation, opts: &BuildOptions) -> ConstraintReport {
    let mut out: BTreeMap<Rule, Vec<RuleViolation>> = BTreeMap::new();
    let mut flag = |rule: Rule, indices: Vec<usize>, residual: f64| {
        out.entry(rule).or_default().push(RuleViolation { indices, residual });
    };
    let tol = |rhs: f64| 1e-9 * rhs.abs().max(1.0);
    let m = s.big_m;
    let (ni, nj, nl, nt, nr, nk) = (
        s.num_ue,
        s.num_ru,
        s.num_du,
        s.num_tti,
        s.rbs_per_tti,
        s.num_classes(),
    );

    let mut rb_ok = Vec::new();
    for &(i, t, j, r, sl) in &alloc.rb_assign {
        let in_range = i < ni && t < nt && j < nj && r < nr && sl < nt;
        if !in_range {
            flag(Rule::Window, vec![i, t, j, r, sl], 1.0);
        } else if sl < t {
            flag(Rule::Window, vec![i, t, j, r, sl], (t - sl) as f64);
        } else if s.demand_bits[i][t].iter().all(|&b| b == 0) {
            flag(Rule::Window, vec![i, t, j, r, sl], 1.0);
        } else {
            rb_ok.push((i, t, j, r, sl));
        }
    }
    for &(j, l, sl) in &alloc.du_assign {
        if j >= nj || l >= nl || sl >= nt {
            flag(Rule::Window, vec![j, l, sl], 1.0);
        }
    }
    for &(l, t) in &alloc.du_active {
        if l >= nl || t >= nt {
            flag(Rule::Window, vec![l, t], 1.0);
        }
    }
    for &(i, t, k) in &alloc.demand_flags {
        if i >= ni || t >= nt || k >= nk {
            flag(Rule::Window, vec![i, t, k], 1.0);
        }
    }
    for &(i, t, j, sl) in &alloc.serve_flags {
        if i >= ni || t >= nt || j >= nj || sl >= nt {
            flag(Rule::Window, vec![i, t, j, sl], 1.0);
        }
    }

    let u = |i: usize, t: usize, k: usize| alloc.demand_flags.contains(&(i, t, k));
    let bound_dus = |j: usize, sl: usize| -> Vec<usize> {
        (0..nl).filter(|&l| alloc.du_assign.contains(&(j, l, sl))).collect()
    };

    // per-demand tallies
    let mut delivered: HashMap<(usize, usize), f64> = HashMap::new();
    let mut fronthaul: HashMap<(usize, usize), f64> = HashMap::new();
    let mut rb_users: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut rb_rus: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    let mut rbs_per_serve: HashMap<(usize, usize, usize, usize), usize> = HashMap::new();
    for &(i, t, j, r, sl) in &rb_ok {
        *delivered.entry((i, t)).or_default() += s.rate_bits[j][i][r][sl] as f64;
        *rb_users.entry((j, r, sl)).or_default() += 1;
        *rb_rus.entry((i, t, r, sl)).or_default() += 1;
        *rbs_per_serve.entry((i, t, j, sl)).or_default() += 1;
        if !opts.per_du_propagation {
            for l in bound_dus(j, sl) {
                *fronthaul.entry((i, t)).or_default() += s.prop_delay_ms[j][l];
            }
        }
    }
    let mut last_slot: HashMap<(usize, usize), usize> = HashMap::new();
    let mut serve_per_slot: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut serve_per_ru: HashMap<(usize, usize), usize> = HashMap::new();
    for &(i, t, j, sl) in &alloc.serve_flags {
        if i >= ni || t >= nt || j >= nj || sl >= nt {
            continue;
        }
        let e = last_slot.entry((i, t)).or_insert(0);
        *e = (*e).max(sl);
        *serve_per_slot.entry((i, t, sl)).or_default() += 1;
        *serve_per_ru.entry((j, sl)).or_default() += 1;
        if opts.per_du_propagation {
            for l in bound_dus(j, sl) {
                *fronthaul.entry((i, t)).or_default() += s.prop_delay_ms[j][l];
            }
        }
    }

    for i in 0..ni {
        for t in 0..nt {
            let sched = (*last_slot.get(&(i, t)).unwrap_or(&0) as f64 - t as f64) * s.tti_ms;
            let lhs = sched + fronthaul.get(&(i, t)).copied().unwrap_or(0.0);
            let mut need = 0.0;
            let mut flags = 0;
            for k in 0..nk {
                let on = u(i, t, k);
                let rhs = if on { s.classes[k].delay_budget_ms } else { m };
                if lhs > rhs + tol(rhs) {
                    flag(Rule::Delay, vec![i, t, k], lhs - rhs);
                }
                let bits = s.demand_bits[i][t][k] as f64;
                if on {
                    need += bits;
                    flags += 1;
                }
                if !on && bits > 0.0 {
                    flag(Rule::DemandIndicator, vec![i, t, k], bits);
                }
                if on && bits == 0.0 {
                    flag(Rule::DemandIndicator, vec![i, t, k], 1.0);
                }
            }
            let got = delivered.get(&(i, t)).copied().unwrap_or(0.0);
            if got + tol(need) < need {
                flag(Rule::Qos, vec![i, t], need - got);
            }
            if flags > 1 {
                flag(Rule::OneClass, vec![i, t], (flags - 1) as f64);
            }
        }
    }
    for (&(j, r, sl), &n) in &rb_users {
        if n > 1 {
            flag(Rule::RbExclusive, vec![j, r, sl], (n - 1) as f64);
        }
    }
    for (&(i, t, r, sl), &n) in &rb_rus {
        if n > 1 {
            flag(Rule::RbOneRu, vec![i, t, r, sl], (n - 1) as f64);
        }
    }
    if opts.one_ru_per_slot {
        for (&(i, t, sl), &n) in &serve_per_slot {
            if n > 1 {
                flag(Rule::SlotOneRu, vec![i, t, sl], (n - 1) as f64);
            }
        }
    }
    for j in 0..nj {
        for sl in 0..nt {
            let bound = bound_dus(j, sl).len();
            if bound > 1 {
                flag(Rule::OneDu, vec![j, sl], (bound - 1) as f64);
            }
            let served = serve_per_ru.get(&(j, sl)).copied().unwrap_or(0) as f64;
            if m * bound as f64 + tol(served) < served {
                flag(Rule::Binding, vec![j, sl], served - m * bound as f64);
            }
        }
    }
    for (&(i, t, j, sl), &n) in &rbs_per_serve {
        let y = if alloc.serve_flags.contains(&(i, t, j, sl)) { 1.0 } else { 0.0 };
        if m * y < n as f64 {
            flag(Rule::ServeLink, vec![i, t, j, sl], n as f64 - m * y);
        }
    }
    for l in 0..nl {
        for t in 0..nt {
            let c = if alloc.du_active.contains(&(l, t)) { 1.0 } else { 0.0 };
            let bound = (0..nj).filter(|&j| alloc.du_assign.contains(&(j, l, t))).count() as f64;
            if m * c < bound {
                flag(Rule::Activation, vec![l, t], bound - m * c);
            }
        }
    }
    for list in out.values_mut() {
        list.sort_by(|a, b| a.indices.cmp(&b.indices));
    }

    let (energy_total_wh, energy_per_du_wh, _) = accounting(s, alloc);
    ConstraintReport {
        feasible: out.is_empty(),
        violations: out,
        energy_total_wh,
        energy_per_du_wh,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::TrafficClass;

    fn tiny() -> Scenario {
        let classes = vec![TrafficClass::new(0, 50, 2.0, 1.0)];
        let mut s = Scenario::blank(1, 1, 2, 2, 1, classes, 350);
        s.demand_bits[0][0][0] = 50;
        s.prop_delay_ms = vec![vec![0.0, 2.0]];
        s.e_static_wh = vec![10.0, 5.0];
        s.e_dynamic_wh = vec![1.0, 1.0];
        s
    }

    fn far_du_plan() -> Allocation {
        let mut a = Allocation::default();
        a.rb_assign.insert((0, 0, 0, 0, 0));
        a.du_assign.insert((0, 1, 0));
        a.du_active.insert((1, 0));
        a.demand_flags.insert((0, 0, 0));
        a.canonical_serve_flags();
        a
    }

    #[test]
    fn far_du_plan_is_feasible() {
        let r = verify(&tiny(), &far_du_plan());
        assert!(r.feasible, "{}", r.summary());
        assert_eq!(r.energy_total_wh, 6.0);
        assert_eq!(r.energy_per_du_wh, vec![0.0, 6.0]);
    }

    #[test]
    fn missing_activation_reported() {
        let mut a = far_du_plan();
        a.du_active.clear();
        let r = verify(&tiny(), &a);
        assert_eq!(r.of(Rule::Activation).len(), 1);
        assert_eq!(r.count(), 1);
    }

    #[test]
    fn late_service_exceeds_budget_by_one() {
        let classes = vec![TrafficClass::new(0, 50, 2.0, 1.0)];
        let mut s = Scenario::blank(1, 1, 1, 4, 1, classes, 350);
        s.demand_bits[0][0][0] = 50;
        let mut a = Allocation::default();
        a.rb_assign.insert((0, 0, 0, 0, 3));
        a.du_assign.insert((0, 0, 3));
        a.du_active.insert((0, 3));
        a.demand_flags.insert((0, 0, 0));
        a.canonical_serve_flags();
        let r = verify(&s, &a);
        assert_eq!(r.of(Rule::Delay), &[RuleViolation { indices: vec![0, 0, 0], residual: 1.0 }]);
        assert_eq!(r.count(), 1);
    }

    #[test]
    fn energy_of_counts_static_and_dynamic() {
        assert_eq!(energy_of(&tiny(), &Allocation::default()).unwrap(), (0.0, vec![0.0, 0.0]));
        assert_eq!(energy_of(&tiny(), &far_du_plan()).unwrap(), (6.0, vec![0.0, 6.0]));
        let mut s = Scenario::blank(1, 1, 3, 3, 1, vec![TrafficClass::new(0, 50, 2.0, 1.0)], 350);
        s.e_static_wh = vec![10_000.0; 3];
        let mut a = Allocation::default();
        a.du_active.insert((0, 0));
        a.du_active.insert((0, 2));
        assert_eq!(energy_of(&s, &a).unwrap(), (20_000.0, vec![20_000.0, 0.0, 0.0]));
    }

    #[test]
    fn unbound_rbs_are_an_accounting_error() {
        let mut a = far_du_plan();
        a.du_assign.clear();
        let err = energy_of(&tiny(), &a).unwrap_err();
        assert_eq!(err.unbound, vec![(0, 0)]);
    }
}
