mod common;

use common::{batching, far_cheap_du, tiny_random, zero_demand};
use oran_jopt::baseline::{build_rb_stage, solve_disjoint, BudgetSplit};
use oran_jopt::experiment::{ExperimentPreset, Figure, Scale, SweepValue};
use oran_jopt::joint::{solve_joint, verify, BuildOptions};
use oran_jopt::scenario::generate;
use oran_jopt::solver::{MilpStatus, SolverConfig};
use proptest::prelude::*;

fn disjoint(s: &oran_jopt::scenario::Scenario) -> oran_jopt::joint::SolveOutcome {
    solve_disjoint(s, &SolverConfig::exact(), &BudgetSplit::default(), &BuildOptions::default()).unwrap()
}

#[test]
fn worst_case_split_arithmetic() {
    let s = far_cheap_du();
    let split = BudgetSplit::default();
    assert_eq!(split.sched_ms(&s, 0), 0.0);
    assert_eq!(split.prop_ms(&s, 0), 2.0);
    let f = BudgetSplit::fraction(0.25);
    assert_eq!(f.sched_ms(&s, 0) + f.prop_ms(&s, 0), 2.0);
}

#[test]
fn far_du_stays_admissible_at_the_budget_edge() {
    // the whole fronthaul share (2 ms) is reserved, so the 2 ms DU is allowed
    let out = disjoint(&far_cheap_du());
    assert_eq!(out.status, MilpStatus::Optimal);
    assert_eq!(out.energy_wh, Some(6.0));
    assert!(out.verified());
}

#[test]
fn delay_minimizing_schedule_pays_static_cost_twice() {
    let s = batching();
    let base = disjoint(&s);
    assert_eq!(base.energy_wh, Some(22.0));
    let joint = solve_joint(&s, &SolverConfig::exact(), &BuildOptions::default(), None).unwrap();
    assert_eq!(joint.energy_wh, Some(12.0));
}

#[test]
fn zero_demand_is_free() {
    let out = disjoint(&zero_demand());
    assert_eq!(out.status, MilpStatus::Optimal);
    assert_eq!(out.energy_wh, Some(0.0));
    assert!(out.allocation.unwrap().is_empty());
    let (m, _) = build_rb_stage::<f64>(&zero_demand(), &BudgetSplit::default(), &BuildOptions::default()).unwrap();
    assert!(m.num_vars() == 0 || m.objective().terms.is_empty());
}

#[test]
fn one_and_three_ms_budgets_defeat_the_baseline_only() {
    let p = ExperimentPreset::new(Figure::Fig3, Scale::Desk);
    let cfg = SweepValue::Budgets(1.0, 3.0).apply(&p.base);
    let s = generate(&cfg, 1);
    assert!(p.split.sched_ms(&s, 0) < 0.0);
    let base = solve_disjoint(&s, &p.solver, &p.split, &p.build).unwrap();
    assert_eq!(base.status, MilpStatus::Infeasible);
    assert!(base.allocation.is_none());
    let joint = solve_joint(&s, &p.solver, &p.build, None).unwrap();
    assert!(joint.verified());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn baseline_is_safe_and_dominated(seed in 0u64..10_000) {
        let s = tiny_random(seed);
        let base = disjoint(&s);
        if let Some(e) = base.energy_wh {
            let a = base.allocation.as_ref().unwrap();
            let r = verify(&s, a);
            prop_assert!(r.feasible, "{}", r.summary());
            prop_assert!((r.energy_total_wh - e).abs() < 1e-9);
            let joint = solve_joint(&s, &SolverConfig::exact(), &BuildOptions::default(), None).unwrap();
            prop_assert!(joint.energy_wh.unwrap() <= e + 1e-9);
        } else {
            prop_assert!(base.allocation.is_none());
        }
    }
}
