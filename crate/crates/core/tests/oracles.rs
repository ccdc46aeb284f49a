mod common;

use common::{batching, far_cheap_du, tiny_random, zero_demand};
use oran_jopt::joint::{build_joint, verify_with, BuildOptions};
use oran_jopt::oracle::{enumerate_domain, enumerate_model, Caps, DEFAULT_BINARY_CAP};
use oran_jopt::solver::{solve_milp, SolverConfig};
use proptest::prelude::*;

// Tiny joint models carry a few dozen free binaries; the default cap is
// meant for hand-built models.
const TINY_MODEL_CAP: usize = 200;

fn domain_energy(s: &oran_jopt::scenario::Scenario, opts: &BuildOptions) -> Option<f64> {
    enumerate_domain(s, &Caps::default(), opts).unwrap().energy_wh()
}

#[test]
fn known_instances() {
    let o = BuildOptions::default();
    assert_eq!(domain_energy(&far_cheap_du(), &o), Some(6.0));
    assert_eq!(domain_energy(&batching(), &o), Some(12.0));
    assert_eq!(domain_energy(&zero_demand(), &o), Some(0.0));
    let best = enumerate_domain(&zero_demand(), &Caps::default(), &o).unwrap();
    assert!(best.best.unwrap().1.is_empty());

    let (m, _) = build_joint::<f64>(&far_cheap_du(), &o).unwrap();
    let e = enumerate_model(&m, TINY_MODEL_CAP).unwrap().unwrap();
    assert!((e.objective - 6.0).abs() < 1e-9);
}

#[test]
fn no_du_within_half_millisecond() {
    let mut s = far_cheap_du();
    s.classes[0].delay_budget_ms = 0.5;
    s.prop_delay_ms = vec![vec![2.0, 2.0]];
    assert_eq!(domain_energy(&s, &BuildOptions::default()), None);
}

#[test]
fn default_cap_rejects_joint_models() {
    let (m, _) = build_joint::<f64>(&tiny_random(3), &BuildOptions::default()).unwrap();
    assert!(enumerate_model(&m, DEFAULT_BINARY_CAP).is_err());
}

#[test]
fn solver_and_both_oracles_agree_on_fifty_instances() {
    let o = BuildOptions::default();
    let mut feasible = 0;
    for seed in 0..50 {
        let s = tiny_random(seed);
        let domain = enumerate_domain(&s, &Caps::default(), &o).unwrap();
        let (m, _) = build_joint::<f64>(&s, &o).unwrap();
        let model = enumerate_model(&m, TINY_MODEL_CAP).unwrap();
        let milp = solve_milp(&m, &SolverConfig::exact());
        match domain.energy_wh() {
            Some(e) => {
                feasible += 1;
                let me = model.as_ref().map(|x| x.objective).expect("model oracle found nothing");
                assert!((me - e).abs() <= 1e-9, "seed {seed}: model oracle {me} vs domain {e}");
                let be = milp.objective.expect("solver found nothing");
                assert!((be - e).abs() <= 1e-6, "seed {seed}: solver {be} vs domain {e}");
                let (_, alloc) = domain.best.as_ref().unwrap();
                let r = verify_with(&s, alloc, &o);
                assert!(r.feasible && (r.energy_total_wh - e).abs() < 1e-9);
            }
            None => {
                assert!(model.is_none(), "seed {seed}");
                assert!(milp.objective.is_none(), "seed {seed}");
            }
        }
    }
    assert!(feasible >= 25, "only {feasible} feasible instances");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn widening_the_window_never_helps(seed in 0u64..10_000, slack in 1usize..3) {
        let s = tiny_random(seed);
        let base = domain_energy(&s, &BuildOptions::default());
        let wide = BuildOptions { window_slack: slack, ..BuildOptions::default() };
        let (m, _) = build_joint::<f64>(&s, &wide).unwrap();
        let widened = solve_milp(&m, &SolverConfig::exact()).objective;
        match (base, widened) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}"),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn domain_optimum_verifies(seed in 0u64..10_000) {
        let s = tiny_random(seed);
        let o = BuildOptions::default();
        let d = enumerate_domain(&s, &Caps::default(), &o).unwrap();
        if let Some((e, alloc)) = d.best {
            let r = verify_with(&s, &alloc, &o);
            prop_assert!(r.feasible, "{}", r.summary());
            prop_assert!((r.energy_total_wh - e).abs() < 1e-9);
        }
    }
}
