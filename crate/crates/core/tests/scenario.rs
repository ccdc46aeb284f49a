use oran_jopt::scenario::{generate, load_str, to_json, validate, ScenarioConfig};
use proptest::prelude::*;

#[test]
fn arrival_statistics_over_ten_thousand_seeds() {
    let cfg = ScenarioConfig::default();
    let seeds = 10_000u64;
    let (mut demands, mut embb) = (0u64, 0u64);
    for seed in 0..seeds {
        let s = generate(&cfg, seed);
        for d in s.demands() {
            demands += 1;
            embb += (d.class == 1) as u64;
        }
    }
    let p = cfg.arrival_probability;
    let w = cfg.arrival_window_ttis as f64;
    let n_ue = (seeds as usize * cfg.num_ue) as f64;
    let mean = demands as f64 / n_ue;
    let sigma = (w * p * (1.0 - p) / n_ue).sqrt();
    assert!((mean - p * w).abs() <= 3.0 * sigma, "mean {mean} expected {}", p * w);

    let frac = embb as f64 / demands as f64;
    let sigma = (0.75 * 0.25 / demands as f64).sqrt();
    assert!((frac - 0.75).abs() <= 3.0 * sigma, "eMBB share {frac}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_scenarios_validate_and_reload(
        seed in any::<u64>(),
        ue in 1usize..8,
        ru in 1usize..5,
        du in 1usize..4,
        tti in 1usize..9,
        mult in 1u64..6,
    ) {
        let cfg = ScenarioConfig {
            num_ue: ue,
            num_ru: ru,
            num_du: du,
            num_tti: tti,
            arrival_window_ttis: tti,
            packet_size_multiplier: mult,
            ..ScenarioConfig::default()
        };
        prop_assert!(cfg.validate().is_ok());
        let s = generate(&cfg, seed);
        prop_assert!(validate(&s).is_empty());
        prop_assert_eq!(s.demands().iter().map(|d| d.bits).sum::<u64>(), s.total_demand_bits());
        let text = to_json(&s);
        prop_assert_eq!(load_str(&text).unwrap(), s.clone());
        prop_assert_eq!(to_json(&load_str(&text).unwrap()), text);
    }
}
