#![allow(dead_code)]

use oran_jopt::scenario::{generate, EnergySpec, Scenario, ScenarioConfig, TrafficClass};

/// One URLLC demand, one RU, two DUs: the near DU is expensive, the far one
/// cheap but exactly at the delay budget. Optimum 6.0 Wh via DU 1.
pub fn far_cheap_du() -> Scenario {
    let classes = vec![TrafficClass::new(0, 50, 2.0, 1.0)];
    let mut s = Scenario::blank(1, 1, 2, 2, 1, classes, 350);
    s.demand_bits[0][0][0] = 50;
    s.prop_delay_ms = vec![vec![0.0, 2.0]];
    s.e_static_wh = vec![10.0, 5.0];
    s.e_dynamic_wh = vec![1.0, 1.0];
    s
}

/// Two small demands of one UE at consecutive TTIs with a loose budget. The
/// joint model packs both into one DU-TTI (12 Wh); a delay-minimizing
/// scheduler serves each on arrival and pays the static cost twice (22 Wh).
pub fn batching() -> Scenario {
    let classes = vec![TrafficClass::new(0, 50, 3.0, 1.0)];
    let mut s = Scenario::blank(1, 1, 1, 2, 2, classes, 350);
    s.demand_bits[0][0][0] = 50;
    s.demand_bits[0][1][0] = 50;
    s.e_static_wh = vec![10.0];
    s.e_dynamic_wh = vec![1.0];
    s
}

pub fn zero_demand() -> Scenario {
    let mut s = far_cheap_du();
    s.demand_bits[0][0][0] = 0;
    s
}

/// Random instance within the enumeration caps, at most three demands.
pub fn tiny_random(seed: u64) -> Scenario {
    let cfg = ScenarioConfig {
        num_ue: 2 + (seed % 2) as usize,
        num_ru: 1 + (seed % 3 == 0) as usize,
        num_du: 2,
        num_tti: 3 + (seed % 2) as usize,
        rbs_per_tti: 1 + (seed % 4 >= 2) as usize,
        arrival_window_ttis: 2,
        arrival_probability: 0.4,
        classes: vec![TrafficClass::new(0, 50, 1.0, 1.0), TrafficClass::new(1, 500, 3.0, 1.0)],
        e_static_wh: EnergySpec::PerDu(vec![10.0 + (seed % 5) as f64, 6.0]),
        ..Default::default()
    };
    let mut s = generate(&cfg, seed);
    for d in s.demands().into_iter().skip(3) {
        s.demand_bits[d.ue][d.tti][d.class] = 0;
    }
    s
}
