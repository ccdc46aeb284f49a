use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Scenario, TrafficClass};

/// Homogeneous value or one value per DU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    Uniform(f64),
    PerDu(Vec<f64>),
}

impl EnergySpec {
    /// Per-DU values for `num_du` DUs.
    pub fn expand(&self, num_du: usize) -> Vec<f64> {
        match self {
            EnergySpec::Uniform(v) => vec![*v; num_du],
            EnergySpec::PerDu(v) => v.clone(),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            EnergySpec::Uniform(v) => vec![*v],
            EnergySpec::PerDu(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_ue: usize,
    pub num_ru: usize,
    pub num_du: usize,
    pub num_tti: usize,
    pub rbs_per_tti: usize,
    pub tti_ms: f64,
    pub classes: Vec<TrafficClass>,
    pub arrival_probability: f64,
    pub arrival_window_ttis: usize,
    pub packet_size_multiplier: u64,
    /// Bits per RB, identical for every (RU, UE, RB, TTI).
    pub rate_bits: u64,
    /// Delay to every DU other than an RU's nearest one.
    pub far_delay_ms: f64,
    /// Explicit `[j][l]` matrix replacing the round-robin layout.
    pub prop_delay_ms: Option<Vec<Vec<f64>>>,
    pub e_static_wh: EnergySpec,
    pub e_dynamic_wh: EnergySpec,
    pub big_m: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_ue: 12,
            num_ru: 6,
            num_du: 3,
            num_tti: 10,
            rbs_per_tti: 4,
            tti_ms: 1.0,
            classes: vec![
                TrafficClass::new(0, 50, 2.0, 1.0),
                TrafficClass::new(1, 500, 10.0, 3.0),
            ],
            arrival_probability: 0.66,
            arrival_window_ttis: 6,
            packet_size_multiplier: 1,
            rate_bits: 350,
            far_delay_ms: 2.0,
            prop_delay_ms: None,
            e_static_wh: EnergySpec::Uniform(10_000.0),
            e_dynamic_wh: EnergySpec::Uniform(1.0),
            big_m: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("num_ue", self.num_ue),
            ("num_ru", self.num_ru),
            ("num_du", self.num_du),
            ("num_tti", self.num_tti),
            ("rbs_per_tti", self.rbs_per_tti),
        ] {
            if v == 0 {
                return Err(bad(name, "must be positive"));
            }
        }
        if !(self.tti_ms.is_finite() && self.tti_ms > 0.0) {
            return Err(bad("tti_ms", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.arrival_probability) {
            return Err(bad(
                "arrival_probability",
                format!("{} is outside [0, 1]", self.arrival_probability),
            ));
        }
        if self.arrival_window_ttis > self.num_tti {
            return Err(bad(
                "arrival_window_ttis",
                format!("{} exceeds num_tti {}", self.arrival_window_ttis, self.num_tti),
            ));
        }
        if self.classes.is_empty() {
            return Err(bad("classes", "at least one traffic class required"));
        }
        for (k, c) in self.classes.iter().enumerate() {
            if c.id != k {
                return Err(bad("classes", format!("class {k} has id {}", c.id)));
            }
            if !(c.delay_budget_ms.is_finite() && c.delay_budget_ms > 0.0) {
                return Err(bad("classes", format!("class {k} needs a positive delay budget")));
            }
            if !(c.arrival_weight.is_finite() && c.arrival_weight >= 0.0) {
                return Err(bad("classes", format!("class {k} has a negative arrival weight")));
            }
        }
        if self.arrival_probability > 0.0 && self.classes.iter().all(|c| c.arrival_weight == 0.0) {
            return Err(bad("classes", "all arrival weights are zero"));
        }
        if self.rate_bits == 0 {
            return Err(bad("rate_bits", "must be positive"));
        }
        if !(self.far_delay_ms.is_finite() && self.far_delay_ms >= 0.0) {
            return Err(bad("far_delay_ms", "must be nonnegative"));
        }
        if let Some(m) = &self.prop_delay_ms {
            if m.len() != self.num_ru || m.iter().any(|r| r.len() != self.num_du) {
                return Err(bad("prop_delay_ms", "shape must be [num_ru][num_du]"));
            }
            if m.iter().flatten().any(|d| !(d.is_finite() && *d >= 0.0)) {
                return Err(bad("prop_delay_ms", "entries must be nonnegative"));
            }
        }
        for (name, e) in [("e_static_wh", &self.e_static_wh), ("e_dynamic_wh", &self.e_dynamic_wh)] {
            if let EnergySpec::PerDu(v) = e {
                if v.len() != self.num_du {
                    return Err(bad(name, format!("expected {} values", self.num_du)));
                }
            }
            if e.values().iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(bad(name, "must be nonnegative"));
            }
        }
        if !(self.big_m.is_finite() && self.big_m > 0.0) {
            return Err(bad("big_m", "must be positive"));
        }
        Ok(())
    }
}

/// Random instance following the arrival model of the configuration.
///
/// For every UE and every TTI inside the arrival window one Bernoulli draw
/// decides whether a packet arrives, then a weighted draw picks its class.
/// The result depends only on `(cfg, seed)`. Panics on a configuration
/// that [`ScenarioConfig::validate`] rejects.
pub fn generate(cfg: &ScenarioConfig, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Scenario::blank(
        cfg.num_ue,
        cfg.num_ru,
        cfg.num_du,
        cfg.num_tti,
        cfg.rbs_per_tti,
        cfg.classes.clone(),
        cfg.rate_bits,
    );
    s.tti_ms = cfg.tti_ms;
    s.big_m = cfg.big_m;
    s.e_static_wh = cfg.e_static_wh.expand(cfg.num_du);
    s.e_dynamic_wh = cfg.e_dynamic_wh.expand(cfg.num_du);
    s.prop_delay_ms = match &cfg.prop_delay_ms {
        Some(m) => m.clone(),
        None => (0..cfg.num_ru)
            .map(|j| {
                (0..cfg.num_du)
                    .map(|l| if l == j % cfg.num_du { 0.0 } else { cfg.far_delay_ms })
                    .collect()
            })
            .collect(),
    };

    let weights: Vec<f64> = cfg.classes.iter().map(|c| c.arrival_weight).collect();
    let picker = WeightedIndex::new(&weights).ok();
    for i in 0..cfg.num_ue {
        for t in 0..cfg.arrival_window_ttis {
            if !rng.gen_bool(cfg.arrival_probability) {
                continue;
            }
            let Some(picker) = &picker else { continue };
            let k = picker.sample(&mut rng);
            s.demand_bits[i][t][k] = cfg.classes[k].packet_size_bits * cfg.packet_size_multiplier;
        }
    }
    s
}
