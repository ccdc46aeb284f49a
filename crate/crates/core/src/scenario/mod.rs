//! Problem instances: data model, validation, random generation and the
//! JSON scenario file format.

mod generate;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use generate::{generate, ConfigError, EnergySpec, ScenarioConfig};
pub use io::{load, load_str, save, to_json, ScenarioError};

/// One traffic type: packet size, delay budget and relative arrival rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficClass {
    pub id: usize,
    pub packet_size_bits: u64,
    #[serde(with = "io::dec")]
    pub delay_budget_ms: f64,
    #[serde(with = "io::dec")]
    pub arrival_weight: f64,
}

impl TrafficClass {
    pub fn new(id: usize, packet_size_bits: u64, delay_budget_ms: f64, arrival_weight: f64) -> Self {
        Self {
            id,
            packet_size_bits,
            delay_budget_ms,
            arrival_weight,
        }
    }
}

/// A complete problem instance.
///
/// Index conventions: `demand_bits[i][t][k]`, `rate_bits[j][i][r][t]`,
/// `prop_delay_ms[j][l]`, energies per DU `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub num_ue: usize,
    pub num_ru: usize,
    pub num_du: usize,
    pub num_tti: usize,
    pub rbs_per_tti: usize,
    #[serde(with = "io::dec")]
    pub tti_ms: f64,
    pub classes: Vec<TrafficClass>,
    pub demand_bits: Vec<Vec<Vec<u64>>>,
    pub rate_bits: Vec<Vec<Vec<Vec<u64>>>>,
    #[serde(with = "io::dec_mat")]
    pub prop_delay_ms: Vec<Vec<f64>>,
    #[serde(with = "io::dec_vec")]
    pub e_static_wh: Vec<f64>,
    #[serde(with = "io::dec_vec")]
    pub e_dynamic_wh: Vec<f64>,
    #[serde(with = "io::dec")]
    pub big_m: f64,
}

/// A demand: UE `i` requesting `bits` of class `k` at TTI `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Demand {
    pub ue: usize,
    pub tti: usize,
    pub class: usize,
    pub bits: u64,
}

impl Scenario {
    /// Instance with no demands, constant rate and uniform energies.
    #[allow(clippy::too_many_arguments)]
    pub fn blank(
        num_ue: usize,
        num_ru: usize,
        num_du: usize,
        num_tti: usize,
        rbs_per_tti: usize,
        classes: Vec<TrafficClass>,
        rate: u64,
    ) -> Self {
        Self {
            num_ue,
            num_ru,
            num_du,
            num_tti,
            rbs_per_tti,
            tti_ms: 1.0,
            demand_bits: vec![vec![vec![0; classes.len()]; num_tti]; num_ue],
            classes,
            rate_bits: vec![vec![vec![vec![rate; num_tti]; rbs_per_tti]; num_ue]; num_ru],
            prop_delay_ms: vec![vec![0.0; num_du]; num_ru],
            e_static_wh: vec![0.0; num_du],
            e_dynamic_wh: vec![0.0; num_du],
            big_m: 1e4,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Demands in `(i, t)` order; at most one class per `(i, t)` is assumed.
    pub fn demands(&self) -> Vec<Demand> {
        let mut out = Vec::new();
        for (i, per_t) in self.demand_bits.iter().enumerate() {
            for (t, per_k) in per_t.iter().enumerate() {
                for (k, &bits) in per_k.iter().enumerate() {
                    if bits > 0 {
                        out.push(Demand {
                            ue: i,
                            tti: t,
                            class: k,
                            bits,
                        });
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn max_prop_delay(&self) -> f64 {
        self.prop_delay_ms
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Last TTI a demand of class `k` arriving at `t` may be served in.
    pub fn window_end(&self, t: usize, k: usize, slack: usize) -> usize {
        let span = (self.classes[k].delay_budget_ms / self.tti_ms + 1e-9).floor();
        let span = if span.is_finite() && span > 0.0 { span as usize } else { 0 };
        (t + span + slack).min(self.num_tti - 1)
    }

    /// Smallest positive rate offered to UE `i` anywhere, if any.
    pub fn min_positive_rate(&self) -> Option<u64> {
        self.rate_bits
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .copied()
            .filter(|&s| s > 0)
            .min()
    }

    pub fn total_demand_bits(&self) -> u64 {
        self.demand_bits.iter().flatten().flatten().sum()
    }
}

/// A single failed scenario invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioViolation {
    pub field: String,
    pub indices: Vec<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            write!(f, "{}: {}", self.field, self.message)
        } else {
            write!(f, "{}{:?}: {}", self.field, self.indices, self.message)
        }
    }
}

fn violation(field: &str, indices: &[usize], message: impl Into<String>) -> ScenarioViolation {
    ScenarioViolation {
        field: field.to_string(),
        indices: indices.to_vec(),
        message: message.into(),
    }
}

fn nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Checks every scenario invariant; the list is empty iff the instance is
/// valid.
pub fn validate(s: &Scenario) -> Vec<ScenarioViolation> {
    let mut out = Vec::new();
    for (name, v) in [
        ("num_ue", s.num_ue),
        ("num_ru", s.num_ru),
        ("num_du", s.num_du),
        ("num_tti", s.num_tti),
        ("rbs_per_tti", s.rbs_per_tti),
    ] {
        if v == 0 {
            out.push(violation(name, &[], "must be positive"));
        }
    }
    if !(s.tti_ms.is_finite() && s.tti_ms > 0.0) {
        out.push(violation("tti_ms", &[], "must be positive"));
    }
    if !(s.big_m.is_finite() && s.big_m > 0.0) {
        out.push(violation("big_m", &[], "must be positive"));
    }
    if s.classes.is_empty() {
        out.push(violation("classes", &[], "at least one traffic class required"));
    }
    for (k, c) in s.classes.iter().enumerate() {
        if c.id != k {
            out.push(violation("classes.id", &[k], format!("expected {k}, found {}", c.id)));
        }
        if !(c.delay_budget_ms.is_finite() && c.delay_budget_ms > 0.0) {
            out.push(violation(
                "classes.delay_budget_ms",
                &[k],
                format!("must be positive, found {}", c.delay_budget_ms),
            ));
        }
        if !nonneg(c.arrival_weight) {
            out.push(violation("classes.arrival_weight", &[k], "must be nonnegative"));
        }
    }
    if !out.is_empty() {
        return out;
    }

    let k_n = s.classes.len();
    if s.demand_bits.len() != s.num_ue {
        out.push(violation("demand_bits", &[], format!("expected {} rows", s.num_ue)));
    } else {
        for (i, per_t) in s.demand_bits.iter().enumerate() {
            if per_t.len() != s.num_tti {
                out.push(violation("demand_bits", &[i], format!("expected {} TTIs", s.num_tti)));
                continue;
            }
            for (t, per_k) in per_t.iter().enumerate() {
                if per_k.len() != k_n {
                    out.push(violation("demand_bits", &[i, t], format!("expected {k_n} classes")));
                    continue;
                }
                let active = per_k.iter().filter(|&&b| b > 0).count();
                if active > 1 {
                    out.push(violation(
                        "demand_bits",
                        &[i, t],
                        "demand in more than one traffic class at the same (i,t)",
                    ));
                }
            }
        }
    }

    let rate_ok = s.rate_bits.len() == s.num_ru
        && s.rate_bits.iter().all(|per_i| {
            per_i.len() == s.num_ue
                && per_i.iter().all(|per_r| {
                    per_r.len() == s.rbs_per_tti && per_r.iter().all(|per_t| per_t.len() == s.num_tti)
                })
        });
    if !rate_ok {
        out.push(violation(
            "rate_bits",
            &[],
            format!(
                "expected shape [{}][{}][{}][{}]",
                s.num_ru, s.num_ue, s.rbs_per_tti, s.num_tti
            ),
        ));
    }

    if s.prop_delay_ms.len() != s.num_ru {
        out.push(violation("prop_delay_ms", &[], format!("expected {} rows", s.num_ru)));
    } else {
        for (j, row) in s.prop_delay_ms.iter().enumerate() {
            if row.len() != s.num_du {
                out.push(violation("prop_delay_ms", &[j], format!("expected {} DUs", s.num_du)));
                continue;
            }
            for (l, &d) in row.iter().enumerate() {
                if !nonneg(d) {
                    out.push(violation("prop_delay_ms", &[j, l], "must be nonnegative"));
                }
            }
        }
    }
    for (name, v) in [("e_static_wh", &s.e_static_wh), ("e_dynamic_wh", &s.e_dynamic_wh)] {
        if v.len() != s.num_du {
            out.push(violation(name, &[], format!("expected {} entries", s.num_du)));
            continue;
        }
        for (l, &e) in v.iter().enumerate() {
            if !nonneg(e) {
                out.push(violation(name, &[l], "must be nonnegative"));
            }
        }
    }

    if out.is_empty() {
        let capacity = (s.num_tti * s.rbs_per_tti * s.num_ue) as f64;
        let max_demand = s.demand_bits.iter().flatten().flatten().copied().max().unwrap_or(0);
        let ratio = match s.min_positive_rate() {
            Some(rate) => max_demand as f64 / rate as f64,
            None => 0.0,
        };
        let need = capacity.max(ratio).max(max_demand as f64);
        if s.big_m < need {
            out.push(violation(
                "big_m",
                &[],
                format!("{} is below the required {need}", s.big_m),
            ));
        }
    }
    out
}
