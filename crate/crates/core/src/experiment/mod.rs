//! Preset sweeps comparing the joint model with the two-stage baseline.

mod report;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::BudgetSplit;
use crate::joint::BuildOptions;
use crate::scenario::{EnergySpec, ScenarioConfig, TrafficClass};
use crate::solver::SolverConfig;

pub use report::{render_svg, to_csv, CSV_COLUMNS};
pub use run::{run_point, run_preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Total energy against the packet size multiplier.
    Fig2,
    /// Per-DU energy against the delay budget pair, unequal DU costs.
    Fig3,
    /// Total energy against the number of RUs.
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Paper,
    /// Smaller cardinalities and fewer seeds so a sweep finishes in minutes
    /// with the built-in solver.
    Desk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Joint,
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown {what} `{text}`, expected one of: {expected}")]
pub struct ParseNameError {
    pub what: &'static str,
    pub text: String,
    pub expected: &'static str,
}

macro_rules! named {
    ($ty:ty, $what:literal, $( $v:path => $s:literal ),+) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $( $v => $s ),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = ParseNameError;
            fn from_str(text: &str) -> Result<Self, Self::Err> {
                match text {
                    $( $s => Ok($v), )+
                    _ => Err(ParseNameError {
                        what: $what,
                        text: text.to_string(),
                        expected: concat!($( $s, " " ),+).trim_ascii_end(),
                    }),
                }
            }
        }
    };
}

named!(Figure, "preset", Figure::Fig2 => "fig2", Figure::Fig3 => "fig3", Figure::Fig4 => "fig4");
named!(Scale, "scale", Scale::Paper => "paper", Scale::Desk => "desk");
named!(Mode, "mode", Mode::Joint => "joint", Mode::Disjoint => "disjoint");

/// One x-axis position of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepValue {
    Multiplier(u64),
    /// URLLC and eMBB budgets in ms.
    Budgets(f64, f64),
    RuCount(usize),
}

impl SweepValue {
    /// Position on a numeric axis.
    pub fn x(&self) -> f64 {
        match *self {
            SweepValue::Multiplier(m) => m as f64,
            SweepValue::Budgets(d0, _) => d0,
            SweepValue::RuCount(j) => j as f64,
        }
    }

    /// Applies this point to a base configuration.
    pub fn apply(&self, base: &ScenarioConfig) -> ScenarioConfig {
        let mut cfg = base.clone();
        match *self {
            SweepValue::Multiplier(m) => cfg.packet_size_multiplier = m,
            SweepValue::Budgets(d0, d1) => {
                cfg.classes[0].delay_budget_ms = d0;
                cfg.classes[1].delay_budget_ms = d1;
            }
            SweepValue::RuCount(j) => cfg.num_ru = j,
        }
        cfg
    }
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Multiplier(m) => write!(f, "{m}"),
            SweepValue::Budgets(d0, d1) => write!(f, "{d0}/{d1}"),
            SweepValue::RuCount(j) => write!(f, "{j}"),
        }
    }
}

/// A figure's sweep: base scenario, x-axis points, seeds and solver limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPreset {
    pub figure: Figure,
    pub scale: Scale,
    pub base: ScenarioConfig,
    pub sweep: Vec<SweepValue>,
    pub seeds: Vec<u64>,
    pub solver: SolverConfig,
    pub split: BudgetSplit,
    pub build: BuildOptions,
}

/// Branch-and-bound nodes per solve at desk scale. Node counts rather than
/// wall time bound the search so that reruns give identical results.
pub const DESK_MAX_NODES: usize = 30;

/// Wall-clock limit per solve at paper scale, in seconds.
pub const PAPER_TIME_LIMIT_S: f64 = 12.0 * 3600.0;

impl ExperimentPreset {
    pub fn new(figure: Figure, scale: Scale) -> Self {
        let desk = scale == Scale::Desk;
        let mut base = ScenarioConfig {
            num_ue: if desk { 6 } else { 12 },
            num_ru: if desk { 3 } else { 6 },
            num_du: if desk { 2 } else { 3 },
            num_tti: if desk { 8 } else { 10 },
            rbs_per_tti: 8,
            arrival_window_ttis: if desk { 5 } else { 6 },
            ..ScenarioConfig::default()
        };
        let sweep = match figure {
            Figure::Fig2 => (1..=5).map(SweepValue::Multiplier).collect(),
            Figure::Fig3 => {
                base.num_du = 3;
                base.e_static_wh = EnergySpec::PerDu(vec![15_000.0, 10_000.0, 5_000.0]);
                (1..=5).map(|d0| SweepValue::Budgets(d0 as f64, 3.0 * d0 as f64)).collect()
            }
            Figure::Fig4 => {
                base.classes = vec![TrafficClass::new(0, 150, 2.0, 1.0), TrafficClass::new(1, 1500, 10.0, 3.0)];
                let step = base.num_ru;
                (1..=5).map(|n| SweepValue::RuCount(n * step)).collect()
            }
        };
        let solver = if desk {
            SolverConfig {
                time_limit_s: f64::INFINITY,
                max_nodes: Some(DESK_MAX_NODES),
                ..SolverConfig::default()
            }
        } else {
            SolverConfig {
                time_limit_s: PAPER_TIME_LIMIT_S,
                ..SolverConfig::default()
            }
        };
        Self {
            figure,
            scale,
            base,
            sweep,
            seeds: if desk { vec![1, 2, 3] } else { (1..=6).collect() },
            solver,
            split: BudgetSplit::default(),
            build: BuildOptions::default(),
        }
    }

    /// Scenario configuration of sweep point `k`.
    pub fn config_at(&self, k: usize) -> ScenarioConfig {
        self.sweep[k].apply(&self.base)
    }

    /// One-line description of the fixed parameters, for file headers.
    pub fn describe(&self) -> String {
        let b = &self.base;
        let classes: Vec<String> = b
            .classes
            .iter()
            .map(|c| format!("{}b/{}ms", c.packet_size_bits, c.delay_budget_ms))
            .collect();
        let nodes = match self.solver.max_nodes {
            Some(n) => n.to_string(),
            None => "unlimited".to_string(),
        };
        let swept = match self.figure {
            Figure::Fig2 => "packet size multiplier",
            Figure::Fig3 => "delay budgets (URLLC/eMBB ms)",
            Figure::Fig4 => "RU count, UE count held fixed",
        };
        format!(
            "preset={} scale={} sweep={swept} ue={} ru={} du={} tti={} rb={} classes={} static_wh={:?} gap={} max_nodes={nodes} split={}",
            self.figure,
            self.scale,
            b.num_ue,
            b.num_ru,
            b.num_du,
            b.num_tti,
            b.rbs_per_tti,
            classes.join(","),
            b.e_static_wh.expand(b.num_du),
            self.solver.rel_gap,
            self.split,
        )
    }
}

/// Outcome of one (sweep point, seed, mode) solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub figure: Figure,
    pub seed: u64,
    /// Index into the preset's sweep, used for ordering.
    pub point: usize,
    pub sweep: SweepValue,
    pub mode: Mode,
    /// Solver status, or `error` when the model could not be built.
    pub status: String,
    pub energy_wh: Option<f64>,
    pub per_du_wh: Option<Vec<f64>>,
    pub rel_gap: Option<f64>,
    pub nodes: usize,
    pub wall_seconds: f64,
    /// The allocation passed the checker. False when there is none.
    pub verified: bool,
}

impl ExperimentRecord {
    pub fn feasible(&self) -> bool {
        self.energy_wh.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in [Figure::Fig2, Figure::Fig3, Figure::Fig4] {
            assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
        }
        assert_eq!("desk".parse::<Scale>().unwrap(), Scale::Desk);
        let err = "both".parse::<Mode>().unwrap_err();
        assert_eq!(err.expected, "joint disjoint");
    }

    #[test]
    fn desk_presets_shrink_and_keep_sweeps() {
        let p = ExperimentPreset::new(Figure::Fig2, Scale::Desk);
        assert_eq!((p.base.num_ue, p.base.num_ru, p.base.num_du, p.base.num_tti), (6, 3, 2, 8));
        assert_eq!(p.seeds, vec![1, 2, 3]);
        assert_eq!(p.sweep.len(), 5);
        let p3 = ExperimentPreset::new(Figure::Fig3, Scale::Desk);
        assert_eq!(p3.base.num_du, 3);
        assert_eq!(p3.config_at(3).classes[1].delay_budget_ms, 12.0);
        let p4 = ExperimentPreset::new(Figure::Fig4, Scale::Paper);
        assert_eq!(p4.sweep.iter().map(|v| v.x()).collect::<Vec<_>>(), vec![6.0, 12.0, 18.0, 24.0, 30.0]);
        assert_eq!(p4.config_at(0).classes[0].packet_size_bits, 150);
        assert_eq!(p4.seeds.len(), 6);
    }

    #[test]
    fn preset_configs_validate() {
        for f in [Figure::Fig2, Figure::Fig3, Figure::Fig4] {
            for scale in [Scale::Paper, Scale::Desk] {
                let p = ExperimentPreset::new(f, scale);
                for k in 0..p.sweep.len() {
                    p.config_at(k).validate().unwrap();
                }
            }
        }
    }
}
