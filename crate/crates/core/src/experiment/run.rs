use std::collections::VecDeque;
use std::sync::Mutex;
use std::thread;

use crate::baseline::solve_disjoint;
use crate::joint::{solve_joint, SolveOutcome};
use crate::scenario::generate;

use super::{ExperimentPreset, ExperimentRecord, Mode};

/// Solves one sweep point for one seed in both modes. The baseline runs
/// first and its allocation, when it checks out, seeds the joint search, so
/// the joint energy never exceeds the baseline's.
pub fn run_point(p: &ExperimentPreset, point: usize, seed: u64) -> [ExperimentRecord; 2] {
    let s = generate(&p.config_at(point), seed);
    let record = |mode: Mode, out: Result<&SolveOutcome, String>| {
        let mut r = ExperimentRecord {
            figure: p.figure,
            seed,
            point,
            sweep: p.sweep[point],
            mode,
            status: "error".to_string(),
            energy_wh: None,
            per_du_wh: None,
            rel_gap: None,
            nodes: 0,
            wall_seconds: 0.0,
            verified: false,
        };
        match out {
            Ok(o) => {
                r.status = o.status.as_str().to_string();
                r.energy_wh = o.energy_wh;
                r.per_du_wh = o.per_du_wh.clone();
                r.rel_gap = o.rel_gap;
                r.nodes = o.nodes;
                r.wall_seconds = o.wall_seconds;
                r.verified = o.verified();
            }
            Err(e) => log::error!("{} point {point} seed {seed} {mode}: {e}", p.figure),
        }
        r
    };

    let disjoint = solve_disjoint(&s, &p.solver, &p.split, &p.build);
    let start = match &disjoint {
        Ok(o) if o.verified() => o.allocation.as_ref(),
        _ => None,
    };
    let joint = solve_joint(&s, &p.solver, &p.build, start);
    [
        record(Mode::Joint, joint.as_ref().map_err(|e| e.to_string())),
        record(Mode::Disjoint, disjoint.as_ref().map_err(|e| e.to_string())),
    ]
}

/// Runs every (sweep point, seed) pair of the preset on `workers` threads.
/// Records come back ordered by sweep point, seed and mode.
pub fn run_preset(p: &ExperimentPreset, workers: usize) -> Vec<ExperimentRecord> {
    let queue: Mutex<VecDeque<(usize, u64)>> = Mutex::new(
        (0..p.sweep.len())
            .flat_map(|k| p.seeds.iter().map(move |&seed| (k, seed)))
            .collect(),
    );
    let done: Mutex<Vec<ExperimentRecord>> = Mutex::new(Vec::new());
    let total = p.sweep.len() * p.seeds.len();
    thread::scope(|scope| {
        for _ in 0..workers.clamp(1, total.max(1)) {
            scope.spawn(|| loop {
                let Some((k, seed)) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                let rows = run_point(p, k, seed);
                log::info!(
                    "{} {} seed {seed}: joint {:?} disjoint {:?}",
                    p.figure,
                    p.sweep[k],
                    rows[0].energy_wh,
                    rows[1].energy_wh
                );
                done.lock().expect("result lock").extend(rows);
            });
        }
    });
    let mut out = done.into_inner().expect("result lock");
    out.sort_by(|a, b| (a.point, a.seed, a.mode).cmp(&(b.point, b.seed, b.mode)));
    out
}
