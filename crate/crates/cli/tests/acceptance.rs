//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines always reach the test log. Exits
//! non-zero when an enforced check fails; the fig2 trend check is reported
//! but not enforced (see the README).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use oran_jopt::baseline::solve_disjoint;
use oran_jopt::experiment::{ExperimentPreset, Figure, Scale, SweepValue};
use oran_jopt::joint::heuristic::greedy_candidates;
use oran_jopt::joint::{build_joint, encode, solve_joint, verify, Allocation, BuildOptions};
use oran_jopt::milp::mps::{export_mps, parse_mps};
use oran_jopt::milp::{linearize_conditional_sum, linearize_max, linearize_product, LinExpr, Sense, VarId};
use oran_jopt::oracle::{enumerate_domain, enumerate_model, Caps};
use oran_jopt::scenario::{self, generate, EnergySpec, Scenario, ScenarioConfig, TrafficClass};
use oran_jopt::solver::{solve_lp, solve_lp_with_bounds, solve_milp, solve_milp_from, LpConfig, LpStatus, SolverConfig};
use oran_jopt::Model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const SOLVER_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-9;
const SIMPLEX_TOL: f64 = 1e-7;
const TINY_INSTANCES: u64 = 50;
const TINY_MODEL_CAP: usize = 200;
const CLI_SOLVES: u64 = 200;
const RANDOM_LPS: u64 = 120;

struct Outcome {
    pass: bool,
    enforced: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        enforced: true,
        detail: detail.into(),
    }
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_oran-jopt")).args(args).output().expect("run oran-jopt")
}

fn tiny_random(seed: u64) -> Scenario {
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

fn far_cheap_du() -> Scenario {
    let classes = vec![TrafficClass::new(0, 50, 2.0, 1.0)];
    let mut s = Scenario::blank(1, 1, 2, 2, 1, classes, 350);
    s.demand_bits[0][0][0] = 50;
    s.prop_delay_ms = vec![vec![0.0, 2.0]];
    s.e_static_wh = vec![10.0, 5.0];
    s.e_dynamic_wh = vec![1.0, 1.0];
    s
}

fn batching() -> Scenario {
    let classes = vec![TrafficClass::new(0, 50, 3.0, 1.0)];
    let mut s = Scenario::blank(1, 1, 1, 2, 2, classes, 350);
    s.demand_bits[0][0][0] = 50;
    s.demand_bits[0][1][0] = 50;
    s.e_static_wh = vec![10.0];
    s.e_dynamic_wh = vec![1.0];
    s
}

/// One CSV row of an experiment table.
#[derive(Debug, Clone)]
struct Row {
    seed: u64,
    sweep: String,
    mode: String,
    energy: Option<f64>,
    per_du: Vec<f64>,
}

fn read_rows(path: &Path) -> Vec<Row> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            Row {
                seed: rec[1].parse().unwrap(),
                sweep: rec[2].to_string(),
                mode: rec[3].to_string(),
                energy: rec[5].parse().ok(),
                per_du: rec[6].split(';').filter_map(|x| x.parse().ok()).collect(),
            }
        })
        .collect()
}

/// Joint and disjoint rows of the same (sweep, seed).
fn pairs(rows: &[Row]) -> Vec<(&Row, &Row)> {
    let mut by: BTreeMap<(String, u64), (Option<&Row>, Option<&Row>)> = BTreeMap::new();
    for r in rows {
        let e = by.entry((r.sweep.clone(), r.seed)).or_default();
        if r.mode == "joint" {
            e.0 = Some(r);
        } else {
            e.1 = Some(r);
        }
    }
    by.into_values().filter_map(|(j, d)| Some((j?, d?))).collect()
}

fn run_experiment(figure: &str, out: &Path) -> Result<(), String> {
    let o = cli(&["experiment", figure, "--scale", "desk", "--seeds", "1,2,3", "--workers", "1", "--out", out.to_str().unwrap()]);
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{figure} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))
    }
}

fn oracle_equivalence() -> (Outcome, Outcome) {
    let started = Instant::now();
    let o = BuildOptions::default();
    let (mut solver_bad, mut model_bad, mut feasible) = (Vec::new(), Vec::new(), 0);
    for seed in 0..TINY_INSTANCES {
        let s = tiny_random(seed);
        let domain = enumerate_domain(&s, &Caps::default(), &o).unwrap().energy_wh();
        let (m, _) = build_joint::<f64>(&s, &o).unwrap();
        let milp = solve_milp(&m, &SolverConfig::exact()).objective;
        let model = enumerate_model(&m, TINY_MODEL_CAP).unwrap().map(|x| x.objective);
        feasible += domain.is_some() as usize;
        let agree = |a: Option<f64>, tol: f64| match (a, domain) {
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            (None, None) => true,
            _ => false,
        };
        if !agree(milp, SOLVER_TOL) {
            solver_bad.push(seed);
        }
        if !agree(model, ORACLE_TOL) {
            model_bad.push(seed);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    (
        check(
            solver_bad.is_empty() && secs < 120.0,
            format!("{TINY_INSTANCES} instances ({feasible} feasible), mismatches {solver_bad:?}, {secs:.1}s"),
        ),
        check(model_bad.is_empty(), format!("{TINY_INSTANCES} instances, mismatches {model_bad:?}")),
    )
}

fn dominance(tables: &[Vec<Row>], fig2: &[Row]) -> (Outcome, Outcome) {
    let (mut compared, mut worse) = (0, Vec::new());
    for rows in tables {
        for (j, d) in pairs(rows) {
            if let Some(de) = d.energy {
                compared += 1;
                match j.energy {
                    Some(je) if je <= de + SOLVER_TOL => {}
                    other => worse.push(format!("{} seed {}: {other:?} vs {de}", j.sweep, j.seed)),
                }
            }
        }
    }
    let cfg = SolverConfig::exact();
    let s = batching();
    let joint = solve_joint(&s, &cfg, &BuildOptions::default(), None).unwrap().energy_wh;
    let base = solve_disjoint(&s, &cfg, &Default::default(), &BuildOptions::default()).unwrap().energy_wh;
    let strict = matches!((joint, base), (Some(a), Some(b)) if a < b);
    let dom = check(
        compared >= 30 && worse.is_empty() && strict,
        format!("{compared} feasible desk pairs, violations {worse:?}; batching instance joint {joint:?} < disjoint {base:?}"),
    );

    // seed-mean gap per multiplier, over seeds where both modes found a plan
    let mut gaps = Vec::new();
    for m in 1..=5 {
        let (mut sj, mut sd, mut n) = (0.0, 0.0, 0);
        for (j, d) in pairs(fig2) {
            if j.sweep == m.to_string() {
                if let (Some(a), Some(b)) = (j.energy, d.energy) {
                    sj += a;
                    sd += b;
                    n += 1;
                }
            }
        }
        if n > 0 {
            gaps.push((m, (sd - sj) / n as f64, n));
        }
    }
    let rising = gaps.windows(2).all(|w| w[1].1 >= w[0].1 - SOLVER_TOL);
    let text: Vec<String> = gaps.iter().map(|(m, g, n)| format!("x{m}: {g:.0} Wh ({n} seeds)")).collect();
    let trend = Outcome {
        pass: rising && gaps.len() >= 2,
        enforced: false,
        detail: format!("fig2 disjoint-minus-joint gap {}", text.join(", ")),
    };
    (dom, trend)
}

fn baseline_infeasibility() -> Outcome {
    let started = Instant::now();
    let p = ExperimentPreset::new(Figure::Fig3, Scale::Desk);
    let s = generate(&SweepValue::Budgets(1.0, 3.0).apply(&p.base), 1);
    let base = solve_disjoint(&s, &p.solver, &p.split, &p.build).unwrap();
    let joint = solve_joint(&s, &p.solver, &p.build, None).unwrap();
    let secs = started.elapsed().as_secs_f64();
    check(
        base.energy_wh.is_none() && base.status.as_str() == "infeasible" && joint.verified() && secs < 60.0,
        format!(
            "disjoint {}, joint {} {:?} Wh, {secs:.1}s",
            base.status.as_str(),
            joint.status.as_str(),
            joint.energy_wh
        ),
    )
}

fn migration(fig3: &[Row]) -> Outcome {
    let mut joint_ok = true;
    let mut kept = Vec::new();
    let mut seen = 0;
    for pair in ["4/12", "5/15"] {
        for (j, d) in pairs(fig3).into_iter().filter(|(j, _)| j.sweep == pair) {
            seen += 1;
            let expensive_idle = j.per_du.len() == 3 && j.per_du[0] == 0.0 && j.per_du[1] == 0.0;
            joint_ok &= expensive_idle;
            if d.per_du.len() == 3 && d.per_du[0] > 0.0 && d.per_du[1] > 0.0 {
                kept.push(format!("{pair} seed {}", d.seed));
            }
        }
    }
    check(
        seen == 6 && joint_ok && !kept.is_empty(),
        format!("joint uses only the cheapest DU: {joint_ok}; disjoint keeps DU0 and DU1 on in {kept:?}"),
    )
}

fn cli_safety(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut codes: BTreeMap<i32, usize> = BTreeMap::new();
    let mut bad = Vec::new();
    for k in 0..CLI_SOLVES {
        let num_tti = rng.gen_range(2..=5);
        let cfg = ScenarioConfig {
            num_ue: rng.gen_range(1..=4),
            num_ru: rng.gen_range(1..=2),
            num_du: rng.gen_range(1..=3),
            num_tti,
            rbs_per_tti: rng.gen_range(1..=3),
            arrival_window_ttis: rng.gen_range(1..=num_tti.min(3)),
            arrival_probability: rng.gen_range(0.2..0.8),
            packet_size_multiplier: rng.gen_range(1..=3),
            classes: vec![
                TrafficClass::new(0, 50, rng.gen_range(1..=3) as f64, 1.0),
                TrafficClass::new(1, 500, rng.gen_range(2..=6) as f64, 3.0),
            ],
            ..Default::default()
        };
        cfg.validate().unwrap();
        let s = generate(&cfg, k);
        let path = dir.join(format!("s{k}.json"));
        scenario::save(&s, &path).unwrap();
        let out = dir.join(format!("o{k}"));
        let mode = if k % 2 == 0 { "joint" } else { "disjoint" };
        let o = cli(&[
            "solve",
            path.to_str().unwrap(),
            "--mode",
            mode,
            "--max-nodes",
            "40",
            "--out",
            out.to_str().unwrap(),
        ]);
        let c = o.status.code().unwrap_or(-1);
        *codes.entry(c).or_default() += 1;
        let alloc = out.join("allocation.json");
        match c {
            0 => {
                let a: Allocation = serde_json::from_str(&fs::read_to_string(&alloc).unwrap()).unwrap();
                let r = verify(&s, &a);
                if !r.feasible {
                    bad.push(format!("solve {k}: {}", r.summary()));
                }
            }
            3 | 4 => {
                if alloc.exists() {
                    bad.push(format!("solve {k}: allocation written with exit {c}"));
                }
            }
            _ => bad.push(format!("solve {k}: exit {c}")),
        }
    }
    check(bad.is_empty(), format!("{CLI_SOLVES} solves, exit codes {codes:?}, problems {bad:?}"))
}

fn aux_minimum(m: &Model, fixed: &[VarId], mask: u32, aux: VarId) -> f64 {
    let mut lo: Vec<f64> = m.variables().iter().map(|v| v.lower).collect();
    let mut hi: Vec<f64> = m.variables().iter().map(|v| v.upper).collect();
    for (k, v) in fixed.iter().enumerate() {
        lo[v.index()] = ((mask >> k) & 1) as f64;
        hi[v.index()] = lo[v.index()];
    }
    let mut mm = m.clone();
    mm.set_objective(LinExpr::term(1.0, aux)).unwrap();
    solve_lp_with_bounds(&mm, &lo, &hi, &LpConfig::default()).point.get(aux)
}

fn linearization() -> Outcome {
    let mut wrong = 0;
    let mut m = Model::new("p");
    let (x, y) = (m.add_binary("x").unwrap(), m.add_binary("y").unwrap());
    let z = linearize_product(&mut m, x, y, "z").unwrap();
    for mask in 0..4u32 {
        wrong += (aux_minimum(&m, &[x, y], mask, z) != (mask == 3) as u8 as f64) as usize;
    }
    let mut m = Model::new("c");
    let mut vars: Vec<VarId> = (0..6).map(|k| m.add_binary(format!("p{k}")).unwrap()).collect();
    let gate = m.add_binary("g").unwrap();
    let h = linearize_conditional_sum(&mut m, &vars, gate, 6.0, "h").unwrap();
    vars.push(gate);
    for mask in 0..128u32 {
        let want = if mask & 64 != 0 { (mask & 63).count_ones() as f64 } else { 0.0 };
        wrong += (aux_minimum(&m, &vars, mask, h) != want) as usize;
    }
    let w = [3.0, 0.0, 2.5, 7.0, 1.0];
    let mut m = Model::new("m");
    let vars: Vec<VarId> = (0..5).map(|k| m.add_binary(format!("v{k}")).unwrap()).collect();
    let cands: Vec<(VarId, f64)> = vars.iter().copied().zip(w).collect();
    let top = linearize_max(&mut m, &cands, "m").unwrap();
    for mask in 0..32u32 {
        let want = (0..5).filter(|k| mask >> k & 1 == 1).map(|k| w[k]).fold(0.0, f64::max);
        wrong += (aux_minimum(&m, &vars, mask, top) != want) as usize;
    }
    check(wrong == 0, format!("4 + 128 + 32 cases, {wrong} wrong"))
}

/// Minimum of `c.x` over the basic solutions of `{lo <= x <= hi, rows}`.
fn vertex_minimum(c: &[f64], lo: &[f64], hi: &[f64], rows: &[(Vec<f64>, Sense, f64)]) -> Option<f64> {
    let n = c.len();
    let mut planes: Vec<(Vec<f64>, f64)> = rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lo[j]));
        planes.push((e, hi[j]));
    }
    let mut best: Option<f64> = None;
    let total = planes.len();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mut a: Vec<Vec<f64>> = pick.iter().map(|&p| planes[p].0.clone()).collect();
        let mut b: Vec<f64> = pick.iter().map(|&p| planes[p].1).collect();
        let mut ok = true;
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            if a[piv][col].abs() < 1e-9 {
                ok = false;
                break;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for k in col..n {
                        a[r][k] -= f * a[col][k];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        if ok {
            let x: Vec<f64> = (0..n).map(|i| b[i] / a[i][i]).collect();
            let dot = |r: &[f64]| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>();
            let feasible = (0..n).all(|j| x[j] >= lo[j] - 1e-9 && x[j] <= hi[j] + 1e-9)
                && rows.iter().all(|(r, s, b)| match s {
                    Sense::Le => dot(r) <= b + 1e-9,
                    Sense::Ge => dot(r) >= b - 1e-9,
                    Sense::Eq => (dot(r) - b).abs() <= 1e-9,
                });
            if feasible {
                let v = dot(c);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
        // next n-combination of the planes
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            if pick[k] < total - n + k {
                break;
            }
        }
        pick[k] += 1;
        for q in k + 1..n {
            pick[q] = pick[q - 1] + 1;
        }
    }
}

fn simplex() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut wrong, mut stalls, mut optimal) = (Vec::new(), 0, 0);
    for k in 0..RANDOM_LPS {
        let n = rng.gen_range(1..=6);
        let rows_n = rng.gen_range(0..=6);
        let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=0) as f64).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(1..=5) as f64).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
        let mut m = Model::new("lp");
        let vars: Vec<VarId> = (0..n).map(|j| m.add_continuous(format!("x{j}"), lo[j], hi[j]).unwrap()).collect();
        let mut rows = Vec::new();
        for i in 0..rows_n {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();
            if a.iter().all(|&x| x == 0.0) {
                continue;
            }
            let sense = [Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..3)];
            let b = rng.gen_range(-6..=8) as f64;
            let mut e = LinExpr::new();
            for (&coef, &v) in a.iter().zip(&vars) {
                if coef != 0.0 {
                    e.add_term(coef, v);
                }
            }
            m.constrain(format!("r{i}"), e, sense, b).unwrap();
            rows.push((a, sense, b));
        }
        let mut obj = LinExpr::new();
        for (&coef, &v) in c.iter().zip(&vars) {
            if coef != 0.0 {
                obj.add_term(coef, v);
            }
        }
        m.set_objective(obj).unwrap();
        let bland = LpConfig {
            bland_after: Some(0),
            ..LpConfig::default()
        };
        for cfg in [LpConfig::default(), bland] {
            let out = solve_lp(&m, &cfg);
            stalls += (out.status == LpStatus::IterationLimit) as usize;
            let agree = match vertex_minimum(&c, &lo, &hi, &rows) {
                Some(v) => out.status == LpStatus::Optimal && (out.objective - v).abs() <= SIMPLEX_TOL,
                None => out.status == LpStatus::Infeasible,
            };
            optimal += (out.status == LpStatus::Optimal) as usize;
            if !agree {
                wrong.push(k);
            }
        }
    }
    check(
        wrong.is_empty() && stalls == 0,
        format!("{RANDOM_LPS} LPs x 2 pricing rules ({optimal} optimal), mismatches {wrong:?}, iteration-limit stops {stalls}"),
    )
}

fn mps_round_trip() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let (m, _) = build_joint::<f64>(&far_cheap_du(), &BuildOptions::default()).unwrap();
    let back: Model = parse_mps(&export_mps(&m).unwrap()).unwrap();
    let a = solve_milp(&m, &SolverConfig::exact()).objective;
    let b = solve_milp(&back, &SolverConfig::exact()).objective;
    ok &= matches!((a, b), (Some(x), Some(y)) if (x - y).abs() <= SOLVER_TOL && (x - 6.0).abs() <= SOLVER_TOL);
    notes.push(format!("tiny {a:?} -> {b:?}"));

    let p = ExperimentPreset::new(Figure::Fig2, Scale::Desk);
    let s = generate(&p.config_at(0), 1);
    let (m, vm) = build_joint::<f64>(&s, &p.build).unwrap();
    let back: Model = parse_mps(&export_mps(&m).unwrap()).unwrap();
    let (_, plan) = greedy_candidates(&s, &p.build).into_iter().next().unwrap();
    let start = encode(&vm, &m, &plan);
    let a = solve_milp_from(&m, &p.solver, Some(&start)).objective;
    let b = solve_milp_from(&back, &p.solver, Some(&start)).objective;
    ok &= matches!((a, b), (Some(x), Some(y)) if (x - y).abs() <= SOLVER_TOL);
    notes.push(format!("fig2 desk x1 seed 1 {a:?} -> {b:?}"));
    check(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let work = TempDir::new().unwrap();
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    let (c1, c2) = oracle_equivalence();
    results.push(("1 oracle equivalence", c1));
    results.push(("2 cross-oracle agreement", c2));

    let first = work.path().join("first");
    let second = work.path().join("second");
    let mut runs = Vec::new();
    for (fig, dir) in [("fig2", &first), ("fig3", &first), ("fig4", &first), ("fig2", &second)] {
        runs.push(run_experiment(fig, dir));
    }
    let ran: Vec<String> = runs.iter().filter_map(|r| r.clone().err()).collect();
    let fig2 = read_rows(&first.join("fig2_desk.csv"));
    let fig3 = read_rows(&first.join("fig3_desk.csv"));
    let fig4 = read_rows(&first.join("fig4_desk.csv"));
    let (dom, trend) = dominance(&[fig2.clone(), fig3.clone(), fig4], &fig2);
    results.push(("3 dominance", dom));
    results.push(("3 fig2 gap trend", trend));
    results.push(("4 baseline infeasibility", baseline_infeasibility()));
    results.push(("5 migration", migration(&fig3)));
    let safety_dir = work.path().join("safety");
    fs::create_dir_all(&safety_dir).unwrap();
    results.push(("6 feasibility safety", cli_safety(&safety_dir)));
    results.push(("7 linearization exactness", linearization()));
    results.push(("8 simplex correctness", simplex()));
    results.push(("9 MPS round-trip", mps_round_trip()));
    let same = fs::read(first.join("fig2_desk.csv")).ok() == fs::read(second.join("fig2_desk.csv")).ok();
    results.push((
        "10 determinism",
        check(
            same && ran.is_empty(),
            format!("fig2 desk CSV identical across runs: {same}; experiment failures {ran:?}"),
        ),
    ));

    let mut failed = 0;
    for (name, o) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.enforced { "" } else { " (reported, not enforced)" };
        println!("criterion {name}: {verdict}{note} - {}", o.detail);
        failed += (!o.pass && o.enforced) as usize;
    }
    if failed > 0 {
        println!("{failed} enforced criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
