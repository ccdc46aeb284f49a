use std::fmt::Display;
use std::fs;
use std::path::Path;

use oran_jopt::baseline::{build_rb_stage, solve_disjoint, BudgetSplit};
use oran_jopt::experiment::{render_svg, run_preset, to_csv, ExperimentPreset, Figure, Mode, Scale};
use oran_jopt::joint::{self, build_joint, solve_joint, Allocation, BuildOptions, SolveOutcome};
use oran_jopt::milp::mps::{export_mps as write_mps, parse_mps};
use oran_jopt::oracle::{enumerate_domain, Caps};
use oran_jopt::scenario::{self, generate as make_scenario, Scenario, ScenarioConfig};
use oran_jopt::solver::{MilpStatus, SolverConfig};

use crate::SolverFlags;

pub const INPUT: i32 = 2;
pub const INFEASIBLE: i32 = 3;
pub const NO_INCUMBENT: i32 = 4;
pub const VERIFY_FAILED: i32 = 5;

#[derive(Debug)]
pub struct Fail {
    pub code: i32,
    pub message: String,
}

fn fail(code: i32, message: impl Display) -> Fail {
    Fail {
        code,
        message: message.to_string(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| fail(INPUT, format!("cannot write {}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Fail> {
    let s = scenario::load(path).map_err(|e| fail(INPUT, e))?;
    let problems = scenario::validate(&s);
    if let Some(first) = problems.first() {
        return Err(fail(
            INPUT,
            format!("{}: {first} ({} problem(s) in total)", path.display(), problems.len()),
        ));
    }
    Ok(s)
}

fn solver_config(base: SolverConfig, flags: &SolverFlags) -> Result<SolverConfig, Fail> {
    let mut cfg = base;
    if let Some(g) = flags.gap {
        cfg.rel_gap = g;
    }
    if let Some(t) = flags.time_limit {
        cfg.time_limit_s = t;
    }
    if flags.max_nodes.is_some() {
        cfg.max_nodes = flags.max_nodes;
    }
    cfg.validate().map_err(|e| fail(INPUT, e))?;
    Ok(cfg)
}

pub fn generate(config: Option<&Path>, seed: u64, out: &Path) -> Result<(), Fail> {
    let cfg = match config {
        None => ScenarioConfig::default(),
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| fail(INPUT, format!("cannot read {}: {e}", path.display())))?;
            let parsed = if path.extension().is_some_and(|e| e == "toml") {
                toml::from_str(&text).map_err(|e| e.to_string())
            } else {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            };
            parsed.map_err(|e| fail(INPUT, format!("{}: {e}", path.display())))?
        }
    };
    cfg.validate().map_err(|e| fail(INPUT, e))?;
    let s = make_scenario(&cfg, seed);
    scenario::save(&s, out).map_err(|e| fail(INPUT, e))?;
    println!("wrote {} ({} demands)", out.display(), s.demands().len());
    Ok(())
}

/// Maps a finished solve to the exit status: an allocation must pass the
/// checker, and no allocation means infeasible or out of budget.
fn outcome_code(out: &SolveOutcome) -> Result<(), Fail> {
    match (&out.allocation, &out.report) {
        (Some(_), Some(r)) if r.feasible => Ok(()),
        (Some(_), Some(r)) => Err(fail(
            VERIFY_FAILED,
            format!("solver allocation failed the checker: {}", r.summary()),
        )),
        (Some(_), None) => Err(fail(VERIFY_FAILED, "solver allocation was not checked")),
        (None, _) if out.status == MilpStatus::Infeasible => Err(fail(INFEASIBLE, "infeasible")),
        (None, _) => Err(fail(
            NO_INCUMBENT,
            format!("no feasible allocation found ({})", out.status.as_str()),
        )),
    }
}

pub fn solve(path: &Path, mode: Mode, flags: &SolverFlags, out: Option<&Path>) -> Result<(), Fail> {
    let s = load_scenario(path)?;
    let cfg = solver_config(SolverConfig::default(), flags)?;
    let opts = BuildOptions::default();
    let split = flags.split.unwrap_or_default();
    let res = match mode {
        Mode::Joint => solve_joint(&s, &cfg, &opts, None),
        Mode::Disjoint => solve_disjoint(&s, &cfg, &split, &opts),
    }
    .map_err(|e| fail(INPUT, e))?;

    let energy = res.energy_wh.map(|e| e.to_string()).unwrap_or_default();
    let per_du = res
        .per_du_wh
        .as_ref()
        .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"))
        .unwrap_or_default();
    let gap = res.rel_gap.map(|g| g.to_string()).unwrap_or_default();
    let row = [
        path.display().to_string(),
        mode.to_string(),
        res.status.as_str().to_string(),
        energy,
        per_du,
        gap,
        res.nodes.to_string(),
        format!("{:.3}", res.wall_seconds),
        res.verified().to_string(),
    ];
    println!(
        "{mode}: {} energy={} Wh nodes={} time={:.3}s",
        res.status.as_str(),
        if row[3].is_empty() { "-" } else { &row[3] },
        res.nodes,
        res.wall_seconds
    );
    let code = outcome_code(&res);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| fail(INPUT, format!("cannot create {}: {e}", dir.display())))?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "scenario",
            "mode",
            "status",
            "energy_wh",
            "per_du_wh",
            "rel_gap",
            "nodes",
            "wall_seconds",
            "verified",
        ];
        w.write_record(header).and_then(|_| w.write_record(&row)).map_err(|e| fail(INPUT, e))?;
        let text = String::from_utf8(w.into_inner().map_err(|e| fail(INPUT, e.error()))?).unwrap_or_default();
        write(&dir.join("result.csv"), &text)?;
        // an allocation the checker rejects is never written
        if let (Ok(()), Some(a)) = (&code, &res.allocation) {
            let json = serde_json::to_string_pretty(a).map_err(|e| fail(INPUT, e))?;
            write(&dir.join("allocation.json"), &json)?;
            write(&dir.join("allocation.txt"), &a.listing())?;
        }
    }
    code
}

pub fn experiment(
    figure: Figure,
    scale: Scale,
    seeds: Option<Vec<u64>>,
    flags: &SolverFlags,
    workers: Option<usize>,
    out: &Path,
) -> Result<(), Fail> {
    let mut p = ExperimentPreset::new(figure, scale);
    if let Some(seeds) = seeds {
        if seeds.is_empty() {
            return Err(fail(INPUT, "--seeds is empty"));
        }
        p.seeds = seeds;
    }
    p.solver = solver_config(p.solver.clone(), flags)?;
    if let Some(split) = flags.split {
        p.split = split;
    }
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    fs::create_dir_all(out).map_err(|e| fail(INPUT, format!("cannot create {}: {e}", out.display())))?;

    let records = run_preset(&p, workers);
    let stem = format!("{figure}_{scale}");
    let table = to_csv(&p, &records).map_err(|e| fail(INPUT, e))?;
    write(&out.join(format!("{stem}.csv")), &table)?;
    write(&out.join(format!("{stem}.svg")), &render_svg(&p, &records))?;
    let mut timing = String::from("seed,sweep,mode,wall_seconds\n");
    for r in &records {
        timing.push_str(&format!("{},{},{},{:.3}\n", r.seed, r.sweep, r.mode, r.wall_seconds));
    }
    write(&out.join(format!("{stem}_timing.csv")), &timing)?;
    println!("wrote {} rows to {}", records.len(), out.join(format!("{stem}.csv")).display());

    let unchecked: Vec<String> = records
        .iter()
        .filter(|r| r.feasible() && !r.verified)
        .map(|r| format!("{} seed {} {}", r.sweep, r.seed, r.mode))
        .collect();
    if !unchecked.is_empty() {
        return Err(fail(
            VERIFY_FAILED,
            format!("allocations failed the checker: {}", unchecked.join(", ")),
        ));
    }
    Ok(())
}

pub fn export_mps(path: &Path, mode: Mode, split: Option<BudgetSplit>, out: &Path) -> Result<(), Fail> {
    let s = load_scenario(path)?;
    let opts = BuildOptions::default();
    let model = match mode {
        Mode::Joint => build_joint::<f64>(&s, &opts).map(|(m, _)| m),
        Mode::Disjoint => build_rb_stage::<f64>(&s, &split.unwrap_or_default(), &opts).map(|(m, _)| m),
    }
    .map_err(|e| fail(INPUT, e))?;
    let text = write_mps(&model).map_err(|e| fail(INPUT, e))?;
    let back = parse_mps::<f64>(&text).map_err(|e| fail(VERIFY_FAILED, format!("written MPS does not parse: {e}")))?;
    if back.num_vars() != model.num_vars() || back.num_constraints() != model.num_constraints() {
        return Err(fail(VERIFY_FAILED, "written MPS does not reproduce the model"));
    }
    write(out, &text)?;
    println!(
        "wrote {} ({} columns, {} rows)",
        out.display(),
        model.num_vars(),
        model.num_constraints()
    );
    Ok(())
}

pub fn verify(path: &Path, allocation: Option<&Path>, oracle: bool) -> Result<(), Fail> {
    let s = load_scenario(path)?;
    let mut checked = None;
    if let Some(apath) = allocation {
        let text = fs::read_to_string(apath).map_err(|e| fail(INPUT, format!("cannot read {}: {e}", apath.display())))?;
        let a: Allocation =
            serde_json::from_str(&text).map_err(|e| fail(INPUT, format!("{}: {e}", apath.display())))?;
        let report = joint::verify(&s, &a);
        if !report.feasible {
            return Err(fail(VERIFY_FAILED, format!("allocation violates: {}", report.summary())));
        }
        println!("feasible, energy {} Wh", report.energy_total_wh);
        checked = Some(report.energy_total_wh);
    }
    if oracle {
        let best = enumerate_domain(&s, &Caps::default(), &BuildOptions::default()).map_err(|e| fail(INPUT, e))?;
        match best.energy_wh() {
            None => println!("oracle: infeasible ({} allocations checked)", best.evaluated),
            Some(e) => {
                println!("oracle: optimum {e} Wh ({} allocations checked)", best.evaluated);
                if let Some(c) = checked {
                    println!("gap to optimum: {} Wh", c - e);
                }
            }
        }
        if best.best.is_none() {
            return Err(fail(INFEASIBLE, "no feasible allocation exists"));
        }
    }
    if allocation.is_none() && !oracle {
        return Err(fail(INPUT, "nothing to do: pass --allocation and/or --oracle"));
    }
    Ok(())
}
