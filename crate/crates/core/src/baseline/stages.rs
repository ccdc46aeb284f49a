use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::joint::heuristic::{greedy_plan, nearest_map};
use crate::joint::{verify_with, Allocation, BuildError, BuildOptions, DemandVars, SolveOutcome};
use crate::milp::{linearize_max, LinExpr, MilpModel, Point, Sense, VarId};
use crate::scalar::Scalar;
use crate::scenario::{validate, Scenario};
use crate::solver::{solve_milp_from, MilpOutcome, MilpStatus, SolverConfig};

use super::BudgetSplit;

/// Variables of the RB stage, one entry per demand (no fronthaul terms).
#[derive(Debug, Clone)]
pub struct RbStageMap {
    pub num_ru: usize,
    pub num_rb: usize,
    pub demands: Vec<DemandVars>,
}

/// Variables of the DU stage. `b` exists only for (RU, TTI) cells that
/// carry RBs in the fixed schedule.
#[derive(Debug, Clone)]
pub struct DuStageMap {
    pub num_du: usize,
    pub num_tti: usize,
    pub c: Vec<VarId>,
    pub b: BTreeMap<(usize, usize, usize), VarId>,
}

impl DuStageMap {
    pub fn c(&self, l: usize, t: usize) -> VarId {
        self.c[l * self.num_tti + t]
    }
}

/// The scenario as the RB stage sees it: class budgets cut to their
/// scheduling share (floored at zero) and no fronthaul delay.
fn schedule_view(s: &Scenario, split: &BudgetSplit) -> Scenario {
    let mut v = s.clone();
    for k in 0..v.classes.len() {
        v.classes[k].delay_budget_ms = split.sched_ms(s, k).max(0.0);
    }
    for row in &mut v.prop_delay_ms {
        row.iter_mut().for_each(|d| *d = 0.0);
    }
    v
}

/// Energy-blind RB allocation minimizing the total scheduling delay.
///
/// Windows follow the scheduling budget. A demanded class with a negative
/// scheduling budget makes the model infeasible through its delay row.
pub fn build_rb_stage<S: Scalar>(
    s: &Scenario,
    split: &BudgetSplit,
    opts: &BuildOptions,
) -> Result<(MilpModel<S>, RbStageMap), BuildError> {
    let problems = validate(s);
    if !problems.is_empty() {
        return Err(BuildError::Scenario(problems));
    }
    let view = schedule_view(s, split);
    let lit = S::lit;
    let one = S::one();
    let big_m = lit(s.big_m);
    let (nj, nr) = (s.num_ru, s.rbs_per_tti);
    let mut m = MilpModel::<S>::new("rb_stage");

    let mut u = BTreeMap::new();
    for d in s.demands() {
        let id = m.add_binary(format!("u_i{}_t{}_k{}", d.ue, d.tti, d.class))?;
        m.set_bounds(id, one, one)?;
        u.insert((d.ue, d.tti), id);
    }
    let mut demands = Vec::new();
    for d in s.demands() {
        let (i, t) = (d.ue, d.tti);
        let last = view.window_end(t, d.class, opts.window_slack);
        let mut y = Vec::new();
        for j in 0..nj {
            for sl in t..=last {
                y.push(m.add_binary(format!("y_i{i}_t{t}_j{j}_s{sl}"))?);
            }
        }
        let mut a = Vec::new();
        for j in 0..nj {
            for r in 0..nr {
                for sl in t..=last {
                    a.push(m.add_binary(format!("a_i{i}_t{t}_j{j}_r{r}_s{sl}"))?);
                }
            }
        }
        demands.push(DemandVars {
            demand: d,
            first: t,
            last,
            y,
            a,
            delay: VarId(usize::MAX),
            prop: Vec::new(),
        });
    }

    let mut objective = LinExpr::new();
    for d in &demands {
        let w = d.width();
        for j in 0..nj {
            for sl in d.slots() {
                if sl > d.first {
                    objective.add_term(lit((sl - d.first) as f64), d.y[j * w + sl - d.first]);
                }
            }
        }
    }
    m.set_objective(objective)?;

    for d in &mut demands {
        let (i, t, k) = (d.demand.ue, d.demand.tti, d.demand.class);
        let w = d.width();
        let tag = format!("i{i}_t{t}");
        let y_at = |j: usize, sl: usize| d.y[j * w + sl - d.first];
        let a_at = |j: usize, r: usize, sl: usize| d.a[(j * nr + r) * w + sl - d.first];
        let uk = u[&(i, t)];

        let candidates: Vec<(VarId, S)> = (0..nj)
            .flat_map(|j| d.slots().map(move |sl| (j, sl)))
            .map(|(j, sl)| (y_at(j, sl), lit((sl - t) as f64)))
            .collect();
        let delay = linearize_max(&mut m, &candidates, &format!("delay_{tag}"))?;
        let budget = split.sched_ms(s, k);
        let mut row = LinExpr::term(lit(s.tti_ms), delay);
        row.add_term(big_m - lit(budget), uk);
        m.constrain(format!("sched_{tag}_k{k}"), row, Sense::Le, big_m)?;

        let mut qos = LinExpr::term(-lit(d.demand.bits as f64), uk);
        for j in 0..nj {
            for r in 0..nr {
                for sl in d.slots() {
                    let rate = s.rate_bits[j][i][r][sl];
                    if rate > 0 {
                        qos.add_term(lit(rate as f64), a_at(j, r, sl));
                    }
                }
            }
        }
        m.constrain(format!("qos_{tag}"), qos, Sense::Ge, S::zero())?;
        m.constrain(
            format!("indicator_{tag}_k{k}"),
            LinExpr::term(big_m, uk),
            Sense::Ge,
            lit(d.demand.bits as f64),
        )?;

        for sl in d.slots() {
            if nj > 1 {
                for r in 0..nr {
                    m.constrain(
                        format!("rbru_{tag}_r{r}_s{sl}"),
                        LinExpr::sum_of((0..nj).map(|j| a_at(j, r, sl))),
                        Sense::Le,
                        one,
                    )?;
                }
                if opts.one_ru_per_slot {
                    m.constrain(
                        format!("slotru_{tag}_s{sl}"),
                        LinExpr::sum_of((0..nj).map(|j| y_at(j, sl))),
                        Sense::Le,
                        one,
                    )?;
                }
            }
            for j in 0..nj {
                let mut link = LinExpr::term(big_m, y_at(j, sl));
                link.extend_scaled(-one, (0..nr).map(|r| a_at(j, r, sl)));
                m.constrain(format!("serve_{tag}_j{j}_s{sl}"), link, Sense::Ge, S::zero())?;
                if opts.tighten {
                    let mut e = LinExpr::sum_of((0..nr).map(|r| a_at(j, r, sl)));
                    e.add_term(-lit(nr as f64), y_at(j, sl));
                    m.constrain(format!("rbs_{tag}_j{j}_s{sl}"), e, Sense::Le, S::zero())?;
                }
            }
        }
        if opts.tighten {
            m.constrain(format!("cover_{tag}"), LinExpr::sum_of(d.y.iter().copied()), Sense::Ge, one)?;
        }
        d.delay = delay;
    }

    for j in 0..nj {
        for sl in 0..s.num_tti {
            let users: Vec<&DemandVars> = demands.iter().filter(|d| d.first <= sl && sl <= d.last).collect();
            if users.len() < 2 {
                continue;
            }
            for r in 0..nr {
                let e = LinExpr::sum_of(users.iter().map(|d| d.a[(j * nr + r) * d.width() + sl - d.first]));
                m.constrain(format!("rb_j{j}_r{r}_s{sl}"), e, Sense::Le, one)?;
            }
        }
    }
    Ok((
        m,
        RbStageMap {
            num_ru: nj,
            num_rb: nr,
            demands,
        },
    ))
}

/// RB decisions of an RB-stage point, thresholded at 0.5.
pub fn decode_rb_stage<S: Scalar>(map: &RbStageMap, p: &Point<S>) -> Allocation {
    let mut alloc = Allocation::default();
    let half = S::lit(0.5);
    for d in &map.demands {
        let (i, t) = (d.demand.ue, d.demand.tti);
        alloc.demand_flags.insert((i, t, d.demand.class));
        for j in 0..map.num_ru {
            for r in 0..map.num_rb {
                for sl in d.slots() {
                    if p.get(d.a[(j * map.num_rb + r) * d.width() + sl - d.first]) > half {
                        alloc.rb_assign.insert((i, t, j, r, sl));
                    }
                }
            }
        }
    }
    alloc.canonical_serve_flags();
    alloc
}

fn encode_rb_stage<S: Scalar>(map: &RbStageMap, model: &MilpModel<S>, alloc: &Allocation) -> Point<S> {
    let mut p = Point::zeros(model.num_vars());
    for (id, v) in model.variables().iter().enumerate() {
        if v.lower == v.upper {
            p.set(VarId(id), v.lower);
        }
    }
    for d in &map.demands {
        let (i, t) = (d.demand.ue, d.demand.tti);
        let w = d.width();
        let mut delay = 0;
        for &(ai, at, j, r, sl) in alloc.rb_assign.range((i, t, 0, 0, 0)..=(i, t, usize::MAX, usize::MAX, usize::MAX)) {
            debug_assert_eq!((ai, at), (i, t));
            if sl < d.first || sl > d.last {
                continue;
            }
            p.set(d.a[(j * map.num_rb + r) * w + sl - d.first], S::one());
            p.set(d.y[j * w + sl - d.first], S::one());
            delay = delay.max(sl - d.first);
        }
        p.set(d.delay, S::lit(delay as f64));
    }
    p
}

/// DU selection for a fixed RB allocation.
///
/// Each demand's fronthaul delay is held to the DU-stage share of its
/// budget, or to what its realized schedule left over with
/// `residual_slack`.
pub fn build_du_stage<S: Scalar>(
    s: &Scenario,
    rb_alloc: &Allocation,
    split: &BudgetSplit,
    opts: &BuildOptions,
) -> Result<(MilpModel<S>, DuStageMap), BuildError> {
    let problems = validate(s);
    if !problems.is_empty() {
        return Err(BuildError::Scenario(problems));
    }
    let lit = S::lit;
    let one = S::one();
    let big_m = lit(s.big_m);
    let (nl, nt) = (s.num_du, s.num_tti);
    let mut m = MilpModel::<S>::new("du_stage");

    // RBs per (ru, tti) and per (demand, ru, tti)
    let mut cell_load: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut demand_load: BTreeMap<(usize, usize), BTreeMap<(usize, usize), usize>> = BTreeMap::new();
    for &(i, t, j, _, sl) in &rb_alloc.rb_assign {
        *cell_load.entry((j, sl)).or_default() += 1;
        *demand_load.entry((i, t)).or_default().entry((j, sl)).or_default() += 1;
    }

    let mut c = Vec::with_capacity(nl * nt);
    for l in 0..nl {
        for t in 0..nt {
            c.push(m.add_binary(format!("c_l{l}_t{t}"))?);
        }
    }
    let mut b = BTreeMap::new();
    for &(j, sl) in cell_load.keys() {
        for l in 0..nl {
            b.insert((j, l, sl), m.add_binary(format!("b_j{j}_l{l}_t{sl}"))?);
        }
    }
    let map = DuStageMap {
        num_du: nl,
        num_tti: nt,
        c,
        b,
    };

    let mut objective = LinExpr::new();
    for l in 0..nl {
        for t in 0..nt {
            if s.e_static_wh[l] != 0.0 {
                objective.add_term(lit(s.e_static_wh[l]), map.c(l, t));
            }
        }
    }
    for (&(j, l, sl), &v) in &map.b {
        let n = cell_load[&(j, sl)];
        if s.e_dynamic_wh[l] != 0.0 {
            objective.add_term(lit(s.e_dynamic_wh[l] * n as f64), v);
        }
    }
    m.set_objective(objective)?;

    for &(j, sl) in cell_load.keys() {
        let all = LinExpr::sum_of((0..nl).map(|l| map.b[&(j, l, sl)]));
        if nl > 1 {
            m.constrain(format!("onedu_j{j}_s{sl}"), all.clone(), Sense::Le, one)?;
        }
        m.constrain(format!("bind_j{j}_s{sl}"), all, Sense::Ge, one)?;
    }
    for l in 0..nl {
        for t in 0..nt {
            let bound: Vec<(usize, VarId)> = map
                .b
                .iter()
                .filter(|(key, _)| key.1 == l && key.2 == t)
                .map(|(key, &v)| (key.0, v))
                .collect();
            if bound.is_empty() {
                continue;
            }
            let mut e = LinExpr::term(big_m, map.c(l, t));
            e.extend_scaled(-one, bound.iter().map(|&(_, v)| v));
            m.constrain(format!("active_l{l}_t{t}"), e, Sense::Ge, S::zero())?;
            if opts.tighten {
                for &(j, v) in &bound {
                    m.constrain(
                        format!("on_j{j}_l{l}_t{t}"),
                        LinExpr::term(one, v).with_term(-one, map.c(l, t)),
                        Sense::Le,
                        S::zero(),
                    )?;
                }
            }
        }
    }

    for d in s.demands() {
        let (i, t, k) = (d.ue, d.tti, d.class);
        let cells = demand_load.get(&(i, t)).cloned().unwrap_or_default();
        let budget = if split.residual_slack {
            let last = cells.keys().map(|&(_, sl)| sl).max().unwrap_or(t);
            s.classes[k].delay_budget_ms - (last - t) as f64 * s.tti_ms
        } else {
            split.prop_ms(s, k)
        };
        let mut row = LinExpr::new();
        for (&(j, sl), &n) in &cells {
            for l in 0..nl {
                let dp = s.prop_delay_ms[j][l];
                if dp > 0.0 {
                    let weight = if opts.per_du_propagation { dp } else { dp * n as f64 };
                    row.add_term(lit(weight), map.b[&(j, l, sl)]);
                }
            }
        }
        if row.terms.is_empty() && budget >= 0.0 {
            continue;
        }
        m.constrain(format!("fronthaul_i{i}_t{t}"), row, Sense::Le, lit(budget))?;
    }
    Ok((m, map))
}

/// DU decisions of a DU-stage point, merged into a copy of `rb_alloc`.
pub fn decode_du_stage<S: Scalar>(map: &DuStageMap, p: &Point<S>, rb_alloc: &Allocation) -> Allocation {
    let half = S::lit(0.5);
    let mut alloc = rb_alloc.clone();
    for (&(j, l, sl), &v) in &map.b {
        if p.get(v) > half {
            alloc.du_assign.insert((j, l, sl));
        }
    }
    for l in 0..map.num_du {
        for t in 0..map.num_tti {
            if p.get(map.c(l, t)) > half {
                alloc.du_active.insert((l, t));
            }
        }
    }
    alloc
}

/// Start for the DU stage: every loaded cell bound to its RU's nearest DU.
fn nearest_du_start<S: Scalar>(s: &Scenario, map: &DuStageMap, model: &MilpModel<S>) -> Point<S> {
    let near = nearest_map(s);
    let mut p = Point::zeros(model.num_vars());
    let cells: BTreeSet<(usize, usize)> = map.b.keys().map(|&(j, _, sl)| (j, sl)).collect();
    for (j, sl) in cells {
        p.set(map.b[&(j, near[j], sl)], S::one());
        p.set(map.c(near[j], sl), S::one());
    }
    p
}

fn has_incumbent<S>(out: &MilpOutcome<S>) -> bool {
    out.incumbent.is_some()
}

/// Runs the RB stage, then the DU stage on its schedule, and checks the
/// combined allocation against the joint rules.
pub fn solve_disjoint(
    s: &Scenario,
    cfg: &SolverConfig,
    split: &BudgetSplit,
    opts: &BuildOptions,
) -> Result<SolveOutcome, BuildError> {
    let started = Instant::now();
    let (m1, map1) = build_rb_stage::<f64>(s, split, opts)?;
    let schedulable = s.demands().iter().all(|d| split.sched_ms(s, d.class) >= 0.0);
    let start1 = if schedulable {
        let view = schedule_view(s, split);
        greedy_plan(&view, &nearest_map(&view), u64::MAX, false, opts).map(|a| encode_rb_stage(&map1, &m1, &a))
    } else {
        None
    };
    let out1 = solve_milp_from(&m1, cfg, start1.as_ref());
    if !has_incumbent(&out1) {
        let status = match out1.status {
            MilpStatus::Optimal | MilpStatus::GapReached => MilpStatus::Infeasible,
            other => other,
        };
        let mut o = SolveOutcome::infeasible(out1.nodes, started.elapsed().as_secs_f64());
        o.status = status;
        o.dual_bound = if status == MilpStatus::Infeasible { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(o);
    }
    let rb_alloc = decode_rb_stage(&map1, out1.incumbent.as_ref().expect("incumbent"));

    let (m2, map2) = build_du_stage::<f64>(s, &rb_alloc, split, opts)?;
    let start2 = nearest_du_start(s, &map2, &m2);
    let stage2_cfg = SolverConfig {
        time_limit_s: (cfg.time_limit_s - started.elapsed().as_secs_f64()).max(0.0),
        ..cfg.clone()
    };
    let out2 = solve_milp_from(&m2, &stage2_cfg, Some(&start2));
    let nodes = out1.nodes + out2.nodes;
    let Some(p2) = out2.incumbent.as_ref() else {
        let mut o = SolveOutcome::infeasible(nodes, started.elapsed().as_secs_f64());
        o.status = out2.status;
        if out2.status != MilpStatus::Infeasible {
            o.dual_bound = f64::NEG_INFINITY;
        }
        return Ok(o);
    };
    let alloc = decode_du_stage(&map2, p2, &rb_alloc);
    let report = verify_with(s, &alloc, opts);
    let status = if out1.status == MilpStatus::Optimal {
        out2.status
    } else {
        out1.status
    };
    Ok(SolveOutcome {
        status,
        energy_wh: Some(report.energy_total_wh),
        per_du_wh: Some(report.energy_per_du_wh.clone()),
        allocation: Some(alloc),
        dual_bound: out2.dual_bound,
        rel_gap: out2.rel_gap,
        nodes,
        wall_seconds: started.elapsed().as_secs_f64(),
        report: Some(report),
    })
}
