use std::collections::HashMap;

use crate::milp::{
    linearize_conditional_sum, linearize_max, linearize_product, LinExpr, MilpModel, Sense, VarId,
};
use crate::scalar::Scalar;
use crate::scenario::{validate, Scenario};

use super::{BuildError, BuildOptions, DemandVars, Envelope, VarMap};

/// Builds the joint energy-minimization model.
///
/// Variables are created in a fixed order (`c`, `b`, `u`, then `y` and `a`
/// per demand, then auxiliaries), so ids are reproducible. `a` and `y`
/// exist only inside each demand's service window.
pub fn build_joint<S: Scalar>(
    s: &Scenario,
    opts: &BuildOptions,
) -> Result<(MilpModel<S>, VarMap), BuildError> {
    let problems = validate(s);
    if !problems.is_empty() {
        return Err(BuildError::Scenario(problems));
    }
    let lit = S::lit;
    let one = S::one();
    let big_m = lit(s.big_m);
    let (ni, nj, nl, nt, nr, nk) = (
        s.num_ue,
        s.num_ru,
        s.num_du,
        s.num_tti,
        s.rbs_per_tti,
        s.num_classes(),
    );
    let mut m = MilpModel::<S>::new("joint");

    let mut c = Vec::with_capacity(nl * nt);
    for l in 0..nl {
        for t in 0..nt {
            c.push(m.add_binary(format!("c_l{l}_t{t}"))?);
        }
    }
    let mut b = Vec::with_capacity(nj * nl * nt);
    for j in 0..nj {
        for l in 0..nl {
            for t in 0..nt {
                b.push(m.add_binary(format!("b_j{j}_l{l}_t{t}"))?);
            }
        }
    }
    let mut u = Vec::with_capacity(ni * nt * nk);
    for i in 0..ni {
        for t in 0..nt {
            for k in 0..nk {
                let bits = s.demand_bits[i][t][k];
                let v = if bits > 0 { one } else { S::zero() };
                let id = m.add_binary(format!("u_i{i}_t{t}_k{k}"))?;
                m.set_bounds(id, v, v)?;
                u.push(id);
            }
        }
    }

    let mut demands = Vec::new();
    let mut by_slot = HashMap::new();
    for d in s.demands() {
        let (i, t) = (d.ue, d.tti);
        let last = s.window_end(t, d.class, opts.window_slack);
        let width = last + 1 - t;
        let mut y = Vec::with_capacity(nj * width);
        for j in 0..nj {
            for sl in t..=last {
                y.push(m.add_binary(format!("y_i{i}_t{t}_j{j}_s{sl}"))?);
            }
        }
        let mut a = Vec::with_capacity(nj * nr * width);
        for j in 0..nj {
            for r in 0..nr {
                for sl in t..=last {
                    a.push(m.add_binary(format!("a_i{i}_t{t}_j{j}_r{r}_s{sl}"))?);
                }
            }
        }
        by_slot.insert((i, t), demands.len());
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

    let mut vm = VarMap {
        num_ue: ni,
        num_ru: nj,
        num_du: nl,
        num_tti: nt,
        num_rb: nr,
        num_classes: nk,
        c,
        b,
        u,
        demands,
        energy: Vec::new(),
        options: *opts,
        by_slot,
    };

    // objective: static energy per active TTI plus dynamic energy per RB
    let mut objective = LinExpr::new();
    for l in 0..nl {
        for t in 0..nt {
            if s.e_static_wh[l] != 0.0 {
                objective.add_term(lit(s.e_static_wh[l]), vm.c(l, t));
            }
        }
    }
    for j in 0..nj {
        for sl in 0..nt {
            let mut parts = Vec::new();
            for d in &vm.demands {
                if sl < d.first || sl > d.last {
                    continue;
                }
                for r in 0..nr {
                    parts.push(d.a[(j * nr + r) * d.width() + sl - d.first]);
                }
            }
            if parts.is_empty() {
                continue;
            }
            for l in 0..nl {
                if s.e_dynamic_wh[l] == 0.0 {
                    continue;
                }
                let cap = lit(parts.len() as f64);
                let h = linearize_conditional_sum(
                    &mut m,
                    &parts,
                    vm.b(j, l, sl),
                    cap,
                    &format!("h_j{j}_l{l}_s{sl}"),
                )?;
                objective.add_term(lit(s.e_dynamic_wh[l]), h);
                vm.energy.push(Envelope {
                    ru: j,
                    du: l,
                    slot: sl,
                    var: h,
                });
            }
        }
    }
    m.set_objective(objective)?;

    // per-demand delay, demand and linking rows
    for di in 0..vm.demands.len() {
        let d = vm.demands[di].clone();
        let (i, t, k) = (d.demand.ue, d.demand.tti, d.demand.class);
        let w = d.width();
        let tag = format!("i{i}_t{t}");
        let y_at = |j: usize, sl: usize| d.y[j * w + sl - d.first];
        let a_at = |j: usize, r: usize, sl: usize| d.a[(j * nr + r) * w + sl - d.first];

        let candidates: Vec<(VarId, S)> = (0..nj)
            .flat_map(|j| d.slots().map(move |sl| (j, sl)))
            .map(|(j, sl)| (y_at(j, sl), lit((sl - t) as f64)))
            .collect();
        let delay = linearize_max(&mut m, &candidates, &format!("delay_{tag}"))?;

        let mut prop = Vec::new();
        let mut row = LinExpr::term(lit(s.tti_ms), delay);
        for j in 0..nj {
            for l in 0..nl {
                let dp = s.prop_delay_ms[j][l];
                if dp <= 0.0 {
                    continue;
                }
                for sl in d.slots() {
                    let name = format!("p_{tag}_j{j}_l{l}_s{sl}");
                    let var = if opts.per_du_propagation {
                        linearize_product(&mut m, y_at(j, sl), vm.b(j, l, sl), &name)?
                    } else {
                        let parts: Vec<VarId> = (0..nr).map(|r| a_at(j, r, sl)).collect();
                        linearize_conditional_sum(&mut m, &parts, vm.b(j, l, sl), lit(nr as f64), &name)?
                    };
                    row.add_term(lit(dp), var);
                    prop.push(Envelope {
                        ru: j,
                        du: l,
                        slot: sl,
                        var,
                    });
                }
            }
        }
        // budget applies to the demanded class only; big-M releases it otherwise
        let budget = s.classes[k].delay_budget_ms;
        row.add_term(big_m - lit(budget), vm.u(i, t, k));
        m.constrain(format!("budget_{tag}_k{k}"), row, Sense::Le, big_m)?;
        vm.demands[di].delay = delay;
        vm.demands[di].prop = prop;

        let mut qos = LinExpr::new();
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
        for kk in 0..nk {
            let bits = s.demand_bits[i][t][kk];
            if bits > 0 {
                qos.add_term(-lit(bits as f64), vm.u(i, t, kk));
                m.constrain(
                    format!("indicator_{tag}_k{kk}"),
                    LinExpr::term(big_m, vm.u(i, t, kk)),
                    Sense::Ge,
                    lit(bits as f64),
                )?;
            }
        }
        m.constrain(format!("qos_{tag}"), qos, Sense::Ge, S::zero())?;
        if nk > 1 {
            m.constrain(
                format!("class_{tag}"),
                LinExpr::sum_of((0..nk).map(|kk| vm.u(i, t, kk))),
                Sense::Le,
                one,
            )?;
        }

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
            }
        }

        if opts.tighten {
            let all_y: Vec<VarId> = d.y.clone();
            m.constrain(format!("cover_{tag}"), LinExpr::sum_of(all_y), Sense::Ge, one)?;
            let mut max_rate = 0;
            for j in 0..nj {
                for r in 0..nr {
                    for sl in d.slots() {
                        max_rate = max_rate.max(s.rate_bits[j][i][r][sl]);
                    }
                }
            }
            if max_rate > 0 {
                let need = d.demand.bits.div_ceil(max_rate);
                m.constrain(
                    format!("rbcount_{tag}"),
                    LinExpr::sum_of(d.a.iter().copied()),
                    Sense::Ge,
                    lit(need as f64),
                )?;
            }
            for sl in d.slots() {
                if opts.one_ru_per_slot {
                    let mut e = LinExpr::sum_of((0..nj).map(|j| y_at(j, sl)));
                    e.extend_scaled(-one, (0..nl).map(|l| vm.c(l, sl)));
                    m.constrain(format!("slotdu_{tag}_s{sl}"), e, Sense::Le, S::zero())?;
                }
                for j in 0..nj {
                    let mut e = LinExpr::sum_of((0..nr).map(|r| a_at(j, r, sl)));
                    e.add_term(-lit(nr as f64), y_at(j, sl));
                    m.constrain(format!("rbs_{tag}_j{j}_s{sl}"), e, Sense::Le, S::zero())?;
                    let mut e = LinExpr::term(one, y_at(j, sl));
                    e.extend_scaled(-one, (0..nl).map(|l| vm.b(j, l, sl)));
                    m.constrain(format!("bound_{tag}_j{j}_s{sl}"), e, Sense::Le, S::zero())?;
                }
            }
        }
    }

    // shared RB, RU and DU rows
    for j in 0..nj {
        for sl in 0..nt {
            let users: Vec<&DemandVars> = vm
                .demands
                .iter()
                .filter(|d| d.first <= sl && sl <= d.last)
                .collect();
            if users.len() > 1 {
                for r in 0..nr {
                    let e = LinExpr::sum_of(
                        users
                            .iter()
                            .map(|d| d.a[(j * nr + r) * d.width() + sl - d.first]),
                    );
                    m.constrain(format!("rb_j{j}_r{r}_s{sl}"), e, Sense::Le, one)?;
                }
            }
            if nl > 1 {
                m.constrain(
                    format!("onedu_j{j}_s{sl}"),
                    LinExpr::sum_of((0..nl).map(|l| vm.b(j, l, sl))),
                    Sense::Le,
                    one,
                )?;
            }
            if !users.is_empty() {
                let mut e = LinExpr::new();
                e.extend_scaled(big_m, (0..nl).map(|l| vm.b(j, l, sl)));
                e.extend_scaled(-one, users.iter().map(|d| d.y[j * d.width() + sl - d.first]));
                m.constrain(format!("bind_j{j}_s{sl}"), e, Sense::Ge, S::zero())?;
            }
            if opts.tighten && !users.is_empty() {
                let mut e = LinExpr::new();
                for d in &users {
                    e.extend_scaled(one, (0..nr).map(|r| d.a[(j * nr + r) * d.width() + sl - d.first]));
                }
                e.extend_scaled(-S::lit(nr as f64), (0..nl).map(|l| vm.b(j, l, sl)));
                m.constrain(format!("load_j{j}_s{sl}"), e, Sense::Le, S::zero())?;
            }
        }
    }
    for l in 0..nl {
        for t in 0..nt {
            let mut e = LinExpr::term(big_m, vm.c(l, t));
            e.extend_scaled(-one, (0..nj).map(|j| vm.b(j, l, t)));
            m.constrain(format!("active_l{l}_t{t}"), e, Sense::Ge, S::zero())?;
            if opts.tighten {
                for j in 0..nj {
                    m.constrain(
                        format!("on_j{j}_l{l}_t{t}"),
                        LinExpr::term(one, vm.b(j, l, t)).with_term(-one, vm.c(l, t)),
                        Sense::Le,
                        S::zero(),
                    )?;
                }
            }
        }
    }
    Ok((m, vm))
}
