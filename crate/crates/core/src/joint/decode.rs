use thiserror::Error;

use crate::milp::{MilpModel, Point, VarId};
use crate::scalar::Scalar;
use crate::scenario::Scenario;

use super::{Allocation, VarMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("point has {found} values, model has {expected}")]
    Length { expected: usize, found: usize },
    #[error("variable {var} is not integral ({value})")]
    Fractional { var: usize, value: f64 },
}

/// Decodes with the default integrality tolerance `1e-5`.
pub fn decode<S: Scalar>(s: &Scenario, vm: &VarMap, p: &Point<S>) -> Result<Allocation, DecodeError> {
    decode_with_tol(s, vm, p, 1e-5)
}

/// Thresholds every binary at 0.5; `serve_flags` are rebuilt from the RB
/// assignment rather than read from `y`.
pub fn decode_with_tol<S: Scalar>(
    _s: &Scenario,
    vm: &VarMap,
    p: &Point<S>,
    int_tol: f64,
) -> Result<Allocation, DecodeError> {
    let expected = vm
        .demands
        .iter()
        .flat_map(|d| d.a.iter().chain(d.y.iter()))
        .chain(vm.b.iter())
        .chain(vm.c.iter())
        .chain(vm.u.iter())
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0);
    if p.len() < expected {
        return Err(DecodeError::Length {
            expected,
            found: p.len(),
        });
    }
    let on = |v: VarId| -> Result<bool, DecodeError> {
        let x = p.get(v).to_f64_lossy();
        if (x - x.round()).abs() > int_tol || !(-int_tol..=1.0 + int_tol).contains(&x) {
            return Err(DecodeError::Fractional { var: v.0, value: x });
        }
        Ok(x > 0.5)
    };

    let mut alloc = Allocation::default();
    for l in 0..vm.num_du {
        for t in 0..vm.num_tti {
            if on(vm.c(l, t))? {
                alloc.du_active.insert((l, t));
            }
        }
    }
    for j in 0..vm.num_ru {
        for l in 0..vm.num_du {
            for t in 0..vm.num_tti {
                if on(vm.b(j, l, t))? {
                    alloc.du_assign.insert((j, l, t));
                }
            }
        }
    }
    for i in 0..vm.num_ue {
        for t in 0..vm.num_tti {
            for k in 0..vm.num_classes {
                if on(vm.u(i, t, k))? {
                    alloc.demand_flags.insert((i, t, k));
                }
            }
        }
    }
    for d in &vm.demands {
        let (i, t) = (d.demand.ue, d.demand.tti);
        for j in 0..vm.num_ru {
            for r in 0..vm.num_rb {
                for sl in d.slots() {
                    if on(d.a[(j * vm.num_rb + r) * d.width() + sl - d.first])? {
                        alloc.rb_assign.insert((i, t, j, r, sl));
                    }
                }
            }
            for sl in d.slots() {
                on(d.y[j * d.width() + sl - d.first])?;
            }
        }
    }
    alloc.canonical_serve_flags();
    Ok(alloc)
}

/// Point for `alloc` in the model built from `vm`: decision variables from
/// the allocation (RB assignments outside a window are dropped), every
/// auxiliary at its smallest feasible value.
pub fn encode<S: Scalar>(vm: &VarMap, model: &MilpModel<S>, alloc: &Allocation) -> Point<S> {
    let mut p = Point::zeros(model.num_vars());
    let one = S::one();
    for &(l, t) in &alloc.du_active {
        if l < vm.num_du && t < vm.num_tti {
            p.set(vm.c(l, t), one);
        }
    }
    for &(j, l, t) in &alloc.du_assign {
        if j < vm.num_ru && l < vm.num_du && t < vm.num_tti {
            p.set(vm.b(j, l, t), one);
        }
    }
    for &(i, t, k) in &alloc.demand_flags {
        if i < vm.num_ue && t < vm.num_tti && k < vm.num_classes {
            p.set(vm.u(i, t, k), one);
        }
    }
    for &(i, t, j, r, sl) in &alloc.rb_assign {
        if j < vm.num_ru && r < vm.num_rb {
            if let Some(v) = vm.a(i, t, j, r, sl) {
                p.set(v, one);
            }
        }
    }
    for &(i, t, j, sl) in &alloc.serve_flags {
        if j < vm.num_ru {
            if let Some(v) = vm.y(i, t, j, sl) {
                p.set(v, one);
            }
        }
    }

    let rbs_at = |p: &Point<S>, d: &super::DemandVars, j: usize, sl: usize| -> S {
        (0..vm.num_rb)
            .map(|r| p.get(d.a[(j * vm.num_rb + r) * d.width() + sl - d.first]))
            .fold(S::zero(), |acc, x| acc + x)
    };
    for env in &vm.energy {
        let total = vm
            .demands
            .iter()
            .filter(|d| d.first <= env.slot && env.slot <= d.last)
            .map(|d| rbs_at(&p, d, env.ru, env.slot))
            .fold(S::zero(), |acc, x| acc + x);
        let v = total * p.get(vm.b(env.ru, env.du, env.slot));
        p.set(env.var, v);
    }
    for d in &vm.demands {
        let mut delay = S::zero();
        for j in 0..vm.num_ru {
            for sl in d.slots() {
                if p.get(d.y[j * d.width() + sl - d.first]) > S::lit(0.5) {
                    delay = delay.max(S::lit((sl - d.first) as f64));
                }
            }
        }
        p.set(d.delay, delay);
        for env in &d.prop {
            let gate = p.get(vm.b(env.ru, env.du, env.slot));
            let v = if vm.options.per_du_propagation {
                p.get(d.y[env.ru * d.width() + env.slot - d.first]) * gate
            } else {
                rbs_at(&p, d, env.ru, env.slot) * gate
            };
            p.set(env.var, v);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{build_joint, BuildOptions};
    use crate::scenario::TrafficClass;

    fn tiny() -> Scenario {
        let classes = vec![TrafficClass::new(0, 50, 2.0, 1.0)];
        let mut s = Scenario::blank(1, 1, 2, 2, 1, classes, 350);
        s.demand_bits[0][0][0] = 50;
        s.prop_delay_ms = vec![vec![0.0, 2.0]];
        s.e_static_wh = vec![10.0, 5.0];
        s.e_dynamic_wh = vec![1.0, 1.0];
        s
    }

    #[test]
    fn zero_point_decodes_to_nothing_but_demands() {
        let s = tiny();
        let (m, vm) = build_joint::<f64>(&s, &BuildOptions::default()).unwrap();
        let mut p = Point::zeros(m.num_vars());
        p.set(vm.u(0, 0, 0), 1.0);
        let alloc = decode(&s, &vm, &p).unwrap();
        assert!(alloc.is_empty());
        assert_eq!(alloc.demand_flags.len(), 1);
    }

    #[test]
    fn serve_flags_come_from_rbs() {
        let s = tiny();
        let (m, vm) = build_joint::<f64>(&s, &BuildOptions::default()).unwrap();
        let mut p = Point::zeros(m.num_vars());
        p.set(vm.a(0, 0, 0, 0, 1).unwrap(), 1.0);
        let alloc = decode(&s, &vm, &p).unwrap();
        assert!(alloc.serve_flags.contains(&(0, 0, 0, 1)));
        assert_eq!(vm.y(0, 0, 0, 1).map(|v| p.get(v)), Some(0.0));
    }

    #[test]
    fn fractional_rejected() {
        let s = tiny();
        let (m, vm) = build_joint::<f64>(&s, &BuildOptions::default()).unwrap();
        let mut p = Point::zeros(m.num_vars());
        p.set(vm.c(1, 0), 0.5);
        assert!(matches!(decode(&s, &vm, &p), Err(DecodeError::Fractional { .. })));
    }
}
