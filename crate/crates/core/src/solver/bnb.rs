use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::milp::{evaluate, MilpModel, Point};
use crate::scalar::Scalar;

use super::simplex::{solve_lp_from, solve_lp_with_bounds, Basis, LpConfig, LpOutcome, LpStatus};
use super::{NodeOrder, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    GapReached,
    TimeLimit,
    NodeLimit,
    Infeasible,
    /// Some node LP could not be solved (iteration limit or unbounded).
    NumericalFailure,
}

impl MilpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MilpStatus::Optimal => "optimal",
            MilpStatus::GapReached => "gap_reached",
            MilpStatus::TimeLimit => "time_limit",
            MilpStatus::NodeLimit => "node_limit",
            MilpStatus::Infeasible => "infeasible",
            MilpStatus::NumericalFailure => "numerical_failure",
        }
    }
}

/// Snapshot taken whenever the incumbent or the global bound moves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEvent {
    pub node: usize,
    pub dual_bound: f64,
    pub incumbent: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MilpOutcome<S> {
    pub status: MilpStatus,
    pub incumbent: Option<Point<S>>,
    pub objective: Option<f64>,
    pub dual_bound: f64,
    pub rel_gap: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_seconds: f64,
    pub trace: Vec<BoundEvent>,
}

impl<S> MilpOutcome<S> {
    pub fn has_incumbent(&self) -> bool {
        self.objective.is_some()
    }
}

#[derive(Debug)]
struct Node {
    bound: f64,
    seq: u64,
    fixes: Vec<(usize, bool)>,
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: the smallest bound, then the oldest node, is the greatest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(other.seq.cmp(&self.seq))
    }
}

enum Pool {
    Best(BinaryHeap<Node>),
    Depth(Vec<Node>),
}

impl Pool {
    fn push(&mut self, n: Node) {
        match self {
            Pool::Best(h) => h.push(n),
            Pool::Depth(v) => v.push(n),
        }
    }
    fn pop(&mut self) -> Option<Node> {
        match self {
            Pool::Best(h) => h.pop(),
            Pool::Depth(v) => v.pop(),
        }
    }
    fn min_bound(&self) -> Option<f64> {
        match self {
            Pool::Best(h) => h.peek().map(|n| n.bound),
            Pool::Depth(v) => v.iter().map(|n| n.bound).min_by(f64::total_cmp),
        }
    }
    fn is_empty(&self) -> bool {
        match self {
            Pool::Best(h) => h.is_empty(),
            Pool::Depth(v) => v.is_empty(),
        }
    }
}

fn gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1e-9)).max(0.0)
}

/// Branch-and-bound over binaries with LP relaxations from the simplex.
///
/// The search path depends only on `(model, cfg)`; the clock is consulted
/// solely for the time limit, between nodes.
pub fn solve_milp<S: Scalar>(model: &MilpModel<S>, cfg: &SolverConfig) -> MilpOutcome<S> {
    solve_milp_from(model, cfg, None)
}

/// [`solve_milp`] seeded with a known solution. A start that fails
/// `evaluate` is ignored.
pub fn solve_milp_from<S: Scalar>(
    model: &MilpModel<S>,
    cfg: &SolverConfig,
    start: Option<&Point<S>>,
) -> MilpOutcome<S> {
    let started = Instant::now();
    let lp_cfg = LpConfig {
        feas_tol: cfg.feas_tol.min(S::FEAS_TOL.max(cfg.feas_tol)),
        ..LpConfig::for_scalar::<S>()
    };
    let feas_tol = S::lit(cfg.feas_tol.max(S::FEAS_TOL));
    let root_lo: Vec<S> = model.variables().iter().map(|v| v.lower).collect();
    let root_up: Vec<S> = model.variables().iter().map(|v| v.upper).collect();
    let binaries: Vec<usize> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_binary())
        .map(|(j, _)| j)
        .collect();

    let mut pool = match cfg.node_order {
        NodeOrder::BestBound => Pool::Best(BinaryHeap::new()),
        NodeOrder::DepthFirst => Pool::Depth(Vec::new()),
    };
    let mut seq = 0u64;
    pool.push(Node {
        bound: f64::NEG_INFINITY,
        seq,
        fixes: Vec::new(),
        basis: None,
    });

    let mut incumbent: Option<(Point<S>, f64)> = None;
    if let Some(p) = start {
        let report = evaluate(model, p, feas_tol);
        if report.feasible {
            incumbent = Some((p.clone(), report.objective));
        } else {
            log::warn!("start point rejected: {} violated rows", report.violations.len());
        }
    }
    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut dual_bound = f64::NEG_INFINITY;
    // lowest bound among nodes discarded only because of the gap tolerance
    let mut pruned_floor = f64::INFINITY;
    let mut failed_nodes = 0usize;
    let mut trace = Vec::new();
    let mut lo = root_lo.clone();
    let mut up = root_up.clone();

    let status = loop {
        let open = pool.min_bound().unwrap_or(f64::INFINITY);
        let inc_obj = incumbent.as_ref().map(|(_, o)| *o);
        let mut global = open.min(pruned_floor);
        if let Some(o) = inc_obj {
            global = global.min(o);
        }
        if global > dual_bound {
            dual_bound = global;
            trace.push(BoundEvent {
                node: nodes,
                dual_bound,
                incumbent: inc_obj,
            });
        }
        if pool.is_empty() {
            break match inc_obj {
                None if failed_nodes > 0 => MilpStatus::NumericalFailure,
                None => MilpStatus::Infeasible,
                Some(o) if pruned_floor < o && gap(o, pruned_floor) > 1e-12 => {
                    MilpStatus::GapReached
                }
                Some(_) if failed_nodes > 0 => MilpStatus::GapReached,
                Some(_) => MilpStatus::Optimal,
            };
        }
        if let Some(o) = inc_obj {
            if gap(o, dual_bound) <= cfg.rel_gap {
                break if gap(o, dual_bound) <= 1e-12 && failed_nodes == 0 {
                    MilpStatus::Optimal
                } else {
                    MilpStatus::GapReached
                };
            }
        }
        if started.elapsed().as_secs_f64() >= cfg.time_limit_s {
            break MilpStatus::TimeLimit;
        }
        if cfg.max_nodes.is_some_and(|cap| nodes >= cap) {
            break MilpStatus::NodeLimit;
        }

        let node = pool.pop().expect("pool not empty");
        if let Some(o) = inc_obj {
            if node.bound >= o - 1e-9 * o.abs().max(1.0) {
                continue;
            }
            if gap(o, node.bound) <= cfg.rel_gap {
                pruned_floor = pruned_floor.min(node.bound);
                continue;
            }
        }
        nodes += 1;
        lo.copy_from_slice(&root_lo);
        up.copy_from_slice(&root_up);
        for &(j, v) in &node.fixes {
            let val = if v { S::one() } else { S::zero() };
            lo[j] = val;
            up[j] = val;
        }
        let lp = solve_lp_from(model, &lo, &up, &lp_cfg, node.basis.as_deref());
        lp_iterations += lp.iterations;
        match lp.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded | LpStatus::IterationLimit => {
                log::warn!("node {nodes}: LP ended with {:?}; node dropped", lp.status);
                failed_nodes += 1;
                continue;
            }
        }
        let bound = lp.objective.max(node.bound);
        if let Some(o) = inc_obj {
            if bound >= o - 1e-9 * o.abs().max(1.0) {
                continue;
            }
            if gap(o, bound) <= cfg.rel_gap {
                pruned_floor = pruned_floor.min(bound);
                continue;
            }
        }

        let int_tol = S::lit(cfg.int_tol);
        let branch_var = pick_fractional(&lp.point, &binaries, int_tol, true);

        if branch_var.is_some() && nodes == 1 && inc_obj.is_none() {
            let cutoff = inc_obj.unwrap_or(f64::INFINITY);
            let (found, iters) = dive(model, &lo, &up, &lp, &binaries, int_tol, cutoff, feas_tol, &lp_cfg);
            lp_iterations += iters;
            if let Some((pt, obj)) = found {
                if obj < cutoff {
                    log::debug!("node {nodes}: dive found {obj}");
                    incumbent = Some((pt, obj));
                    trace.push(BoundEvent {
                        node: nodes,
                        dual_bound,
                        incumbent: Some(obj),
                    });
                    if gap(obj, bound) <= cfg.rel_gap {
                        pruned_floor = pruned_floor.min(bound);
                        continue;
                    }
                }
            }
        }

        match branch_var {
            None => {
                if let Some((pt, obj)) = accept(model, &lp.point, &binaries, feas_tol, &lp_cfg) {
                    if inc_obj.map_or(true, |o| obj < o) {
                        incumbent = Some((pt, obj));
                        trace.push(BoundEvent {
                            node: nodes,
                            dual_bound,
                            incumbent: Some(obj),
                        });
                    }
                } else {
                    log::warn!("node {nodes}: integral LP point failed verification");
                    failed_nodes += 1;
                }
            }
            Some(j) => {
                let basis = lp.basis.map(Rc::new);
                let mut down = node.fixes.clone();
                down.push((j, false));
                let mut upf = node.fixes;
                upf.push((j, true));
                seq += 1;
                pool.push(Node {
                    bound,
                    seq,
                    fixes: down,
                    basis: basis.clone(),
                });
                seq += 1;
                pool.push(Node {
                    bound,
                    seq,
                    fixes: upf,
                    basis,
                });
            }
        }
    };

    let (point, objective) = match incumbent {
        Some((p, o)) => (Some(p), Some(o)),
        None => (None, None),
    };
    if status == MilpStatus::Optimal {
        if let Some(o) = objective {
            dual_bound = o;
        }
    }
    if status == MilpStatus::Infeasible {
        dual_bound = f64::INFINITY;
    }
    MilpOutcome {
        status,
        rel_gap: objective.map(|o| gap(o, dual_bound)),
        incumbent: point,
        objective,
        dual_bound,
        nodes,
        lp_iterations,
        wall_seconds: started.elapsed().as_secs_f64(),
        trace,
    }
}

/// Binary to branch or dive on: the most fractional one when `most` is set,
/// otherwise the least fractional one. Ties go to the lowest index.
fn pick_fractional<S: Scalar>(p: &Point<S>, binaries: &[usize], int_tol: S, most: bool) -> Option<usize> {
    let half = S::lit(0.5);
    let mut pick = None;
    let mut best = S::infinity();
    for &j in binaries {
        let v = p.values[j];
        let frac = v - v.floor();
        if frac > int_tol && frac < S::one() - int_tol {
            let dist = (frac - half).abs();
            let key = if most { dist } else { -dist };
            if key < best {
                best = key;
                pick = Some(j);
            }
        }
    }
    pick
}

/// Fractional diving from a node LP: repeatedly rounds the least fractional
/// binary, backtracking once per step when the rounding is infeasible.
#[allow(clippy::too_many_arguments)]
fn dive<S: Scalar>(
    model: &MilpModel<S>,
    lo: &[S],
    up: &[S],
    start: &LpOutcome<S>,
    binaries: &[usize],
    int_tol: S,
    cutoff: f64,
    feas_tol: S,
    lp_cfg: &LpConfig,
) -> (Option<(Point<S>, f64)>, usize) {
    let mut lo = lo.to_vec();
    let mut up = up.to_vec();
    let mut point = start.point.clone();
    let mut basis = start.basis.clone();
    let mut iterations = 0;
    loop {
        let Some(j) = pick_fractional(&point, binaries, int_tol, false) else {
            return (accept(model, &point, binaries, feas_tol, lp_cfg), iterations);
        };
        let first = point.values[j].round();
        let mut solved = None;
        for val in [first, S::one() - first] {
            lo[j] = val;
            up[j] = val;
            let lp = solve_lp_from(model, &lo, &up, lp_cfg, basis.as_ref());
            iterations += lp.iterations;
            if lp.status == LpStatus::Optimal && lp.objective < cutoff - 1e-9 * cutoff.abs().max(1.0) {
                solved = Some(lp);
                break;
            }
        }
        match solved {
            Some(lp) => {
                point = lp.point;
                basis = lp.basis;
            }
            None => {
                log::debug!("dive stuck at var {j} after {iterations} iterations");
                return (None, iterations);
            }
        }
    }
}

/// Snaps binaries of an integral LP point and checks it against the model,
/// re-solving the continuous part with binaries fixed if snapping broke a row.
fn accept<S: Scalar>(
    model: &MilpModel<S>,
    lp_point: &Point<S>,
    binaries: &[usize],
    feas_tol: S,
    lp_cfg: &LpConfig,
) -> Option<(Point<S>, f64)> {
    let mut pt = lp_point.clone();
    for &j in binaries {
        pt.values[j] = pt.values[j].round();
    }
    let report = evaluate(model, &pt, feas_tol);
    if report.feasible {
        return Some((pt, report.objective));
    }
    let mut lo: Vec<S> = model.variables().iter().map(|v| v.lower).collect();
    let mut up: Vec<S> = model.variables().iter().map(|v| v.upper).collect();
    for &j in binaries {
        lo[j] = pt.values[j];
        up[j] = pt.values[j];
    }
    let lp = solve_lp_with_bounds(model, &lo, &up, lp_cfg);
    if lp.status != LpStatus::Optimal {
        return None;
    }
    let report = evaluate(model, &lp.point, feas_tol);
    report.feasible.then(|| (lp.point, report.objective))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinExpr, Sense};

    fn knapsack() -> MilpModel<f64> {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5  (as min of the negation)
        let mut m = MilpModel::new("ks");
        let a = m.add_binary("a").unwrap();
        let b = m.add_binary("b").unwrap();
        let c = m.add_binary("c").unwrap();
        m.constrain(
            "w",
            LinExpr::term(2.0, a).with_term(3.0, b).with_term(1.0, c),
            Sense::Le,
            5.0,
        )
        .unwrap();
        m.set_objective(LinExpr::term(-5.0, a).with_term(-4.0, b).with_term(-3.0, c))
            .unwrap();
        m
    }

    #[test]
    fn knapsack_optimum() {
        let out = solve_milp(&knapsack(), &SolverConfig::exact());
        assert_eq!(out.status, MilpStatus::Optimal);
        assert_eq!(out.objective, Some(-9.0));
        assert_eq!(out.dual_bound, -9.0);
    }

    #[test]
    fn single_binary_minimum() {
        let mut m = MilpModel::<f64>::new("one");
        let x = m.add_binary("x").unwrap();
        m.set_objective(LinExpr::term(1.0, x)).unwrap();
        let out = solve_milp(&m, &SolverConfig::exact());
        assert_eq!(out.status, MilpStatus::Optimal);
        assert_eq!(out.objective, Some(0.0));
        assert_eq!(out.nodes, 1);
    }

    #[test]
    fn infeasible_model() {
        let mut m = MilpModel::<f64>::new("inf");
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.constrain("both", LinExpr::sum_of([x, y]), Sense::Ge, 1.5).unwrap();
        m.constrain("atmost", LinExpr::sum_of([x, y]), Sense::Le, 1.0).unwrap();
        let out = solve_milp(&m, &SolverConfig::exact());
        assert_eq!(out.status, MilpStatus::Infeasible);
        assert!(out.incumbent.is_none());
    }

    #[test]
    fn depth_first_agrees() {
        let cfg = SolverConfig {
            node_order: NodeOrder::DepthFirst,
            ..SolverConfig::exact()
        };
        let out = solve_milp(&knapsack(), &cfg);
        assert_eq!(out.objective, Some(-9.0));
    }

    #[test]
    fn node_cap_stops_search() {
        let cfg = SolverConfig {
            max_nodes: Some(1),
            ..SolverConfig::exact()
        };
        let out = solve_milp(&knapsack(), &cfg);
        assert!(matches!(
            out.status,
            MilpStatus::NodeLimit | MilpStatus::Optimal
        ));
        assert!(out.nodes <= 1);
    }
}
