//! Exhaustive search over the binaries of a built model.
//!
//! Continuous variables must be auxiliaries in lower-envelope form: each
//! one is pushed up only by rows where it is the single continuous term on
//! the "greater" side, and everywhere else a smaller value never hurts. For
//! a fixed binary assignment the smallest such values are then the best
//! completion, found by raising them until every envelope row holds.

use crate::milp::{MilpModel, Point, Sense, VarKind};
use crate::scalar::Scalar;

use super::{too_large, OracleError};

pub const DEFAULT_BINARY_CAP: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptimum {
    pub point: Point<f64>,
    pub objective: f64,
    /// Complete binary assignments that reached the auxiliary step.
    pub leaves: usize,
}

/// A row as `lo <= sum(coef * x) <= hi`.
struct Row {
    terms: Vec<(f64, usize)>,
    lo: f64,
    hi: f64,
}

impl Row {
    fn slack_tol(&self) -> f64 {
        let scale = if self.lo.is_finite() { self.lo.abs() } else { self.hi.abs() };
        1e-9 * scale.max(1.0)
    }
}

/// Minimum of a model by enumerating its free binaries in index order, zero
/// before one. A branch is cut only when some row cannot hold for any
/// completion, or when the objective cannot drop below the best found.
/// The first assignment reaching the minimum wins ties. `Ok(None)` means
/// infeasible.
pub fn enumerate_model<S: Scalar>(m: &MilpModel<S>, cap: usize) -> Result<Option<ModelOptimum>, OracleError> {
    let vars = m.variables();
    let n = vars.len();
    let lower: Vec<f64> = vars.iter().map(|v| v.lower.to_f64_lossy()).collect();
    let upper: Vec<f64> = vars.iter().map(|v| v.upper.to_f64_lossy()).collect();
    let binary: Vec<bool> = vars.iter().map(|v| v.kind == VarKind::Binary).collect();
    let free: Vec<usize> = (0..n).filter(|&v| binary[v] && lower[v] < upper[v]).collect();
    too_large("free binary count", free.len(), cap)?;

    let rows: Vec<Row> = m
        .constraints()
        .iter()
        .map(|c| {
            let rhs = c.rhs.to_f64_lossy();
            let (lo, hi) = match c.sense {
                Sense::Ge => (rhs, f64::INFINITY),
                Sense::Le => (f64::NEG_INFINITY, rhs),
                Sense::Eq => (rhs, rhs),
            };
            Row {
                terms: c.expr.terms.iter().map(|&(a, v)| (a.to_f64_lossy(), v.0)).collect(),
                lo,
                hi,
            }
        })
        .collect();
    let mut objective = vec![0.0; n];
    for &(a, v) in &m.objective().terms {
        objective[v.0] += a.to_f64_lossy();
    }
    let constant = m.objective().constant.to_f64_lossy();

    // envelope rows per auxiliary: (row, orientation) with the auxiliary
    // pushed up by `sign * row >= sign * bound`
    let mut envelopes: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| !binary[v]) {
        if objective[v] < 0.0 {
            return Err(not_envelope(m, v, "negative objective coefficient"));
        }
    }
    for (ri, row) in rows.iter().enumerate() {
        let mut pushed: Option<usize> = None;
        for &(a, v) in &row.terms {
            if binary[v] || a == 0.0 {
                continue;
            }
            if row.lo.is_finite() && row.hi.is_finite() {
                return Err(not_envelope(m, v, "appears in an equality row"));
            }
            let sign = if row.lo.is_finite() { 1.0 } else { -1.0 };
            if sign * a > 0.0 {
                if let Some(other) = pushed {
                    return Err(not_envelope(m, v, &format!("shares a lower envelope with `{}`", vars[other].name)));
                }
                pushed = Some(v);
                envelopes[v].push((ri, sign));
            }
        }
    }

    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ri, row) in rows.iter().enumerate() {
        for &(_, v) in &row.terms {
            if !touching[v].contains(&ri) {
                touching[v].push(ri);
            }
        }
    }

    let mut value: Vec<f64> = (0..n).map(|v| if binary[v] { lower[v] } else { f64::NAN }).collect();
    let mut fixed: Vec<bool> = (0..n).map(|v| binary[v] && lower[v] == upper[v]).collect();
    for (ri, row) in rows.iter().enumerate() {
        if !row_possible(row, &value, &fixed, &lower, &upper) {
            log::debug!("row {} cannot hold for any assignment", m.constraints()[ri].name);
            return Ok(None);
        }
    }

    let mut e = Enum {
        rows: &rows,
        lower: &lower,
        upper: &upper,
        binary: &binary,
        objective: &objective,
        envelopes: &envelopes,
        touching: &touching,
        free: &free,
        value: &mut value,
        fixed: &mut fixed,
        best: None,
        leaves: 0,
        cycle: None,
    };
    e.walk(0);
    if let Some(v) = e.cycle {
        return Err(not_envelope(m, v, "envelopes depend on each other in a cycle"));
    }
    let leaves = e.leaves;
    Ok(e.best.map(|(obj, values)| ModelOptimum {
        point: Point { values },
        objective: obj + constant,
        leaves,
    }))
}

fn not_envelope<S: Scalar>(m: &MilpModel<S>, v: usize, reason: &str) -> OracleError {
    OracleError::NotEnvelope {
        var: m.variables()[v].name.clone(),
        reason: reason.to_string(),
    }
}

/// Whether some completion of the fixed binaries, with every other
/// variable anywhere in its bounds, can satisfy `row`.
fn row_possible(row: &Row, value: &[f64], fixed: &[bool], lower: &[f64], upper: &[f64]) -> bool {
    let (mut min, mut max) = (0.0, 0.0);
    for &(a, v) in &row.terms {
        if fixed[v] {
            min += a * value[v];
            max += a * value[v];
        } else if a > 0.0 {
            min += a * lower[v];
            max += a * upper[v];
        } else {
            min += a * upper[v];
            max += a * lower[v];
        }
    }
    let tol = row.slack_tol();
    max >= row.lo - tol && min <= row.hi + tol
}

struct Enum<'a> {
    rows: &'a [Row],
    lower: &'a [f64],
    upper: &'a [f64],
    binary: &'a [bool],
    objective: &'a [f64],
    envelopes: &'a [Vec<(usize, f64)>],
    touching: &'a [Vec<usize>],
    free: &'a [usize],
    value: &'a mut Vec<f64>,
    fixed: &'a mut Vec<bool>,
    best: Option<(f64, Vec<f64>)>,
    leaves: usize,
    cycle: Option<usize>,
}

impl Enum<'_> {
    fn walk(&mut self, depth: usize) {
        if self.cycle.is_some() {
            return;
        }
        // an assignment that can at best tie never replaces the incumbent
        if let Some((best, _)) = &self.best {
            if self.objective_floor() >= *best - 1e-9 * best.abs().max(1.0) {
                return;
            }
        }
        if depth == self.free.len() {
            self.leaf();
            return;
        }
        let v = self.free[depth];
        self.fixed[v] = true;
        for x in [0.0, 1.0] {
            self.value[v] = x;
            let ok = self.touching[v]
                .iter()
                .all(|&ri| row_possible(&self.rows[ri], self.value, self.fixed, self.lower, self.upper));
            if ok {
                self.walk(depth + 1);
            }
        }
        self.fixed[v] = false;
        self.value[v] = self.lower[v];
    }

    /// Objective with fixed binaries at their values, free binaries at their
    /// most favorable bound and each auxiliary at the least value its
    /// envelope rows allow for any completion.
    fn objective_floor(&self) -> f64 {
        let mut total = 0.0;
        for (v, &c) in self.objective.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            total += if self.binary[v] && self.fixed[v] {
                c * self.value[v]
            } else if self.binary[v] {
                c.min(0.0)
            } else {
                c * self.aux_floor(v)
            };
        }
        total
    }

    fn aux_floor(&self, v: usize) -> f64 {
        let mut floor = self.lower[v];
        for &(ri, sign) in &self.envelopes[v] {
            let row = &self.rows[ri];
            let bound = if sign > 0.0 { row.lo } else { -row.hi };
            let (mut own, mut rest_max) = (0.0, 0.0);
            for &(a, w) in &row.terms {
                let a = sign * a;
                if w == v {
                    own += a;
                } else if self.binary[w] && self.fixed[w] {
                    rest_max += a * self.value[w];
                } else {
                    rest_max += if a > 0.0 { a * self.upper[w] } else { a * self.lower[w] };
                }
            }
            floor = floor.max((bound - rest_max) / own);
        }
        floor
    }

    fn leaf(&mut self) {
        self.leaves += 1;
        let n = self.value.len();
        let aux: Vec<usize> = (0..n).filter(|&v| !self.binary[v]).collect();
        let mut x = self.value.clone();
        for &v in &aux {
            x[v] = self.lower[v];
        }
        let mut settled = false;
        for _ in 0..=aux.len() {
            let mut moved = false;
            for &v in &aux {
                for &(ri, sign) in &self.envelopes[v] {
                    let row = &self.rows[ri];
                    let bound = if sign > 0.0 { row.lo } else { -row.hi };
                    let mut rest = 0.0;
                    let mut own = 0.0;
                    for &(a, w) in &row.terms {
                        if w == v {
                            own += sign * a;
                        } else {
                            rest += sign * a * x[w];
                        }
                    }
                    let need = (bound - rest) / own;
                    if need > x[v] + 1e-12 * need.abs().max(1.0) {
                        x[v] = need;
                        moved = true;
                    }
                }
            }
            if !moved {
                settled = true;
                break;
            }
        }
        if !settled {
            self.cycle = aux.first().copied();
            return;
        }

        for &v in &aux {
            let tol = 1e-9 * self.upper[v].abs().max(1.0);
            if x[v] > self.upper[v] + tol {
                return;
            }
        }
        for row in self.rows {
            let act: f64 = row.terms.iter().map(|&(a, w)| a * x[w]).sum();
            let tol = row.slack_tol();
            if act < row.lo - tol || act > row.hi + tol {
                return;
            }
        }
        let obj: f64 = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let better = match &self.best {
            None => true,
            Some((b, _)) => obj < *b - 1e-9 * b.abs().max(1.0),
        };
        if better {
            self.best = Some((obj, x));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{linearize_product, LinExpr};

    #[test]
    fn single_binary_minimum() {
        let mut m = MilpModel::<f64>::new("one");
        let x = m.add_binary("x").unwrap();
        m.set_objective(LinExpr::term(1.0, x)).unwrap();
        let out = enumerate_model(&m, DEFAULT_BINARY_CAP).unwrap().unwrap();
        assert_eq!(out.objective, 0.0);
        assert_eq!(out.point.values, vec![0.0]);
    }

    #[test]
    fn product_truth_table() {
        for (xv, yv) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let mut m = MilpModel::<f64>::new("prod");
            let x = m.add_binary("x").unwrap();
            let y = m.add_binary("y").unwrap();
            m.set_bounds(x, xv, xv).unwrap();
            m.set_bounds(y, yv, yv).unwrap();
            let z = linearize_product(&mut m, x, y, "z").unwrap();
            m.set_objective(LinExpr::term(1.0, z)).unwrap();
            let out = enumerate_model(&m, DEFAULT_BINARY_CAP).unwrap().unwrap();
            assert_eq!(out.point.get(z), xv * yv);
        }
    }

    #[test]
    fn cap_enforced() {
        let mut m = MilpModel::<f64>::new("wide");
        for k in 0..4 {
            m.add_binary(format!("x{k}")).unwrap();
        }
        assert!(matches!(enumerate_model(&m, 3), Err(OracleError::TooLarge { value: 4, .. })));
    }

    #[test]
    fn rejects_auxiliary_in_equality() {
        let mut m = MilpModel::<f64>::new("eq");
        let x = m.add_binary("x").unwrap();
        let z = m.add_continuous("z", 0.0, 5.0).unwrap();
        m.constrain("tie", LinExpr::term(1.0, z).with_term(-2.0, x), Sense::Eq, 0.0).unwrap();
        assert!(matches!(enumerate_model(&m, 4), Err(OracleError::NotEnvelope { .. })));
    }

    #[test]
    fn infeasible_model() {
        let mut m = MilpModel::<f64>::new("bad");
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.constrain("both", LinExpr::sum_of([x, y]), Sense::Ge, 3.0).unwrap();
        assert_eq!(enumerate_model(&m, 4).unwrap(), None);
    }
}
