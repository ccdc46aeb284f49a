use crate::scalar::Scalar;

use super::{MilpModel, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Constraint name, or `bound:<var>` / `integrality:<var>`.
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub objective: f64,
}

/// Checks `point` against every bound, integrality requirement and
/// constraint of `model`. A residual counts as a violation only when it
/// exceeds `tol`.
pub fn evaluate<S: Scalar>(model: &MilpModel<S>, point: &Point<S>, tol: S) -> FeasibilityReport {
    assert_eq!(
        point.len(),
        model.num_vars(),
        "point length does not match variable count"
    );
    let x = &point.values;
    let mut violations = Vec::new();
    for (var, &v) in model.variables().iter().zip(x) {
        let below = var.lower - v;
        let above = v - var.upper;
        let r = below.max(above);
        if r > tol || v.is_nan() {
            violations.push(Violation {
                name: format!("bound:{}", var.name),
                residual: r.to_f64_lossy(),
            });
        }
        if var.is_binary() {
            let frac = (v - v.round()).abs();
            if frac > tol {
                violations.push(Violation {
                    name: format!("integrality:{}", var.name),
                    residual: frac.to_f64_lossy(),
                });
            }
        }
    }
    for c in model.constraints() {
        let r = c.violation(x);
        if r > tol || r.is_nan() {
            violations.push(Violation {
                name: c.name.clone(),
                residual: r.to_f64_lossy(),
            });
        }
    }
    FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
        objective: model.objective().value(x).to_f64_lossy(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinExpr, Sense};

    fn unit_model() -> MilpModel<f64> {
        let mut m = MilpModel::new("unit");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.constrain("x_ge_1", LinExpr::term(1.0, x), Sense::Ge, 1.0).unwrap();
        m.set_objective(LinExpr::term(1.0, x)).unwrap();
        m
    }

    #[test]
    fn feasible_point() {
        let m = unit_model();
        let r = evaluate(&m, &Point { values: vec![1.0] }, 1e-9);
        assert!(r.feasible);
        assert_eq!(r.objective, 1.0);
    }

    #[test]
    fn one_violation_with_residual() {
        let m = unit_model();
        let r = evaluate(&m, &Point { values: vec![0.0] }, 1e-9);
        assert!(!r.feasible);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].name, "x_ge_1");
        assert_eq!(r.violations[0].residual, 1.0);
    }

    #[test]
    fn integrality_and_bounds_reported() {
        let mut m = MilpModel::<f64>::new("b");
        m.add_binary("b").unwrap();
        let r = evaluate(&m, &Point { values: vec![0.5] }, 1e-9);
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].name.starts_with("integrality:"));
        let r = evaluate(&m, &Point { values: vec![2.0] }, 1e-9);
        assert!(r.violations.iter().any(|v| v.name == "bound:b"));
    }
}
