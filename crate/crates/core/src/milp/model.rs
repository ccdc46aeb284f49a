use std::collections::HashMap;
use std::fmt;

use crate::scalar::Scalar;

use super::MilpError;

/// Dense, insertion-ordered variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub name: String,
    pub kind: VarKind,
    pub lower: S,
    pub upper: S,
}

impl<S: Scalar> Variable<S> {
    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Binary,
            lower: S::zero(),
            upper: S::one(),
        }
    }

    pub fn continuous(name: impl Into<String>, lower: S, upper: S) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
        }
    }

    /// Same variable with both bounds replaced.
    pub fn with_bounds(mut self, lower: S, upper: S) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    #[inline]
    pub fn is_binary(&self) -> bool {
        self.kind == VarKind::Binary
    }
}

/// Sparse affine expression `sum(coef * var) + constant`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinExpr<S> {
    pub terms: Vec<(S, VarId)>,
    pub constant: S,
}

impl<S: Scalar> LinExpr<S> {
    pub fn new() -> Self {
        Self {
            terms: Vec::new(),
            constant: S::zero(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(coef: S, var: VarId) -> Self {
        Self {
            terms: vec![(coef, var)],
            constant: S::zero(),
        }
    }

    pub fn sum_of(vars: impl IntoIterator<Item = VarId>) -> Self {
        Self {
            terms: vars.into_iter().map(|v| (S::one(), v)).collect(),
            constant: S::zero(),
        }
    }

    pub fn add_term(&mut self, coef: S, var: VarId) -> &mut Self {
        self.terms.push((coef, var));
        self
    }

    pub fn with_term(mut self, coef: S, var: VarId) -> Self {
        self.terms.push((coef, var));
        self
    }

    pub fn extend_scaled(&mut self, coef: S, vars: impl IntoIterator<Item = VarId>) -> &mut Self {
        self.terms.extend(vars.into_iter().map(|v| (coef, v)));
        self
    }

    /// Merges duplicate variables, drops zero coefficients and sorts by id.
    pub fn normalize(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        self.terms.sort_by_key(|&(_, v)| v);
        let mut merged: Vec<(S, VarId)> = Vec::with_capacity(self.terms.len());
        for &(c, v) in &self.terms {
            match merged.last_mut() {
                Some(last) if last.1 == v => last.0 = last.0 + c,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(c, _)| c != S::zero());
        self.terms = merged;
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn value(&self, values: &[S]) -> S {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(c, v)| acc + c * values[v.0])
    }

    pub fn coefficient(&self, var: VarId) -> S {
        self.terms
            .iter()
            .filter(|&&(_, v)| v == var)
            .fold(S::zero(), |acc, &(c, _)| acc + c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// `expr sense rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub name: String,
    pub expr: LinExpr<S>,
    pub sense: Sense,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn new(name: impl Into<String>, expr: LinExpr<S>, sense: Sense, rhs: S) -> Self {
        Self {
            name: name.into(),
            expr,
            sense,
            rhs,
        }
    }

    /// Amount by which the constraint is violated at `values` (0 if satisfied).
    pub fn violation(&self, values: &[S]) -> S {
        let lhs = self.expr.value(values);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(S::zero()),
            Sense::Ge => (self.rhs - lhs).max(S::zero()),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimization MILP over binary and bounded continuous variables.
#[derive(Debug, Clone, Default)]
pub struct MilpModel<S> {
    pub name: String,
    variables: Vec<Variable<S>>,
    constraints: Vec<Constraint<S>>,
    objective: LinExpr<S>,
    var_index: HashMap<String, VarId>,
    row_index: HashMap<String, usize>,
}

impl<S: Scalar> MilpModel<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: LinExpr::new(),
            var_index: HashMap::new(),
            row_index: HashMap::new(),
        }
    }

    pub fn add_variable(&mut self, var: Variable<S>) -> Result<VarId, MilpError> {
        if self.var_index.contains_key(&var.name) {
            return Err(MilpError::DuplicateName(var.name));
        }
        let bad_bounds = var.lower.is_nan()
            || var.upper.is_nan()
            || var.lower > var.upper
            || (var.is_binary() && (var.lower < S::zero() || var.upper > S::one()));
        if bad_bounds {
            return Err(MilpError::InvalidBounds {
                name: var.name,
                lower: var.lower.to_f64_lossy(),
                upper: var.upper.to_f64_lossy(),
            });
        }
        let id = VarId(self.variables.len());
        self.var_index.insert(var.name.clone(), id);
        self.variables.push(var);
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, MilpError> {
        self.add_variable(Variable::binary(name))
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: S,
        upper: S,
    ) -> Result<VarId, MilpError> {
        self.add_variable(Variable::continuous(name, lower, upper))
    }

    pub fn add_constraint(&mut self, mut c: Constraint<S>) -> Result<(), MilpError> {
        if self.row_index.contains_key(&c.name) {
            return Err(MilpError::DuplicateName(c.name));
        }
        self.check_expr(&c.expr, &c.name)?;
        if !c.rhs.is_finite() {
            return Err(MilpError::NonFinite(c.name));
        }
        c.expr.normalize();
        self.row_index.insert(c.name.clone(), self.constraints.len());
        self.constraints.push(c);
        Ok(())
    }

    /// Convenience wrapper around [`MilpModel::add_constraint`].
    pub fn constrain(
        &mut self,
        name: impl Into<String>,
        expr: LinExpr<S>,
        sense: Sense,
        rhs: S,
    ) -> Result<(), MilpError> {
        self.add_constraint(Constraint::new(name, expr, sense, rhs))
    }

    pub fn set_objective(&mut self, mut expr: LinExpr<S>) -> Result<(), MilpError> {
        self.check_expr(&expr, "objective")?;
        expr.normalize();
        self.objective = expr;
        Ok(())
    }

    fn check_expr(&self, expr: &LinExpr<S>, owner: &str) -> Result<(), MilpError> {
        for &(c, v) in &expr.terms {
            if v.0 >= self.variables.len() {
                return Err(MilpError::UnknownVar {
                    owner: owner.to_string(),
                    var: v.0,
                });
            }
            if !c.is_finite() {
                return Err(MilpError::NonFinite(owner.to_string()));
            }
        }
        if !expr.constant.is_finite() {
            return Err(MilpError::NonFinite(owner.to_string()));
        }
        Ok(())
    }

    pub fn variables(&self) -> &[Variable<S>] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable<S> {
        &self.variables[id.0]
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinExpr<S> {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied()
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint<S>> {
        self.row_index.get(name).map(|&i| &self.constraints[i])
    }

    /// Tightens the bounds of an existing variable (used to fix binaries).
    pub fn set_bounds(&mut self, id: VarId, lower: S, upper: S) -> Result<(), MilpError> {
        let var = &mut self.variables[id.0];
        if lower > upper {
            return Err(MilpError::InvalidBounds {
                name: var.name.clone(),
                lower: lower.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    /// Converts every coefficient to another scalar type.
    pub fn cast<T: Scalar>(&self) -> MilpModel<T> {
        let conv = |v: S| T::lit(v.to_f64_lossy());
        let conv_expr = |e: &LinExpr<S>| LinExpr {
            terms: e.terms.iter().map(|&(c, v)| (conv(c), v)).collect(),
            constant: conv(e.constant),
        };
        MilpModel {
            name: self.name.clone(),
            variables: self
                .variables
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    kind: v.kind,
                    lower: conv(v.lower),
                    upper: conv(v.upper),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    expr: conv_expr(&c.expr),
                    sense: c.sense,
                    rhs: conv(c.rhs),
                })
                .collect(),
            objective: conv_expr(&self.objective),
            var_index: self.var_index.clone(),
            row_index: self.row_index.clone(),
        }
    }
}

/// Full assignment of values to a model's variables, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![S::zero(); n],
        }
    }

    pub fn get(&self, id: VarId) -> S {
        self.values[id.0]
    }

    pub fn set(&mut self, id: VarId, v: S) {
        self.values[id.0] = v;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
