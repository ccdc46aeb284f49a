//! Bounded-variable primal simplex.
//!
//! Every row `a.x (sense) rhs` becomes `a.x - r = 0` with a bounded logical
//! `r`, so the all-logical basis is always available as a starting point.
//! Phase 1 minimizes the sum of bound infeasibilities of the basic
//! variables; phase 2 minimizes the true objective. Pricing is Dantzig's
//! rule with lowest-index tie-breaking; after `3 * (rows + cols)`
//! consecutive degenerate pivots the method switches to Bland's rule until
//! the next nondegenerate step.

use std::time::Instant;

use crate::milp::{MilpModel, Point, Sense};
use crate::scalar::Scalar;

use super::factor::Factor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Status of one variable or row logical in a simplex basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisState {
    Basic,
    Lower,
    Upper,
}

/// Final basis of a solve, indexed by model variable and model row, so it
/// can seed a later solve of the same model under different bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub vars: Vec<BasisState>,
    pub rows: Vec<BasisState>,
}

#[derive(Debug, Clone)]
pub struct LpOutcome<S> {
    pub status: LpStatus,
    /// Values for every model variable (only meaningful when optimal).
    pub point: Point<S>,
    pub objective: f64,
    pub iterations: usize,
    /// How many times the Bland fallback was engaged.
    pub bland_activations: usize,
    /// Final basis (present when optimal).
    pub basis: Option<Basis>,
}

#[derive(Debug, Clone, Copy)]
pub struct LpConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_tol: f64,
    /// Refactor after this many eta updates.
    pub refactor_every: usize,
    /// Hard iteration cap; `None` means `50 * (rows + cols) + 10_000`.
    pub max_iterations: Option<usize>,
    /// Degenerate-pivot count that engages Bland's rule; `None` means
    /// `3 * (rows + cols)`.
    pub bland_after: Option<usize>,
}

impl LpConfig {
    pub fn for_scalar<S: Scalar>() -> Self {
        Self {
            feas_tol: S::FEAS_TOL,
            opt_tol: S::OPT_TOL,
            pivot_tol: S::PIVOT_TOL,
            refactor_every: 100,
            max_iterations: None,
            bland_after: None,
        }
    }
}

impl Default for LpConfig {
    fn default() -> Self {
        Self::for_scalar::<f64>()
    }
}

/// LP relaxation of `model` (integrality dropped).
pub fn solve_lp<S: Scalar>(model: &MilpModel<S>, cfg: &LpConfig) -> LpOutcome<S> {
    let lower: Vec<S> = model.variables().iter().map(|v| v.lower).collect();
    let upper: Vec<S> = model.variables().iter().map(|v| v.upper).collect();
    solve_lp_with_bounds(model, &lower, &upper, cfg)
}

/// LP relaxation of `model` with the variable bounds replaced.
pub fn solve_lp_with_bounds<S: Scalar>(
    model: &MilpModel<S>,
    lower: &[S],
    upper: &[S],
    cfg: &LpConfig,
) -> LpOutcome<S> {
    solve_lp_from(model, lower, upper, cfg, None)
}

/// Like [`solve_lp_with_bounds`], starting from `start` when given instead
/// of the all-logical basis.
pub fn solve_lp_from<S: Scalar>(
    model: &MilpModel<S>,
    lower: &[S],
    upper: &[S],
    cfg: &LpConfig,
    start: Option<&Basis>,
) -> LpOutcome<S> {
    let n_model = model.num_vars();
    let fail = |status| LpOutcome {
        status,
        point: Point::zeros(n_model),
        objective: f64::NAN,
        iterations: 0,
        bland_activations: 0,
        basis: None,
    };
    let lp = match Presolved::build(model, lower, upper, S::lit(cfg.feas_tol)) {
        Some(lp) => lp,
        None => return fail(LpStatus::Infeasible),
    };
    let mut spx = Simplex::new(&lp, cfg);
    if let Some(b) = start {
        spx.install(b);
    }
    let status = spx.run();
    let iterations = spx.iterations;
    let bland = spx.bland_activations;
    if status != LpStatus::Optimal {
        return LpOutcome {
            iterations,
            bland_activations: bland,
            ..fail(status)
        };
    }
    let mut point = Point::zeros(n_model);
    for (j, &v) in lp.fixed.iter().enumerate() {
        if let Some(v) = v {
            point.values[j] = v;
        }
    }
    for (c, &j) in lp.col_to_var.iter().enumerate() {
        // clamp tiny bound drift
        point.values[j] = spx.x[c].max(lower[j]).min(upper[j]);
    }
    let objective = model.objective().value(&point.values).to_f64_lossy();
    let basis = spx.export(model.num_constraints(), &point, lower);
    LpOutcome {
        status,
        point,
        objective,
        iterations,
        bland_activations: bland,
        basis: Some(basis),
    }
}

/// The reduced LP handed to the simplex: fixed columns substituted out,
/// empty rows dropped, rows scaled to unit max-abs coefficient.
pub(crate) struct Presolved<S> {
    pub m: usize,
    pub n: usize,
    pub cols: Vec<Vec<(usize, S)>>,
    pub cost: Vec<S>,
    /// Bounds for structurals followed by logicals.
    pub lo: Vec<S>,
    pub up: Vec<S>,
    pub col_to_var: Vec<usize>,
    /// Model constraint behind every kept row.
    pub row_to_con: Vec<usize>,
    pub fixed: Vec<Option<S>>,
}

impl<S: Scalar> Presolved<S> {
    pub fn build(model: &MilpModel<S>, lower: &[S], upper: &[S], tol: S) -> Option<Self> {
        let nv = model.num_vars();
        let mut fixed: Vec<Option<S>> = vec![None; nv];
        let mut var_to_col = vec![usize::MAX; nv];
        let mut col_to_var = Vec::new();
        for j in 0..nv {
            if lower[j] > upper[j] + tol {
                return None;
            }
            if upper[j] - lower[j] <= S::zero() {
                fixed[j] = Some(lower[j]);
            } else {
                var_to_col[j] = col_to_var.len();
                col_to_var.push(j);
            }
        }
        let n = col_to_var.len();
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        let mut row_lo = Vec::new();
        let mut row_up = Vec::new();
        let mut row_to_con = Vec::new();
        let inf = S::infinity();
        for (ci, c) in model.constraints().iter().enumerate() {
            let mut shift = c.expr.constant;
            let mut scale = S::zero();
            let mut any = false;
            for &(a, v) in &c.expr.terms {
                match fixed[v.0] {
                    Some(val) => shift = shift + a * val,
                    None => {
                        if a != S::zero() {
                            any = true;
                            scale = scale.max(a.abs());
                        }
                    }
                }
            }
            let rhs = c.rhs - shift;
            let (lo, up) = match c.sense {
                Sense::Le => (-inf, rhs),
                Sense::Ge => (rhs, inf),
                Sense::Eq => (rhs, rhs),
            };
            if !any {
                // empty row: must hold at zero activity
                if lo > tol || up < -tol {
                    return None;
                }
                continue;
            }
            let r = row_lo.len();
            for &(a, v) in &c.expr.terms {
                if fixed[v.0].is_none() && a != S::zero() {
                    cols[var_to_col[v.0]].push((r, a / scale));
                }
            }
            row_lo.push(lo / scale);
            row_up.push(up / scale);
            row_to_con.push(ci);
        }
        let m = row_lo.len();
        let mut cost = vec![S::zero(); n];
        for &(a, v) in &model.objective().terms {
            if fixed[v.0].is_none() {
                cost[var_to_col[v.0]] = cost[var_to_col[v.0]] + a;
            }
        }
        let mut lo: Vec<S> = col_to_var.iter().map(|&j| lower[j]).collect();
        let mut up: Vec<S> = col_to_var.iter().map(|&j| upper[j]).collect();
        lo.extend(row_lo);
        up.extend(row_up);
        Some(Self {
            m,
            n,
            cols,
            cost,
            lo,
            up,
            col_to_var,
            row_to_con,
            fixed,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

struct Simplex<'a, S> {
    lp: &'a Presolved<S>,
    cfg: LpConfig,
    /// Values of structurals then logicals.
    x: Vec<S>,
    state: Vec<State>,
    /// Variable basic at each position.
    head: Vec<usize>,
    factor: Factor<S>,
    iterations: usize,
    bland_activations: usize,
    feas_tol: S,
    opt_tol: S,
    pivot_tol: S,
    // scratch
    alpha: Vec<S>,
    dual: Vec<S>,
    infeasible_rows: Vec<usize>,
}

enum Step {
    Optimal,
    Infeasible,
    Unbounded,
    Continue { degenerate: bool },
}

impl<'a, S: Scalar> Simplex<'a, S> {
    fn new(lp: &'a Presolved<S>, cfg: &LpConfig) -> Self {
        let (n, m) = (lp.n, lp.m);
        let mut x = vec![S::zero(); n + m];
        let mut state = vec![State::Basic; n + m];
        for j in 0..n {
            // structurals start at a finite bound, preferring the one nearer zero
            let (lo, up) = (lp.lo[j], lp.up[j]);
            if lo.is_finite() && (!up.is_finite() || lo.abs() <= up.abs()) {
                x[j] = lo;
                state[j] = State::AtLower;
            } else if up.is_finite() {
                x[j] = up;
                state[j] = State::AtUpper;
            } else {
                x[j] = S::zero();
                state[j] = State::AtLower;
            }
        }
        let head: Vec<usize> = (n..n + m).collect();
        let mut spx = Self {
            lp,
            cfg: *cfg,
            x,
            state,
            head,
            factor: Factor::identity(m),
            iterations: 0,
            bland_activations: 0,
            feas_tol: S::lit(cfg.feas_tol),
            opt_tol: S::lit(cfg.opt_tol),
            pivot_tol: S::lit(cfg.pivot_tol),
            alpha: vec![S::zero(); m],
            dual: vec![S::zero(); m],
            infeasible_rows: Vec::new(),
        };
        spx.recompute_basics();
        spx
    }

    fn n(&self) -> usize {
        self.lp.n
    }

    fn m(&self) -> usize {
        self.lp.m
    }

    /// Loads column `j` (structural or logical) into `out` as a dense vector.
    fn load_column(&self, j: usize, out: &mut [S]) {
        for v in out.iter_mut() {
            *v = S::zero();
        }
        if j < self.n() {
            for &(i, a) in &self.lp.cols[j] {
                out[i] = a;
            }
        } else {
            out[j - self.n()] = -S::one();
        }
    }

    /// `x_B = -B^-1 N x_N`.
    fn recompute_basics(&mut self) {
        let (n, m) = (self.n(), self.m());
        let mut v = vec![S::zero(); m];
        for j in 0..n {
            if self.state[j] != State::Basic && self.x[j] != S::zero() {
                for &(i, a) in &self.lp.cols[j] {
                    v[i] = v[i] + a * self.x[j];
                }
            }
        }
        for i in 0..m {
            if self.state[n + i] != State::Basic {
                v[i] = v[i] - self.x[n + i];
            }
        }
        self.factor.ftran(&mut v);
        for (p, &var) in self.head.iter().enumerate() {
            self.x[var] = -v[p];
        }
    }

    fn refactor(&mut self) {
        let head = std::mem::take(&mut self.head);
        self.factorize(&head);
    }

    /// Factorizes the basis spanned by `candidates`, parking columns that
    /// turn out dependent and filling uncovered rows with their logicals.
    fn factorize(&mut self, candidates: &[usize]) {
        let (n, m) = (self.n(), self.m());
        let mut logical_rows = vec![false; m];
        let mut structural_vars = Vec::new();
        for &var in candidates {
            if var >= n {
                logical_rows[var - n] = true;
            } else {
                structural_vars.push(var);
            }
        }
        let cols: Vec<&[(usize, S)]> = structural_vars
            .iter()
            .map(|&j| self.lp.cols[j].as_slice())
            .collect();
        let (factor, pos) = Factor::refactor(m, &logical_rows, &cols, self.pivot_tol);
        let mut head: Vec<usize> = (n..n + m).collect();
        for (k, p) in pos.iter().enumerate() {
            let j = structural_vars[k];
            match *p {
                Some(p) => head[p] = j,
                None => {
                    log::debug!("dropping dependent column {j} from the basis");
                    let toward_upper = (self.x[j] - self.lp.lo[j]).abs() > (self.lp.up[j] - self.x[j]).abs();
                    self.park(j, toward_upper);
                }
            }
        }
        for &var in &head {
            self.state[var] = State::Basic;
        }
        self.head = head;
        self.factor = factor;
        self.recompute_basics();
    }

    /// Makes `var` nonbasic at a finite bound, the upper one if asked and
    /// available.
    fn park(&mut self, var: usize, toward_upper: bool) {
        let (lo, up) = (self.lp.lo[var], self.lp.up[var]);
        if (toward_upper && up.is_finite()) || !lo.is_finite() {
            if up.is_finite() {
                self.x[var] = up;
                self.state[var] = State::AtUpper;
            } else {
                self.x[var] = S::zero();
                self.state[var] = State::AtLower;
            }
        } else {
            self.x[var] = lo;
            self.state[var] = State::AtLower;
        }
    }

    /// Loads a basis saved from another solve of the same model.
    fn install(&mut self, b: &Basis) {
        let n = self.n();
        let mut candidates = Vec::new();
        for var in 0..n + self.m() {
            let st = if var < n {
                b.vars[self.lp.col_to_var[var]]
            } else {
                b.rows[self.lp.row_to_con[var - n]]
            };
            match st {
                BasisState::Basic => {
                    self.state[var] = State::Basic;
                    candidates.push(var);
                }
                BasisState::Lower => self.park(var, false),
                BasisState::Upper => self.park(var, true),
            }
        }
        self.factorize(&candidates);
    }

    fn export(&self, num_rows: usize, point: &Point<S>, lower: &[S]) -> Basis {
        let mut vars: Vec<BasisState> = point
            .values
            .iter()
            .zip(lower)
            .map(|(v, lo)| if v <= lo { BasisState::Lower } else { BasisState::Upper })
            .collect();
        let conv = |s: State| match s {
            State::Basic => BasisState::Basic,
            State::AtLower => BasisState::Lower,
            State::AtUpper => BasisState::Upper,
        };
        for (c, &j) in self.lp.col_to_var.iter().enumerate() {
            vars[j] = conv(self.state[c]);
        }
        let mut rows = vec![BasisState::Basic; num_rows];
        for (i, &ci) in self.lp.row_to_con.iter().enumerate() {
            rows[ci] = conv(self.state[self.n() + i]);
        }
        Basis { vars, rows }
    }

    fn infeasibility(&self, var: usize) -> S {
        let v = self.x[var];
        let lo = self.lp.lo[var];
        let up = self.lp.up[var];
        if v < lo - self.feas_tol {
            lo - v
        } else if v > up + self.feas_tol {
            v - up
        } else {
            S::zero()
        }
    }

    fn run(&mut self) -> LpStatus {
        let (n, m) = (self.n(), self.m());
        let max_iter = self
            .cfg
            .max_iterations
            .unwrap_or(50 * (n + m) + 10_000);
        let bland_after = self.cfg.bland_after.unwrap_or(3 * (n + m));
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let started = Instant::now();
        loop {
            if self.iterations >= max_iter {
                log::warn!(
                    "simplex iteration limit after {:?} ({} rows, {} cols)",
                    started.elapsed(),
                    m,
                    n
                );
                return LpStatus::IterationLimit;
            }
            if self.factor.updates() >= self.cfg.refactor_every
                || self.factor.fill() > 4 * (m + 1000)
            {
                self.refactor();
            }
            match self.iterate(bland) {
                Step::Optimal => {
                    // confirm on a fresh factorization before declaring victory
                    if self.factor.updates() > 0 {
                        self.refactor();
                        if let Step::Continue { .. } = self.iterate(bland) {
                            self.iterations += 1;
                            continue;
                        }
                    }
                    return LpStatus::Optimal;
                }
                Step::Infeasible => {
                    if self.factor.updates() > 0 {
                        self.refactor();
                        if let Step::Continue { .. } = self.iterate(bland) {
                            self.iterations += 1;
                            continue;
                        }
                    }
                    return LpStatus::Infeasible;
                }
                Step::Unbounded => return LpStatus::Unbounded,
                Step::Continue { degenerate } => {
                    self.iterations += 1;
                    if degenerate {
                        degenerate_run += 1;
                        if !bland && degenerate_run > bland_after {
                            bland = true;
                            self.bland_activations += 1;
                        }
                    } else {
                        degenerate_run = 0;
                        bland = false;
                    }
                }
            }
        }
    }

    /// One pricing + ratio test + update.
    fn iterate(&mut self, bland: bool) -> Step {
        let (n, m) = (self.n(), self.m());

        // phase detection and basic costs
        self.infeasible_rows.clear();
        for p in 0..m {
            let var = self.head[p];
            if self.infeasibility(var) > S::zero() {
                self.infeasible_rows.push(p);
            }
        }
        let phase1 = !self.infeasible_rows.is_empty();
        for p in 0..m {
            let var = self.head[p];
            self.dual[p] = if phase1 {
                let v = self.x[var];
                if v < self.lp.lo[var] - self.feas_tol {
                    -S::one()
                } else if v > self.lp.up[var] + self.feas_tol {
                    S::one()
                } else {
                    S::zero()
                }
            } else if var < n {
                self.lp.cost[var]
            } else {
                S::zero()
            };
        }
        let mut y = std::mem::take(&mut self.dual);
        self.factor.btran(&mut y);

        // pricing
        let mut enter = usize::MAX;
        let mut enter_dir = S::zero();
        let mut best = S::zero();
        let mut consider = |j: usize, d: S, state: State, lo: S, up: S| -> bool {
            if up - lo <= S::zero() {
                return false;
            }
            let dir = match state {
                State::AtLower if d < -self.opt_tol => S::one(),
                State::AtUpper if d > self.opt_tol => -S::one(),
                _ => return false,
            };
            if bland {
                if enter == usize::MAX {
                    enter = j;
                    enter_dir = dir;
                }
                return true;
            }
            if d.abs() > best {
                best = d.abs();
                enter = j;
                enter_dir = dir;
            }
            false
        };
        for j in 0..n + m {
            if self.state[j] == State::Basic {
                continue;
            }
            let d = if j < n {
                let mut acc = if phase1 { S::zero() } else { self.lp.cost[j] };
                for &(i, a) in &self.lp.cols[j] {
                    acc = acc - y[i] * a;
                }
                acc
            } else {
                y[j - n]
            };
            if consider(j, d, self.state[j], self.lp.lo[j], self.lp.up[j]) {
                break;
            }
        }
        self.dual = y;
        if enter == usize::MAX {
            return if phase1 { Step::Infeasible } else { Step::Optimal };
        }

        // ratio test
        let mut alpha = std::mem::take(&mut self.alpha);
        self.load_column(enter, &mut alpha);
        self.factor.ftran(&mut alpha);
        let dir = enter_dir;
        let range = self.lp.up[enter] - self.lp.lo[enter];
        let tol = self.feas_tol;

        // first pass: relaxed bounds (Harris)
        let mut theta_relaxed = S::infinity();
        for p in 0..m {
            let a = alpha[p];
            if a.abs() <= self.pivot_tol {
                continue;
            }
            let var = self.head[p];
            let rate = -dir * a;
            if let Some(r) = self.limit(var, rate, tol) {
                theta_relaxed = theta_relaxed.min(r);
            }
        }
        let mut leave_pos = usize::MAX;
        let mut leave_theta = S::infinity();
        if theta_relaxed.is_finite() {
            let mut best_piv = S::zero();
            let mut best_var = usize::MAX;
            for p in 0..m {
                let a = alpha[p];
                if a.abs() <= self.pivot_tol {
                    continue;
                }
                let var = self.head[p];
                let rate = -dir * a;
                if let Some(r) = self.limit(var, rate, S::zero()) {
                    if r <= theta_relaxed {
                        let better = if bland {
                            var < best_var
                        } else {
                            a.abs() > best_piv || (a.abs() == best_piv && var < best_var)
                        };
                        if better {
                            best_piv = a.abs();
                            best_var = var;
                            leave_pos = p;
                            leave_theta = r.max(S::zero());
                        }
                    }
                }
            }
        }

        if range.is_finite() && (range <= leave_theta || leave_pos == usize::MAX) {
            // bound flip
            let theta = range;
            self.move_basics(&alpha, dir, theta);
            self.x[enter] = if dir > S::zero() {
                self.lp.up[enter]
            } else {
                self.lp.lo[enter]
            };
            self.state[enter] = if dir > S::zero() {
                State::AtUpper
            } else {
                State::AtLower
            };
            self.alpha = alpha;
            return Step::Continue { degenerate: false };
        }
        if leave_pos == usize::MAX {
            self.alpha = alpha;
            return Step::Unbounded;
        }

        let theta = leave_theta;
        let leaving = self.head[leave_pos];
        let rate = -dir * alpha[leave_pos];
        // the leaving variable settles on the bound that blocked it
        let (lo, up) = (self.lp.lo[leaving], self.lp.up[leaving]);
        let v = self.x[leaving];
        let to_lower = if rate < S::zero() {
            v <= up + tol
        } else {
            v < lo - tol
        };
        self.move_basics(&alpha, dir, theta);
        self.x[enter] = self.x[enter] + dir * theta;
        if to_lower {
            self.x[leaving] = lo;
            self.state[leaving] = State::AtLower;
        } else {
            self.x[leaving] = up;
            self.state[leaving] = State::AtUpper;
        }
        self.state[enter] = State::Basic;
        self.head[leave_pos] = enter;
        self.factor.push_update(&alpha, leave_pos, S::lit(1e-14));
        self.alpha = alpha;
        Step::Continue {
            degenerate: theta <= S::lit(1e-12),
        }
    }

    /// Step length before basic `var`, moving at `rate` per unit, hits the
    /// bound that blocks it (with bounds widened by `slack`).
    fn limit(&self, var: usize, rate: S, slack: S) -> Option<S> {
        let v = self.x[var];
        let lo = self.lp.lo[var];
        let up = self.lp.up[var];
        let below = v < lo - self.feas_tol;
        let above = v > up + self.feas_tol;
        if rate < S::zero() {
            if below {
                return None;
            }
            let target = if above { up } else { lo };
            if !target.is_finite() {
                return None;
            }
            Some(((v - target + slack) / -rate).max(S::zero()))
        } else {
            if above {
                return None;
            }
            let target = if below { lo } else { up };
            if !target.is_finite() {
                return None;
            }
            Some(((target - v + slack) / rate).max(S::zero()))
        }
    }

    fn move_basics(&mut self, alpha: &[S], dir: S, theta: S) {
        if theta == S::zero() {
            return;
        }
        for (p, &a) in alpha.iter().enumerate() {
            if a != S::zero() {
                let var = self.head[p];
                self.x[var] = self.x[var] - dir * a * theta;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{LinExpr, MilpModel, Sense};

    #[test]
    fn maximize_bounded_single_var() {
        let mut m = MilpModel::<f64>::new("lp");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.constrain("cap", LinExpr::term(1.0, x), Sense::Le, 3.0).unwrap();
        m.set_objective(LinExpr::term(-1.0, x)).unwrap();
        let out = solve_lp(&m, &LpConfig::default());
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.point.values[0] - 3.0).abs() < 1e-9);
        assert!((out.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = MilpModel::<f64>::new("lp");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.constrain("lo", LinExpr::term(1.0, x), Sense::Ge, 2.0).unwrap();
        m.constrain("hi", LinExpr::term(1.0, x), Sense::Le, 1.0).unwrap();
        let out = solve_lp(&m, &LpConfig::default());
        assert_eq!(out.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_mixed_senses() {
        // min x + 2y  s.t. x + y = 4, x - y >= -2, x <= 3 ; x,y in [0,10]
        let mut m = MilpModel::<f64>::new("lp");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        let y = m.add_continuous("y", 0.0, 10.0).unwrap();
        m.constrain("sum", LinExpr::sum_of([x, y]), Sense::Eq, 4.0).unwrap();
        m.constrain("diff", LinExpr::term(1.0, x).with_term(-1.0, y), Sense::Ge, -2.0)
            .unwrap();
        m.constrain("xcap", LinExpr::term(1.0, x), Sense::Le, 3.0).unwrap();
        m.set_objective(LinExpr::term(1.0, x).with_term(2.0, y)).unwrap();
        let out = solve_lp(&m, &LpConfig::default());
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.point.values[0] - 3.0).abs() < 1e-9);
        assert!((out.point.values[1] - 1.0).abs() < 1e-9);
        assert!((out.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn f32_solves_small_lp() {
        let mut m = MilpModel::<f32>::new("lp");
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        let y = m.add_continuous("y", 0.0, 10.0).unwrap();
        m.constrain("c", LinExpr::term(1.0, x).with_term(1.0, y), Sense::Ge, 2.5).unwrap();
        m.set_objective(LinExpr::term(1.0, x).with_term(3.0, y)).unwrap();
        let out = solve_lp(&m, &LpConfig::for_scalar::<f32>());
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective - 2.5).abs() < 1e-4);
    }
}
