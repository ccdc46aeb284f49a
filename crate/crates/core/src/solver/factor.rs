//! Product-form basis inverse.
//!
//! The basis starts as `-I` (every row's logical column) and each structural
//! column enters through an eta transformation. `refactor` rebuilds the eta
//! file from scratch for a given set of basic columns.

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
struct Eta<S> {
    pivot: usize,
    pivot_val: S,
    /// Off-pivot entries of the transformed column.
    entries: Vec<(usize, S)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Factor<S> {
    m: usize,
    etas: Vec<Eta<S>>,
    base_len: usize,
    nnz: usize,
    base_nnz: usize,
}

impl<S: Scalar> Factor<S> {
    pub fn identity(m: usize) -> Self {
        Self {
            m,
            etas: Vec::new(),
            base_len: 0,
            nnz: 0,
            base_nnz: 0,
        }
    }

    /// Number of update etas appended since the last refactorization.
    pub fn updates(&self) -> usize {
        self.etas.len() - self.base_len
    }

    pub fn fill(&self) -> usize {
        self.nnz.saturating_sub(self.base_nnz)
    }

    /// Solves `B v' = v` in place.
    pub fn ftran(&self, v: &mut [S]) {
        debug_assert_eq!(v.len(), self.m);
        for x in v.iter_mut() {
            *x = -*x;
        }
        for eta in &self.etas {
            let vp = v[eta.pivot];
            if vp == S::zero() {
                continue;
            }
            let vp = vp / eta.pivot_val;
            v[eta.pivot] = vp;
            for &(i, a) in &eta.entries {
                v[i] = v[i] - a * vp;
            }
        }
    }

    /// Solves `y' B = y` in place.
    pub fn btran(&self, y: &mut [S]) {
        debug_assert_eq!(y.len(), self.m);
        for eta in self.etas.iter().rev() {
            let mut acc = y[eta.pivot];
            for &(i, a) in &eta.entries {
                acc = acc - a * y[i];
            }
            y[eta.pivot] = acc / eta.pivot_val;
        }
        for x in y.iter_mut() {
            *x = -*x;
        }
    }

    /// Records that the column whose FTRAN image is `alpha` replaced the
    /// basic variable at `pivot`.
    pub fn push_update(&mut self, alpha: &[S], pivot: usize, drop_tol: S) {
        let entries: Vec<(usize, S)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != pivot && a.abs() > drop_tol)
            .map(|(i, &a)| (i, a))
            .collect();
        self.nnz += entries.len() + 1;
        self.etas.push(Eta {
            pivot,
            pivot_val: alpha[pivot],
            entries,
        });
    }

    /// Rebuilds the factorization for the basis made of the logicals of
    /// `logical_rows` plus `structural` columns (sparse, row-indexed).
    ///
    /// Returns the basis position assigned to every structural column. A
    /// column that turns out dependent gets `None`; its position keeps the
    /// row's logical, so the returned factor is always valid for the basis
    /// made of the placed columns plus logicals everywhere else.
    pub fn refactor(
        m: usize,
        logical_rows: &[bool],
        structural: &[&[(usize, S)]],
        pivot_tol: S,
    ) -> (Self, Vec<Option<usize>>) {
        let mut f = Self::identity(m);
        let mut free_row: Vec<bool> = logical_rows.iter().map(|&l| !l).collect();

        // Row counts over the structural part restricted to free rows, used
        // as a Markowitz-style tie-breaker.
        let mut row_count = vec![0usize; m];
        for col in structural {
            for &(i, _) in col.iter() {
                row_count[i] += 1;
            }
        }

        let mut order: Vec<usize> = (0..structural.len()).collect();
        order.sort_by_key(|&k| (structural[k].iter().filter(|(i, _)| free_row[*i]).count(), k));

        let mut positions: Vec<Option<usize>> = vec![None; structural.len()];
        let mut work = vec![S::zero(); m];
        for &k in &order {
            for x in work.iter_mut() {
                *x = S::zero();
            }
            for &(i, a) in structural[k] {
                work[i] = work[i] + a;
            }
            f.ftran(&mut work);
            let mut best = S::zero();
            for (i, &v) in work.iter().enumerate() {
                if free_row[i] && v.abs() > best {
                    best = v.abs();
                }
            }
            if best <= pivot_tol {
                continue;
            }
            let threshold = best * S::lit(0.1);
            let mut pick = usize::MAX;
            let mut pick_count = usize::MAX;
            for (i, &v) in work.iter().enumerate() {
                if free_row[i] && v.abs() >= threshold && row_count[i] < pick_count {
                    pick = i;
                    pick_count = row_count[i];
                }
            }
            free_row[pick] = false;
            for &(i, _) in structural[k] {
                row_count[i] = row_count[i].saturating_sub(1);
            }
            positions[k] = Some(pick);
            f.push_update(&work, pick, S::lit(1e-14));
        }
        f.base_len = f.etas.len();
        f.base_nnz = f.nnz;
        (f, positions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(b: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
        // Gaussian elimination with partial pivoting, test-only.
        let n = rhs.len();
        let mut a: Vec<Vec<f64>> = b.to_vec();
        let mut x = rhs.to_vec();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
            a.swap(c, p);
            x.swap(c, p);
            for r in c + 1..n {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                x[r] -= f * x[c];
            }
        }
        for c in (0..n).rev() {
            for k in c + 1..n {
                x[c] -= a[c][k] * x[k];
            }
            x[c] /= a[c][c];
        }
        x
    }

    #[test]
    fn refactor_then_solve_matches_dense() {
        // rows 0..3; basis = logical of row 1, structurals col A and col B.
        let col_a = vec![(0, 2.0), (1, 1.0), (2, 1.0)];
        let col_b = vec![(0, 1.0), (2, 3.0)];
        let (f, pos) = Factor::<f64>::refactor(3, &[false, true, false], &[&col_a, &col_b], 1e-12);
        let pos: Vec<usize> = pos.into_iter().map(Option::unwrap).collect();
        // Assemble B column by position.
        let mut b = vec![vec![0.0; 3]; 3];
        b[1][1] = -1.0;
        for (col, &p) in [&col_a, &col_b].iter().zip(&pos) {
            for &(i, a) in col.iter() {
                b[i][p] = a;
            }
        }
        let rhs = [1.0, -2.0, 0.5];
        let mut v = rhs.to_vec();
        f.ftran(&mut v);
        let expect = dense_solve(&b, &rhs);
        for (x, y) in v.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-12);
        }
        // btran: y^T B = rhs^T  <=>  B^T y = rhs
        let bt: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| b[j][i]).collect()).collect();
        let mut y = rhs.to_vec();
        f.btran(&mut y);
        let expect = dense_solve(&bt, &rhs);
        for (x, e) in y.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_columns_reported() {
        let col_a = vec![(0, 1.0), (1, 1.0)];
        let col_b = vec![(0, 2.0), (1, 2.0)];
        let (_, pos) = Factor::<f64>::refactor(2, &[false, false], &[&col_a, &col_b], 1e-12);
        assert_eq!(pos.iter().filter(|p| p.is_none()).count(), 1);
    }
}
