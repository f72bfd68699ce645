//! Dense two-phase simplex over the rationals with Bland's pivoting rule.
//!
//! Problems are posed in equality standard form
//!
//! ```text
//! maximize  c·x   subject to  A x = b,  x >= 0
//! ```
//!
//! Sizes in this crate are tiny (a handful of rows, at most a few dozen
//! columns), so a dense tableau of big rationals is perfectly adequate.

use num_traits::{One, Signed, Zero};

use super::Rat;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the right-hand side.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs primal simplex on the objective `obj` restricted to columns for
    /// which `allowed` holds. Returns `false` when the objective is unbounded.
    fn optimize(&mut self, obj: &[Rat], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            // Bland: lowest-index column with positive reduced cost enters.
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = obj[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() {
                        reduced -= &obj[bj] * &self.rows[i][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(col) = entering else {
                return true;
            };

            // Ratio test; ties broken by lowest basic variable index.
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Maximizes `c·x` subject to `A x = b`, `x >= 0`.
///
/// `a` is given row-major with `a.len() == b.len()` and every row of length
/// `c.len()`.
pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert_eq!(b.len(), m);
    debug_assert!(a.iter().all(|r| r.len() == n));

    // Phase one: artificial variable per row, rows sign-normalized so b >= 0.
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = Vec::with_capacity(cols + 1);
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..m {
            r.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        r.push(if flip { -bi.clone() } else { bi.clone() });
        rows.push(r);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cols,
    };

    let mut phase1 = vec![Rat::zero(); cols];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rat::one();
    }
    tab.optimize(&phase1, &|_| true);
    let infeasible = tab
        .basis
        .iter()
        .enumerate()
        .any(|(i, &bj)| bj >= n && !tab.rhs(i).is_zero());
    if infeasible {
        return LpOutcome::Infeasible;
    }

    // Drive remaining (zero-level) artificials out of the basis; rows where
    // that is impossible are redundant and dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut obj = c.to_vec();
    obj.resize(cols, Rat::zero());
    if !tab.optimize(&obj, &|j| j < n) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rat::zero(); n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn rows(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter()
            .map(|row| row.iter().map(|&x| r(x)).collect())
            .collect()
    }

    #[test]
    fn textbook_optimum() {
        // max 3x + 2y, x + y + s1 = 4, x + 3y + s2 = 6
        let a = rows(&[&[1, 1, 1, 0], &[1, 3, 0, 1]]);
        let b = vec![r(4), r(6)];
        let c = vec![r(3), r(2), r(0), r(0)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, r(12));
                assert_eq!(x[0], r(4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = rows(&[&[1, 1]]);
        assert_eq!(maximize(&a, &[r(-1)], &[r(0), r(0)]), LpOutcome::Infeasible);
        let a = rows(&[&[1, -1]]);
        assert_eq!(maximize(&a, &[r(0)], &[r(1), r(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = rows(&[&[1, 1], &[2, 2]]);
        let b = vec![r(2), r(4)];
        match maximize(&a, &b, &[r(1), r(0)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance, with slacks.
        let q = |n: i64, d: i64| Rat::new(n.into(), d.into());
        let a = vec![
            vec![q(1, 4), q(-8, 1), q(-1, 1), q(9, 1), r(1), r(0), r(0)],
            vec![q(1, 2), q(-12, 1), q(-1, 2), q(3, 1), r(0), r(1), r(0)],
            vec![r(0), r(0), r(1), r(0), r(0), r(0), r(1)],
        ];
        let b = vec![r(0), r(0), r(1)];
        let c = vec![q(3, 4), q(-20, 1), q(1, 2), q(-6, 1), r(0), r(0), r(0)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(5, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
