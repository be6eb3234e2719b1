//! Exact two-phase simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::linalg::Matrix;
use crate::scalar::Q;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<Q>, value: Q },
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        self.rows[i].last().unwrap()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . x` over columns `0..ncols`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Q], ncols: usize) -> bool {
        loop {
            let entering = (0..ncols).find(|&j| {
                let z: Q = self.basis.iter().zip(&self.rows).map(|(&b, row)| &cost[b] * &row[j]).sum();
                z < cost[j]
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, j);
        }
    }
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0`.
pub fn maximize(a: &Matrix<Q>, b: &[Q], c: &[Q]) -> LpOutcome {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Q> = (0..n).map(|j| if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect() };

    let mut phase1 = vec![Q::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = -Q::one();
    }
    t.optimize(&phase1, n + m);
    let infeasibility: Q = t.basis.iter().enumerate().filter(|(_, &b)| b >= n).map(|(i, _)| t.rhs(i).clone()).sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for row in t.rows.iter_mut() {
        let rhs = row.pop().unwrap();
        row.truncate(n);
        row.push(rhs);
    }
    if !t.optimize(c, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        x[bcol] = t.rhs(i).clone();
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { x, value }
}
