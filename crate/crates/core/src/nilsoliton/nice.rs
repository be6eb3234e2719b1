//! Nice bases and the combinatorial nilsoliton criterion `U v = [1]`, `v > 0`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::lp::{maximize, LpOutcome};
use crate::algebra::TwoStepAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Q};

/// Each pencil entry is a multiple of a single variable, and no variable
/// repeats within a row.
pub fn has_nice_basis<S: Scalar>(alg: &TwoStepAlgebra<S>) -> bool {
    let mut per_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut per_row: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(i, j, k) in alg.constants().keys() {
        let count = per_pair.entry((i, j)).or_insert(0);
        *count += 1;
        if *count > 1 {
            return false;
        }
        if !per_row.insert((i, k)) || !per_row.insert((j, k)) {
            return false;
        }
    }
    true
}

/// Nice, with every row of the pencil having the same number of nonzero entries.
pub fn is_uniform<S: Scalar>(alg: &TwoStepAlgebra<S>) -> bool {
    if !has_nice_basis(alg) {
        return false;
    }
    let mut support = vec![0usize; alg.m()];
    for &(i, j, _) in alg.constants().keys() {
        support[i] += 1;
        support[j] += 1;
    }
    support.windows(2).all(|w| w[0] == w[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct NikolayevskyData {
    /// Index triples `(i, j, k)`, `i < j`, with nonzero constant (0-based).
    pub triples: Vec<(usize, usize, usize)>,
    /// Gram matrix of the vectors `e_i + e_j - e_{m+k}`.
    pub u: Vec<Vec<i64>>,
    /// A strictly positive solution of `U v = [1]`, if one exists.
    pub solution: Option<Vec<Q>>,
}

impl NikolayevskyData {
    pub fn admits_nilsoliton(&self) -> bool {
        self.solution.is_some()
    }
}

/// For an algebra given in a nice basis, a nilsoliton exists iff `U v = [1]`
/// has a strictly positive solution. Solved exactly: directly when `U` is
/// invertible, otherwise by maximizing `t` subject to `U v = [1]`, `v >= t`, `t <= 1`.
pub fn nikolayevsky_test<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<NikolayevskyData> {
    if !has_nice_basis(alg) {
        return Err(Error::NoNiceBasis);
    }
    let triples: Vec<(usize, usize, usize)> = alg.constants().keys().copied().collect();
    let q = triples.len();
    let u: Vec<Vec<i64>> = triples
        .iter()
        .map(|&(i, j, k)| {
            triples
                .iter()
                .map(|&(a, b, c)| {
                    let shared = [i, j].iter().filter(|x| **x == a || **x == b).count();
                    (shared + usize::from(k == c)) as i64
                })
                .collect()
        })
        .collect();
    let um = Matrix::from_fn(q, q, |r, c| Q::from_i64(u[r][c]));
    let ones = vec![Q::one(); q];
    let solution = match um.inverse() {
        Ok(inv) => {
            let v: Vec<Q> = (0..q).map(|r| (0..q).map(|c| inv[(r, c)].clone()).sum()).collect();
            v.iter().all(|x| x.is_positive()).then_some(v)
        }
        Err(_) => positive_solution(&um, &ones),
    };
    Ok(NikolayevskyData { triples, u, solution })
}

/// Substituting `v = s + t [1]` with `s >= 0`: maximize `t` with `U s + t U[1] = [1]`, `t + r = 1`.
fn positive_solution(u: &Matrix<Q>, ones: &[Q]) -> Option<Vec<Q>> {
    let q = u.rows();
    let row_sums: Vec<Q> = (0..q).map(|r| u.row(r).iter().sum()).collect();
    let a = Matrix::from_fn(q + 1, q + 2, |r, c| {
        if r < q {
            if c < q {
                u[(r, c)].clone()
            } else if c == q {
                row_sums[r].clone()
            } else {
                Q::zero()
            }
        } else if c >= q {
            Q::one()
        } else {
            Q::zero()
        }
    });
    let mut b = ones.to_vec();
    b.push(Q::one());
    let mut cost = vec![Q::zero(); q + 2];
    cost[q] = Q::one();
    match maximize(&a, &b, &cost) {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let t = x[q].clone();
            Some(x[..q].iter().map(|s| s + &t).collect())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_criterion() {
        let alg = TwoStepAlgebra::from_brackets(2, 1, [(0, 1, 0, 1.0)]).unwrap();
        let data = nikolayevsky_test(&alg).unwrap();
        assert_eq!(data.u, vec![vec![3]]);
        assert_eq!(data.solution, Some(vec![Q::from_ratio(1, 3)]));
        assert!(is_uniform(&alg));
    }

    #[test]
    fn repeated_variable_in_a_row_is_not_nice() {
        let alg = TwoStepAlgebra::from_brackets(3, 1, [(0, 1, 0, 1.0), (0, 2, 0, 1.0)]).unwrap();
        assert!(!has_nice_basis(&alg));
        assert_eq!(nikolayevsky_test(&alg), Err(Error::NoNiceBasis));
    }

    #[test]
    fn mixed_row_support_is_not_uniform() {
        // [X1, X2] = Z1, [X1, X3] = Z2: row 1 has two entries, rows 2 and 3 one each.
        let alg = TwoStepAlgebra::from_brackets(3, 2, [(0, 1, 0, 1.0), (0, 2, 1, 1.0)]).unwrap();
        assert!(has_nice_basis(&alg));
        assert!(!is_uniform(&alg));
    }

    #[test]
    fn singular_u_uses_the_program() {
        // Singular U = [[3, 3], [3, 3]]: the solutions are v1 + v2 = 1/3.
        let u = Matrix::from_fn(2, 2, |_, _| Q::from_i64(3));
        let sol = positive_solution(&u, &[Q::one(), Q::one()]).unwrap();
        let total: Q = sol.iter().sum();
        assert_eq!(total * Q::from_i64(3), Q::one());
        assert!(sol.iter().all(|x| x.is_positive()));
    }
}
