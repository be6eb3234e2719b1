use std::collections::HashMap;

use super::HomogeneousForm;
use crate::algebra::{SkewMatrixPencil, TwoStepAlgebra};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The Pfaffian form `f` with `f^2 = det J(x_1 Z_1 + ... + x_n Z_n)`, normalized so that
/// the block-diagonal matrix with blocks `[[0, 1], [-1, 0]]` has Pfaffian `+1`.
pub fn pfaffian_form<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<HomogeneousForm<S>> {
    pfaffian_of_pencil(&alg.j_pencil())
}

pub fn pfaffian_of_pencil<S: Scalar>(pencil: &SkewMatrixPencil<S>) -> Result<HomogeneousForm<S>> {
    let m = pencil.m;
    if m % 2 == 1 {
        return Err(Error::OddDimension(m));
    }
    if m > 64 {
        return Err(Error::OutOfRange(format!("Pfaffian expansion limited to m <= 64, got {m}")));
    }
    let n = pencil.n;
    let mut entries: Vec<Vec<Option<HomogeneousForm<S>>>> = vec![vec![None; m]; m];
    for (&(r, c, k), v) in &pencil.entries {
        if r < c {
            let mut coeffs = vec![S::zero(); n];
            coeffs[k] = v.clone();
            let lin = HomogeneousForm::linear(&coeffs);
            let slot = &mut entries[r][c];
            *slot = Some(match slot.take() {
                Some(prev) => prev.add(&lin),
                None => lin,
            });
        }
    }
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut memo = HashMap::new();
    Ok(expand(full, &entries, n, &mut memo))
}

/// Laplace expansion along the first remaining index, memoized on the index set.
fn expand<S: Scalar>(
    set: u64,
    entries: &[Vec<Option<HomogeneousForm<S>>>],
    n: usize,
    memo: &mut HashMap<u64, HomogeneousForm<S>>,
) -> HomogeneousForm<S> {
    if set == 0 {
        return HomogeneousForm::constant(n, S::one());
    }
    if let Some(f) = memo.get(&set) {
        return f.clone();
    }
    let size = set.count_ones();
    let first = set.trailing_zeros() as usize;
    let rest = set & !(1u64 << first);
    let mut acc = HomogeneousForm::zero(n, size / 2);
    let mut pos = 0;
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        pos += 1;
        if let Some(b) = &entries[first][j] {
            let sub = expand(rest & !(1u64 << j), entries, n, memo);
            if !sub.is_zero() {
                let term = b.mul(&sub);
                // The partner sits at 1-based position pos + 1, giving sign (-1)^(pos + 1).
                acc = if pos % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
            }
        }
    }
    memo.insert(set, acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    #[test]
    fn two_by_two_base_case() {
        let alg = TwoStepAlgebra::from_brackets(2, 1, [(0, 1, 0, Q::from_i64(-1))]).unwrap();
        // J(x Z_1) = [[0, x], [-x, 0]]
        let f = pfaffian_form(&alg).unwrap();
        assert_eq!(f, HomogeneousForm::variable(1, 0));
    }

    #[test]
    fn odd_size_is_rejected() {
        let alg = TwoStepAlgebra::<Q>::zero(3, 1);
        assert_eq!(pfaffian_form(&alg), Err(Error::OddDimension(3)));
    }

    #[test]
    fn four_by_four_matches_formula() {
        // Pf = b12 b34 - b13 b24 + b14 b23
        let brackets = [(0, 1, 0, 2i64), (2, 3, 0, 3), (0, 2, 0, 5), (1, 3, 0, 7), (0, 3, 0, 11), (1, 2, 0, 13)];
        let alg = TwoStepAlgebra::from_brackets(4, 1, brackets.iter().map(|&(i, j, k, c)| (i, j, k, Q::from_i64(c)))).unwrap();
        let f = pfaffian_form(&alg).unwrap();
        // b_ij = -c_ij
        let expected = 2 * 3 - 5 * 7 + 11 * 13;
        assert_eq!(f.coeff(&[2]), Q::from_i64(expected));
    }
}
