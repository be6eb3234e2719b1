use serde::Serialize;

use super::set::{build_pencil_algebra, is_nonsingular_pencil, ComplexPair, PencilSet, RealPair, RealPoint};
use super::mobius::MATCH_TOL;
use crate::algebra::TwoStepAlgebra;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NilsolitonAnswer {
    Yes,
    No,
    /// Only real points, fewer than three of them.
    OutOfScope,
}

/// Nilsoliton classification of `mu_S`.
///
/// Nonsingular sets admit one iff every complex multiplicity is 1. With `r`
/// complex and `u` real pairs and `r > 0` or `u >= 3`, one exists iff all
/// multiplicities are 1 and each real point is repeated fewer than `r + u/2`
/// times; odd blocks do not enter the condition.
pub fn pencil_admits_nilsoliton<S: Scalar>(s: &PencilSet<S>) -> NilsolitonAnswer {
    let answer = |ok: bool| if ok { NilsolitonAnswer::Yes } else { NilsolitonAnswer::No };
    let all_simple = s.complex().iter().all(|p| p.k == 1);
    if is_nonsingular_pencil(s) {
        return answer(all_simple);
    }
    let (r, u) = (s.complex().len(), s.real().len());
    if r == 0 && u < 3 {
        return NilsolitonAnswer::OutOfScope;
    }
    let bounded = s.real().iter().all(|p| {
        let repeats = s.real().iter().filter(|q| q.a.approx_eq(&p.a, MATCH_TOL)).count();
        2 * repeats < 2 * r + u
    });
    answer(all_simple && s.real().iter().all(|p| p.j == 1) && bounded)
}

#[derive(Clone, Debug)]
pub struct Degeneration {
    /// `phi_t . mu_S`.
    pub algebra: TwoStepAlgebra<f64>,
    /// `X_i -> X_{permutation[i]}` aligns the `t -> infinity` limit with the
    /// algebra built from `k` simple copies of the point.
    pub permutation: Vec<usize>,
    /// The limit set `{(alpha, 1), ..., (alpha, 1)}`.
    pub limit: PencilSet<f64>,
}

/// For `S = {(alpha, k)}`, rescales `X_1, ..., X_4k` by a diagonal element of
/// `SL_4k` so that the blocks coupling consecutive copies of `alpha` decay like
/// `e^(-2t)` while the diagonal blocks stay fixed.
pub fn degeneration_family<S: Scalar>(s: &PencilSet<S>, t: f64) -> Result<Degeneration> {
    let [p] = s.complex() else {
        return Err(Error::Precondition("degeneration needs a single complex pair".into()));
    };
    if !s.real().is_empty() || !s.eps().is_empty() {
        return Err(Error::Precondition("degeneration needs a single complex pair".into()));
    }
    let k = p.k;
    let m = 4 * k;
    // Row pair r and column pair c of the upper-right block both get exponent t (k + 1 - 2 r).
    let exponent = |i: usize| {
        let pair = if i < 2 * k { i / 2 } else { (i - 2 * k) / 2 };
        t * (k as f64 - 1.0 - 2.0 * pair as f64)
    };
    // phi_t . mu with psi = diag(e^-s): J(Z) becomes Psi^T J(Z) Psi, Psi = diag(e^s).
    let base = build_pencil_algebra(s).to_float();
    let brackets = base.constants().iter().map(|(&(i, j, l), c)| (i, j, l, c * (exponent(i) + exponent(j)).exp()));
    let algebra = TwoStepAlgebra::from_brackets(m, 2, brackets)?;
    let permutation = (0..m)
        .map(|i| {
            if i < 2 * k {
                4 * (i / 2) + i % 2
            } else {
                let c = (i - 2 * k) / 2;
                4 * (k - 1 - c) + 2 + i % 2
            }
        })
        .collect();
    let limit = PencilSet::from_complex(&vec![(p.re.to_f64(), p.im.to_f64(), 1); k])?;
    Ok(Degeneration { algebra, permutation, limit })
}

/// The one-parameter families of indecomposable algebras without nilsolitons,
/// numbered 1 to 6, each with `r >= 1` repeated simple points and `t > 1`.
pub fn curves_family<S: Scalar>(item: usize, r: usize, t: S) -> Result<PencilSet<S>> {
    if r == 0 {
        return Err(Error::OutOfRange("r must be at least 1".into()));
    }
    if t.to_f64() <= 1.0 {
        return Err(Error::OutOfRange("t must exceed 1".into()));
    }
    let cp = |im: S, k| ComplexPair { re: S::zero(), im, k };
    let rp = |a: i64, j| RealPair { a: RealPoint::Finite(S::from_i64(a)), j };
    let (complex, real, eps) = match item {
        1 | 2 => {
            let mut real = vec![rp(0, 2)];
            real.extend((0..r).map(|_| rp(1, 1)));
            (vec![cp(t, 1)], real, if item == 2 { vec![1] } else { vec![] })
        }
        3..=6 => {
            let mut complex = vec![cp(t, 2)];
            complex.extend((0..r).map(|_| cp(S::one(), 1)));
            let real = if item == 4 || item == 5 { vec![rp(0, 1)] } else { vec![] };
            let eps = if item == 4 || item == 6 { vec![1] } else { vec![] };
            (complex, real, eps)
        }
        _ => return Err(Error::Unknown(format!("curve family {item} (expected 1 to 6)"))),
    };
    PencilSet::new(complex, real, eps)
}

/// `{(i, 2), (i t_1, 1), ..., (i t_k, 1)}`.
pub fn multi_parameter_family<S: Scalar>(ts: &[S]) -> Result<PencilSet<S>> {
    let mut points = vec![(S::zero(), S::one(), 2)];
    points.extend(ts.iter().map(|t| (S::zero(), t.clone(), 1)));
    PencilSet::from_complex(&points)
}
