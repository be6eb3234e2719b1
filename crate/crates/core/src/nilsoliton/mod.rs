//! Moment map on the space of 2-step brackets, Ricci operator, the
//! nilsoliton condition and the routes for deciding it.

mod flow;
mod lp;
mod nice;

use serde::Serialize;

use crate::algebra::TwoStepAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{cluster_sorted, symmetric_eigenvalues, Matrix};
use crate::scalar::Scalar;

pub use flow::{
    form_flow, gradient_flow, random_perturbation, run_flow, AlgebraState, FlowOptions, FlowOutcome, FlowReport,
    FlowState, FlowVerdict, FormState,
};
pub use lp::{maximize, LpOutcome};
pub use nice::{has_nice_basis, is_uniform, nikolayevsky_test, NikolayevskyData};

/// `m1 = (2 / ||mu||^2) sum_k J(Z_k)^2` and `(m2)_kl = -tr(J(Z_k) J(Z_l)) / ||mu||^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentPair<S> {
    pub m1: Matrix<S>,
    pub m2: Matrix<S>,
}

impl<S: Scalar> MomentPair<S> {
    pub fn to_float(&self) -> MomentPair<f64> {
        MomentPair { m1: self.m1.to_f64(), m2: self.m2.to_f64() }
    }
}

/// `sum_k J(Z_k)^2` and the Gram matrix `tr(J(Z_k) J(Z_l))`.
fn j_sums<S: Scalar>(alg: &TwoStepAlgebra<S>) -> (Matrix<S>, Matrix<S>) {
    let js = alg.j_matrices();
    let m = alg.m();
    let mut sq = Matrix::zeros(m, m);
    for j in &js {
        sq = sq.add(&j.mul(j));
    }
    let n = alg.n();
    let mut gram = Matrix::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            // tr(A B) for skew A, B equals -sum_ij A_ij B_ij.
            let mut t = S::zero();
            for i in 0..m {
                for jj in 0..m {
                    let a = &js[k][(i, jj)];
                    if !a.is_zero() {
                        t = t - a.clone() * js[l][(i, jj)].clone();
                    }
                }
            }
            gram[(k, l)] = t.clone();
            gram[(l, k)] = t;
        }
    }
    (sq, gram)
}

pub fn moment_map<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<MomentPair<S>> {
    if alg.is_zero() {
        return Err(Error::ZeroInput("moment map of the zero bracket".into()));
    }
    let norm = alg.norm_sq();
    let (sq, gram) = j_sums(alg);
    Ok(MomentPair {
        m1: sq.scale(&(S::from_i64(2) / norm.clone())),
        m2: gram.scale(&(-S::one() / norm)),
    })
}

/// Ricci operator of the metric making the standard basis orthonormal:
/// `(||mu||^2 / 4) (m1 + m2)` as a block-diagonal matrix.
pub fn ricci<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<Matrix<S>> {
    let mp = moment_map(alg)?;
    let c = alg.norm_sq() / S::from_i64(4);
    Ok(mp.m1.direct_sum(&mp.m2).scale(&c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum NilsolitonCheck {
    /// `sum_k J(Z_k)^2 = a I` and `tr J(Z_k) J(Z_l) = b delta_kl`.
    Holds { a: f64, b: f64 },
    /// Relative Frobenius distances of the two matrices from scalar matrices.
    Fails { m1_residual: f64, m2_residual: f64 },
}

impl NilsolitonCheck {
    pub fn holds(&self) -> bool {
        matches!(self, NilsolitonCheck::Holds { .. })
    }
}

/// Scalar part `tr(M) / size` and relative distance of `M` from it.
fn scalar_fit<S: Scalar>(mat: &Matrix<S>) -> (S, S, f64) {
    let size = mat.rows();
    let c = mat.trace() / S::from_i64(size as i64);
    let diff = mat.sub(&Matrix::identity(size).scale(&c));
    let r = diff.frobenius_sq();
    let total = mat.frobenius_sq().to_f64();
    let rel = if total > 0.0 { (r.to_f64() / total).sqrt() } else { 0.0 };
    (c, r, rel)
}

/// Tests `sum J(Z_i)^2 = a I`, `tr J(Z_i) J(Z_j) = b delta_ij` with `a, b < 0` in the
/// standard basis. Rationals are tested exactly; floats up to relative `tol`.
pub fn check_nilso<S: Scalar>(alg: &TwoStepAlgebra<S>, tol: f64) -> NilsolitonCheck {
    if alg.is_zero() {
        return NilsolitonCheck::Fails { m1_residual: f64::INFINITY, m2_residual: f64::INFINITY };
    }
    let (sq, gram) = j_sums(alg);
    let (a, r1, rel1) = scalar_fit(&sq);
    let (b, r2, rel2) = scalar_fit(&gram);
    let exact_ok = |r: &S, rel: f64| r.is_zero() || (S::KIND == crate::scalar::ScalarKind::Float && rel <= tol);
    if exact_ok(&r1, rel1) && exact_ok(&r2, rel2) && a.sign() < 0 && b.sign() < 0 {
        NilsolitonCheck::Holds { a: a.to_f64(), b: b.to_f64() }
    } else {
        NilsolitonCheck::Fails { m1_residual: rel1, m2_residual: rel2 }
    }
}

/// Whether the Ricci spectrum has exactly two distinct values, clustering
/// eigenvalues within `tol` times the spectral range.
pub fn ricci_two_eigenvalues<S: Scalar>(alg: &TwoStepAlgebra<S>, tol: f64) -> Result<bool> {
    let ev = symmetric_eigenvalues(&ricci(alg)?);
    let range = ev.last().unwrap() - ev.first().unwrap();
    Ok(cluster_sorted(&ev, tol * range.max(f64::MIN_POSITIVE)).len() == 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn heis() -> TwoStepAlgebra<Q> {
        TwoStepAlgebra::from_brackets(2, 1, [(0, 1, 0, Q::from_i64(1))]).unwrap()
    }

    #[test]
    fn heisenberg_moment_and_ricci() {
        let mp = moment_map(&heis()).unwrap();
        assert_eq!(mp.m1, Matrix::identity(2).scale(&Q::from_i64(-1)));
        assert_eq!(mp.m2, Matrix::identity(1));
        let ric = ricci(&heis()).unwrap();
        let h = Q::from_ratio(1, 2);
        assert_eq!(ric, Matrix::diagonal(&[-h.clone(), -h.clone(), h]));
        assert_eq!(check_nilso(&heis(), 1e-9), NilsolitonCheck::Holds { a: -1.0, b: -2.0 });
        assert!(ricci_two_eigenvalues(&heis(), 1e-8).unwrap());
    }

    #[test]
    fn zero_bracket_has_no_moment() {
        assert!(moment_map(&TwoStepAlgebra::<f64>::zero(2, 1)).is_err());
    }
}
