//! 2-step nilpotent algebras stored as structure constants `mu(X_i, X_j) = sum_k c_ijk Z_k`.
//!
//! Indices are 0-based internally; JSON and the CLI use 1-based indices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polynomials::{is_positive_form, pfaffian_form, PositivityOptions, Verdict};
use crate::scalar::{Scalar, ScalarKind};

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepAlgebra<S> {
    m: usize,
    n: usize,
    /// `(i, j, k) -> mu_ij^k` with `i < j`; zero coefficients are never stored.
    constants: BTreeMap<(usize, usize, usize), S>,
}

/// The pencil `J(x_1 Z_1 + ... + x_n Z_n)` as a sparse map `(row, col, var) -> coefficient`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrixPencil<S> {
    pub m: usize,
    pub n: usize,
    pub entries: BTreeMap<(usize, usize, usize), S>,
}

impl<S: Scalar> SkewMatrixPencil<S> {
    pub fn entry(&self, row: usize, col: usize, var: usize) -> S {
        self.entries.get(&(row, col, var)).cloned().unwrap_or_else(S::zero)
    }

    /// The matrix obtained by substituting `x = z`.
    pub fn evaluate(&self, z: &[S]) -> Matrix<S> {
        assert_eq!(z.len(), self.n);
        let mut out: Matrix<S> = Matrix::zeros(self.m, self.m);
        for (&(r, c, k), v) in &self.entries {
            out[(r, c)] = out[(r, c)].clone() + v.clone() * z[k].clone();
        }
        out
    }
}

/// A pair `(psi, phi) in GL_m x GL_n`.
#[derive(Clone, Debug)]
pub struct GroupElement<S> {
    psi: Matrix<S>,
    phi: Matrix<S>,
    psi_inv: Matrix<S>,
}

impl<S: Scalar> GroupElement<S> {
    pub fn new(psi: Matrix<S>, phi: Matrix<S>) -> Result<Self> {
        if !psi.is_square() || !phi.is_square() {
            return Err(Error::WrongShape("group element factors must be square".into()));
        }
        phi.inverse()?;
        let psi_inv = psi.inverse()?;
        Ok(Self { psi, phi, psi_inv })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        Self { psi: Matrix::identity(m), phi: Matrix::identity(n), psi_inv: Matrix::identity(m) }
    }

    pub fn psi(&self) -> &Matrix<S> {
        &self.psi
    }

    pub fn phi(&self) -> &Matrix<S> {
        &self.phi
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(self.psi.mul(&other.psi), self.phi.mul(&other.phi))
    }
}

impl<S: Scalar> TwoStepAlgebra<S> {
    pub fn zero(m: usize, n: usize) -> Self {
        Self { m, n, constants: BTreeMap::new() }
    }

    /// Builds an algebra from 0-based brackets `(i, j, k, c)` with `i < j`.
    /// Rejects out-of-range indices and repeated `(i, j, k)`.
    pub fn from_brackets(
        m: usize,
        n: usize,
        brackets: impl IntoIterator<Item = (usize, usize, usize, S)>,
    ) -> Result<Self> {
        let mut alg = Self::zero(m, n);
        for (i, j, k, c) in brackets {
            if i >= j {
                return Err(Error::InvalidAlgebra(format!("bracket ({}, {}) needs i < j", i + 1, j + 1)));
            }
            if j >= m || k >= n {
                return Err(Error::InvalidAlgebra(format!(
                    "index out of range in bracket ({}, {}, {}) for type ({n}, {m})",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if alg.constants.contains_key(&(i, j, k)) {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate bracket ({}, {}, {})",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if !c.negligible() {
                alg.constants.insert((i, j, k), c);
            }
        }
        Ok(alg)
    }

    /// Reads the structure constants off the matrices `J(Z_k)`, which must be skew.
    pub fn from_j_matrices(m: usize, js: &[Matrix<S>]) -> Result<Self> {
        let mut alg = Self::zero(m, js.len());
        for (k, jk) in js.iter().enumerate() {
            if jk.rows() != m || jk.cols() != m {
                return Err(Error::WrongShape(format!("J(Z_{}) is not {m}x{m}", k + 1)));
            }
            if !jk.is_skew(1e-12) {
                return Err(Error::InvalidAlgebra(format!("J(Z_{}) is not skew-symmetric", k + 1)));
            }
            for i in 0..m {
                for j in i + 1..m {
                    let c = -jk[(i, j)].clone();
                    if !c.negligible() {
                        alg.constants.insert((i, j, k), c);
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    /// Stored constants `(i, j, k) -> c` with `i < j`.
    pub fn constants(&self) -> &BTreeMap<(usize, usize, usize), S> {
        &self.constants
    }

    /// `mu_ij^k` for any `i, j` (antisymmetric).
    pub fn constant(&self, i: usize, j: usize, k: usize) -> S {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.constants.get(&(i, j, k)).cloned().unwrap_or_else(S::zero),
            std::cmp::Ordering::Greater => {
                -self.constants.get(&(j, i, k)).cloned().unwrap_or_else(S::zero)
            }
            std::cmp::Ordering::Equal => S::zero(),
        }
    }

    pub fn j_pencil(&self) -> SkewMatrixPencil<S> {
        let mut entries = BTreeMap::new();
        for (&(i, j, k), c) in &self.constants {
            entries.insert((i, j, k), -c.clone());
            entries.insert((j, i, k), c.clone());
        }
        SkewMatrixPencil { m: self.m, n: self.n, entries }
    }

    /// The matrix of `J(Z_k)`.
    pub fn j_matrix(&self, k: usize) -> Matrix<S> {
        let mut out = Matrix::zeros(self.m, self.m);
        for (&(i, j, kk), c) in &self.constants {
            if kk == k {
                out[(i, j)] = -c.clone();
                out[(j, i)] = c.clone();
            }
        }
        out
    }

    pub fn j_matrices(&self) -> Vec<Matrix<S>> {
        (0..self.n).map(|k| self.j_matrix(k)).collect()
    }

    /// `J(z_1 Z_1 + ... + z_n Z_n)`.
    pub fn j_eval(&self, z: &[S]) -> Matrix<S> {
        self.j_pencil().evaluate(z)
    }

    pub fn scale(&self, c: &S) -> Self {
        let constants = self
            .constants
            .iter()
            .map(|(key, v)| (*key, v.clone() * c.clone()))
            .filter(|(_, v)| !v.negligible())
            .collect();
        Self { m: self.m, n: self.n, constants }
    }

    pub fn norm_sq(&self) -> S {
        algebra_inner(self, self).expect("same shape")
    }

    pub fn to_float(&self) -> TwoStepAlgebra<f64> {
        TwoStepAlgebra {
            m: self.m,
            n: self.n,
            constants: self
                .constants
                .iter()
                .map(|(key, v)| (*key, v.to_f64()))
                .filter(|(_, v)| !v.negligible())
                .collect(),
        }
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        S::KIND
    }

    /// Entrywise comparison of constants within `tol` (exact for rationals).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.m != other.m || self.n != other.n {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.constants.keys().chain(other.constants.keys()).collect();
        keys.into_iter().all(|&(i, j, k)| self.constant(i, j, k).approx_eq(&other.constant(i, j, k), tol))
    }

    /// Largest absolute difference between structure constants.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<_> =
            self.constants.keys().chain(other.constants.keys()).collect();
        keys.into_iter()
            .map(|&(i, j, k)| (self.constant(i, j, k) - other.constant(i, j, k)).to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Relabels `X_i -> X_{perm[i]}` and `Z_k -> Z_{zperm[k]}`.
    pub fn permute(&self, perm: &[usize], zperm: &[usize]) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for (&(i, j, k), c) in &self.constants {
            let (a, b, kk) = (perm[i], perm[j], zperm[k]);
            let (a, b, c) = if a < b { (a, b, c.clone()) } else { (b, a, -c.clone()) };
            out.constants.insert((a, b, kk), c);
        }
        out
    }
}

/// Sum over all ordered pairs: `<mu, lambda> = sum_{i,j,k} mu_ij^k lambda_ij^k`.
pub fn algebra_inner<S: Scalar>(mu: &TwoStepAlgebra<S>, lambda: &TwoStepAlgebra<S>) -> Result<S> {
    if mu.m != lambda.m || mu.n != lambda.n {
        return Err(Error::DimensionMismatch(format!(
            "types ({}, {}) and ({}, {})",
            mu.n, mu.m, lambda.n, lambda.m
        )));
    }
    let half = mu
        .constants
        .iter()
        .filter_map(|(key, a)| lambda.constants.get(key).map(|b| a.clone() * b.clone()))
        .fold(S::zero(), |acc, x| acc + x);
    Ok(half.clone() + half)
}

/// `(psi, phi) . mu = phi mu(psi^-1 ., psi^-1 .)`, i.e.
/// `J_{g mu}(Z) = (psi^-1)^T J_mu(phi^T Z) psi^-1`.
pub fn act<S: Scalar>(g: &GroupElement<S>, alg: &TwoStepAlgebra<S>) -> Result<TwoStepAlgebra<S>> {
    if g.psi.rows() != alg.m || g.phi.rows() != alg.n {
        return Err(Error::DimensionMismatch(format!(
            "group element of size ({}, {}) on type ({}, {})",
            g.psi.rows(),
            g.phi.rows(),
            alg.n,
            alg.m
        )));
    }
    let js = alg.j_matrices();
    let pinv = &g.psi_inv;
    let pinv_t = pinv.transpose();
    let out: Vec<Matrix<S>> = (0..alg.n)
        .map(|k| {
            let mut mix = Matrix::zeros(alg.m, alg.m);
            for (l, jl) in js.iter().enumerate() {
                let w = &g.phi[(k, l)];
                if !w.is_zero() {
                    mix = mix.add(&jl.scale(w));
                }
            }
            pinv_t.mul(&mix).mul(pinv)
        })
        .collect();
    TwoStepAlgebra::from_j_matrices_unchecked(alg.m, &out)
}

impl<S: Scalar> TwoStepAlgebra<S> {
    /// Like [`from_j_matrices`](Self::from_j_matrices) but reads only the upper triangle.
    pub(crate) fn from_j_matrices_unchecked(m: usize, js: &[Matrix<S>]) -> Result<Self> {
        let mut alg = Self::zero(m, js.len());
        for (k, jk) in js.iter().enumerate() {
            for i in 0..m {
                for j in i + 1..m {
                    let c = -jk[(i, j)].clone();
                    if !c.negligible() {
                        alg.constants.insert((i, j, k), c);
                    }
                }
            }
        }
        Ok(alg)
    }
}

/// Tangent action `pi(alpha, beta) mu = beta mu - mu(alpha ., .) - mu(., alpha .)`.
///
/// In terms of `J`: `pi J_k = sum_l beta_kl J_l - alpha^T J_k - J_k alpha`.
pub fn infinitesimal_act<S: Scalar>(
    alpha: &Matrix<S>,
    beta: &Matrix<S>,
    alg: &TwoStepAlgebra<S>,
) -> Result<TwoStepAlgebra<S>> {
    if alpha.rows() != alg.m || alpha.cols() != alg.m || beta.rows() != alg.n || beta.cols() != alg.n {
        return Err(Error::DimensionMismatch("tangent vector does not match algebra type".into()));
    }
    let js = alg.j_matrices();
    let at = alpha.transpose();
    let out: Vec<Matrix<S>> = (0..alg.n)
        .map(|k| {
            let mut acc = at.mul(&js[k]).add(&js[k].mul(alpha)).scale(&-S::one());
            for (l, jl) in js.iter().enumerate() {
                let w = &beta[(k, l)];
                if !w.is_zero() {
                    acc = acc.add(&jl.scale(w));
                }
            }
            acc
        })
        .collect();
    TwoStepAlgebra::from_j_matrices_unchecked(alg.m, &out)
}

/// Whether `mu(n_1, n_1) = n_2`.
pub fn is_type_nm<S: Scalar>(alg: &TwoStepAlgebra<S>) -> bool {
    if alg.n == 0 {
        return true;
    }
    let pairs: Vec<(usize, usize)> =
        (0..alg.m).flat_map(|i| (i + 1..alg.m).map(move |j| (i, j))).collect();
    let mat = Matrix::from_fn(alg.n, pairs.len(), |k, p| alg.constant(pairs[p].0, pairs[p].1, k));
    mat.rank() == alg.n
}

/// Whether `J(Z)` is invertible for every nonzero `Z`: the Pfaffian form or its
/// negative is positive. Always false for odd `m`.
pub fn is_nonsingular<S: Scalar>(alg: &TwoStepAlgebra<S>) -> bool {
    nonsingularity_verdict(alg).is_ok_and(|v| matches!(v, Verdict::Positive | Verdict::NegativeDefinite))
}

/// The positivity verdict of the Pfaffian form, or an error for odd `m`.
pub fn nonsingularity_verdict<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<Verdict> {
    if alg.m % 2 == 1 || alg.m == 0 {
        return Err(Error::OddDimension(alg.m));
    }
    let f = pfaffian_form(alg)?;
    Ok(is_positive_form(&f, &PositivityOptions::default()).verdict)
}

/// Whether some nonsingular algebra of type `(n, m)` exists:
/// with `m = (2a+1) 2^(4b+c)`, `0 <= c <= 3`, need `n <= 2^c + 8b - 1`.
pub fn admissible_type(n: usize, m: usize) -> bool {
    if m == 0 || n == 0 {
        return false;
    }
    let v = m.trailing_zeros() as usize;
    let (b, c) = (v / 4, v % 4);
    n < (1 << c) + 8 * b
}

/// Direct sum with independent centers: type `(n1 + n2, m1 + m2)`.
pub fn direct_sum<S: Scalar>(a: &TwoStepAlgebra<S>, b: &TwoStepAlgebra<S>) -> TwoStepAlgebra<S> {
    let mut out = TwoStepAlgebra::zero(a.m + b.m, a.n + b.n);
    out.constants.extend(a.constants.iter().map(|(k, v)| (*k, v.clone())));
    out.constants
        .extend(b.constants.iter().map(|(&(i, j, k), v)| ((i + a.m, j + a.m, k + a.n), v.clone())));
    out
}

/// Sum of two algebras over the same center: `J(Z) = J_a(Z) + J_b(Z)` block-diagonally.
pub fn shared_center_sum<S: Scalar>(a: &TwoStepAlgebra<S>, b: &TwoStepAlgebra<S>) -> Result<TwoStepAlgebra<S>> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch("centers differ in dimension".into()));
    }
    let mut out = TwoStepAlgebra::zero(a.m + b.m, a.n);
    out.constants.extend(a.constants.iter().map(|(k, v)| (*k, v.clone())));
    out.constants
        .extend(b.constants.iter().map(|(&(i, j, k), v)| ((i + a.m, j + a.m, k), v.clone())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn heis() -> TwoStepAlgebra<Q> {
        TwoStepAlgebra::from_brackets(2, 1, [(0, 1, 0, Q::from_i64(1))]).unwrap()
    }

    #[test]
    fn heisenberg_pencil_sign() {
        let j = heis().j_matrix(0);
        assert_eq!(j[(0, 1)], Q::from_i64(-1));
        assert_eq!(j[(1, 0)], Q::from_i64(1));
    }

    #[test]
    fn loader_rejects_bad_brackets() {
        assert!(TwoStepAlgebra::from_brackets(3, 1, [(1, 1, 0, 1.0)]).is_err());
        assert!(TwoStepAlgebra::from_brackets(3, 1, [(2, 1, 0, 1.0)]).is_err());
        assert!(TwoStepAlgebra::from_brackets(3, 1, [(0, 3, 0, 1.0)]).is_err());
        assert!(TwoStepAlgebra::from_brackets(3, 1, [(0, 1, 0, 1.0), (0, 1, 0, 2.0)]).is_err());
    }

    #[test]
    fn inner_counts_ordered_pairs() {
        assert_eq!(heis().norm_sq(), Q::from_i64(2));
    }

    #[test]
    fn center_scaling() {
        let g = GroupElement::new(Matrix::identity(2), Matrix::diagonal(&[Q::from_i64(3)])).unwrap();
        assert_eq!(act(&g, &heis()).unwrap(), heis().scale(&Q::from_i64(3)));
    }

    #[test]
    fn grading_derivation_is_in_the_kernel() {
        let alg = heis();
        let r = infinitesimal_act(&Matrix::identity(2), &Matrix::identity(1).scale(&Q::from_i64(2)), &alg).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn admissible_types() {
        assert!(admissible_type(3, 8));
        assert!(admissible_type(7, 8));
        assert!(!admissible_type(8, 8));
        assert!(!admissible_type(2, 6));
        assert!(admissible_type(1, 2));
        assert!(admissible_type(3, 4));
        assert!(!admissible_type(4, 4));
        assert!(admissible_type(8, 16));
    }

    #[test]
    fn singular_group_element_is_rejected() {
        let z = Matrix::<Q>::zeros(1, 1);
        assert!(matches!(GroupElement::new(Matrix::identity(2), z), Err(Error::Singular(_))));
    }
}
