//! Derivations of 2-step algebras, skew-symmetric derivations, and the
//! H-type, H~-type and Rep-type predicates.
//!
//! A derivation is a matrix `D = [[B, E], [C, A]]` acting on coordinates
//! `(X_1, ..., X_m, Z_1, ..., Z_n)`. The block `C` (sending `n_1` to `n_2`) is
//! always free, `E` is constrained separately, and the graded part `(B, A)`
//! satisfies `B^T J(Z_l) + J(Z_l) B = sum_k A_lk J(Z_k)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{is_nonsingular, TwoStepAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polynomials::{pfaffian_form, HomogeneousForm};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    B(usize, usize),
    A(usize, usize),
}

type Row<S> = Vec<(Var, S)>;

/// Dense antisymmetric `mu[i][j][k]`.
fn dense<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Vec<Vec<Vec<S>>> {
    let (m, n) = (alg.m(), alg.n());
    let mut mu = vec![vec![vec![S::zero(); n]; m]; m];
    for (&(i, j, k), c) in alg.constants() {
        mu[i][j][k] = c.clone();
        mu[j][i][k] = -c.clone();
    }
    mu
}

/// For every `i < j` and `l`: `sum_k A_lk mu_ij^k - sum_p (B_pi mu_pj^l + B_pj mu_ip^l) = 0`.
fn graded_equations<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Vec<Row<S>> {
    let (m, n) = (alg.m(), alg.n());
    let mu = dense(alg);
    let mut rows = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for l in 0..n {
                let mut row: BTreeMap<Var, S> = BTreeMap::new();
                let mut add = |v: Var, c: S| {
                    if !c.is_zero() {
                        let e = row.entry(v).or_insert_with(S::zero);
                        *e = e.clone() + c;
                    }
                };
                for k in 0..n {
                    add(Var::A(l, k), mu[i][j][k].clone());
                }
                for p in 0..m {
                    add(Var::B(p, i), -mu[p][j][l].clone());
                    add(Var::B(p, j), -mu[i][p][l].clone());
                }
                let row: Row<S> = row.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Null space of the equations after substituting `var -> sum coeff * param`.
fn solve<S: Scalar>(
    rows: &[Row<S>],
    params: usize,
    map: impl Fn(Var) -> Vec<(usize, S)>,
    extra: &[Vec<(usize, S)>],
) -> Vec<Vec<S>> {
    if params == 0 {
        return Vec::new();
    }
    let mut dense_rows: Vec<Vec<S>> = Vec::new();
    let mut push = |entries: &mut dyn Iterator<Item = (usize, S)>| {
        let mut r = vec![S::zero(); params];
        for (p, c) in entries {
            r[p] = r[p].clone() + c;
        }
        if r.iter().any(|v| !v.is_zero()) {
            dense_rows.push(r);
        }
    };
    for row in rows {
        push(&mut row.iter().flat_map(|(v, c)| map(*v).into_iter().map(move |(p, w)| (p, w * c.clone()))));
    }
    for row in extra {
        push(&mut row.iter().cloned());
    }
    if dense_rows.is_empty() {
        return (0..params)
            .map(|i| (0..params).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
    }
    S::nullspace(&Matrix::from_rows(dense_rows))
}

/// Constraints on `E` (the part sending `n_2` into `n_1`), unknowns `E_pk` at `p n + k`.
fn e_block_nullspace<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Vec<Vec<S>> {
    let (m, n) = (alg.m(), alg.n());
    let mu = dense(alg);
    let mut rows: Vec<Vec<(usize, S)>> = Vec::new();
    // D mu(X_i, X_j) has no n_1 part.
    for i in 0..m {
        for j in i + 1..m {
            for p in 0..m {
                rows.push((0..n).map(|k| (p * n + k, mu[i][j][k].clone())).collect());
            }
        }
    }
    // mu(X_i, D Z_k) = 0.
    for i in 0..m {
        for k in 0..n {
            for l in 0..n {
                rows.push((0..m).map(|p| (p * n + k, mu[i][p][l].clone())).collect());
            }
        }
    }
    solve(&[], m * n, |_| Vec::new(), &rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivationSpace<S> {
    pub dim: usize,
    /// `(m + n) x (m + n)` matrices acting on `(X_1..X_m, Z_1..Z_n)`.
    pub basis: Vec<Matrix<S>>,
    /// Derivations `[[B, 0], [0, A]]`, the grading `[[I, 0], [0, 2I]]` included.
    pub graded_dim: usize,
    /// Graded derivations with `tr B = 0`.
    pub graded_sl_dim: usize,
    /// Graded derivations with `tr B = 0` and `A = 0`.
    pub der0_dim: usize,
    /// Skew-symmetric derivations.
    pub skew_dim: usize,
    /// Skew-symmetric derivations vanishing on the center.
    pub skew0_dim: usize,
}

impl<S> DerivationSpace<S> {
    /// `dim (Der_gr / Der_0)`, the image of the graded traceless derivations in `gl(n_2)`.
    pub fn graded_quotient_dim(&self) -> usize {
        self.graded_sl_dim - self.der0_dim
    }

    pub fn skew_quotient_dim(&self) -> usize {
        self.skew_dim - self.skew0_dim
    }
}

/// Unknowns `B_pi` at `p m + i` and `A_lk` at `m^2 + l n + k`.
fn graded_map(m: usize, n: usize) -> impl Fn(Var) -> Vec<(usize, i64)> {
    move |v| match v {
        Var::B(p, i) => vec![(p * m + i, 1)],
        Var::A(l, k) => vec![(m * m + l * n + k, 1)],
    }
}

fn lift<S: Scalar>(f: impl Fn(Var) -> Vec<(usize, i64)>) -> impl Fn(Var) -> Vec<(usize, S)> {
    move |v| f(v).into_iter().map(|(p, c)| (p, S::from_i64(c))).collect()
}

/// Index of the strictly upper entry `(a, b)`, `a < b`, of a skew `size x size` matrix.
fn skew_index(a: usize, b: usize, size: usize) -> usize {
    a * size - a * (a + 1) / 2 + (b - a - 1)
}

fn skew_map(m: usize, n: usize, with_a: bool) -> impl Fn(Var) -> Vec<(usize, i64)> {
    let bcount = m * m.saturating_sub(1) / 2;
    move |v| {
        let (a, b, size, base) = match v {
            Var::B(p, i) => (p, i, m, 0),
            Var::A(l, k) if with_a => (l, k, n, bcount),
            Var::A(..) => return Vec::new(),
        };
        match a.cmp(&b) {
            std::cmp::Ordering::Less => vec![(base + skew_index(a, b, size), 1)],
            std::cmp::Ordering::Greater => vec![(base + skew_index(b, a, size), -1)],
            std::cmp::Ordering::Equal => Vec::new(),
        }
    }
}

/// Dimensions of `k(mu)`, `k_0(mu)` and their quotient, for the standard inner product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SkewDims {
    pub k_dim: usize,
    pub k0_dim: usize,
    pub quotient_dim: usize,
}

pub fn skew_derivation_dims<S: Scalar>(alg: &TwoStepAlgebra<S>) -> SkewDims {
    let (m, n) = (alg.m(), alg.n());
    let rows = graded_equations(alg);
    let (bc, ac) = (m * m.saturating_sub(1) / 2, n * n.saturating_sub(1) / 2);
    let k_dim = solve(&rows, bc + ac, lift::<S>(skew_map(m, n, true)), &[]).len();
    let k0_dim = solve(&rows, bc, lift::<S>(skew_map(m, n, false)), &[]).len();
    SkewDims { k_dim, k0_dim, quotient_dim: k_dim - k0_dim }
}

/// Computes `Der(mu)` from the derivation equations over all `(m + n)^2` entries,
/// which split into the free block `C`, the block `E` and the graded block `(B, A)`.
pub fn derivation_space<S: Scalar>(alg: &TwoStepAlgebra<S>) -> DerivationSpace<S> {
    let (m, n) = (alg.m(), alg.n());
    let size = m + n;
    let rows = graded_equations(alg);
    let gparams = m * m + n * n;
    let graded = solve(&rows, gparams, lift::<S>(graded_map(m, n)), &[]);
    let trace_row: Vec<(usize, S)> = (0..m).map(|i| (i * m + i, S::one())).collect();
    let graded_sl_dim = solve(&rows, gparams, lift::<S>(graded_map(m, n)), std::slice::from_ref(&trace_row)).len();
    let no_a = move |v| match v {
        Var::B(p, i) => vec![(p * m + i, 1)],
        Var::A(..) => Vec::new(),
    };
    let der0_dim = solve(&rows, m * m, lift::<S>(no_a), &[trace_row]).len();
    let e_part = e_block_nullspace(alg);
    let skew = skew_derivation_dims(alg);

    let mut basis = Vec::new();
    for i in 0..m {
        for k in 0..n {
            let mut d = Matrix::zeros(size, size);
            d[(m + k, i)] = S::one();
            basis.push(d);
        }
    }
    for v in &e_part {
        let mut d = Matrix::zeros(size, size);
        for p in 0..m {
            for k in 0..n {
                d[(p, m + k)] = v[p * n + k].clone();
            }
        }
        basis.push(d);
    }
    for v in &graded {
        let mut d = Matrix::zeros(size, size);
        for p in 0..m {
            for i in 0..m {
                d[(p, i)] = v[p * m + i].clone();
            }
        }
        for l in 0..n {
            for k in 0..n {
                d[(m + l, m + k)] = v[m * m + l * n + k].clone();
            }
        }
        basis.push(d);
    }
    DerivationSpace {
        dim: basis.len(),
        basis,
        graded_dim: graded.len(),
        graded_sl_dim,
        der0_dim,
        skew_dim: skew.k_dim,
        skew0_dim: skew.k0_dim,
    }
}

/// The bracket of two vectors of `n = n_1 + n_2` in coordinates.
pub fn bracket_vectors<S: Scalar>(alg: &TwoStepAlgebra<S>, u: &[S], v: &[S]) -> Vec<S> {
    let (m, n) = (alg.m(), alg.n());
    let mut out = vec![S::zero(); m + n];
    for (&(i, j, k), c) in alg.constants() {
        let w = u[i].clone() * v[j].clone() - u[j].clone() * v[i].clone();
        out[m + k] = out[m + k].clone() + w * c.clone();
    }
    out
}

/// Checks `D [u, v] = [D u, v] + [u, D v]` on all pairs of basis vectors.
pub fn is_derivation<S: Scalar>(alg: &TwoStepAlgebra<S>, d: &Matrix<S>, tol: f64) -> bool {
    let size = alg.m() + alg.n();
    let unit = |i: usize| (0..size).map(|r| if r == i { S::one() } else { S::zero() }).collect::<Vec<S>>();
    let apply = |v: &[S]| (0..size).map(|r| (0..size).map(|c| d[(r, c)].clone() * v[c].clone()).fold(S::zero(), |a, b| a + b)).collect::<Vec<S>>();
    let scale = 1f64.max(d.max_abs()) * 1f64.max(alg.constants().values().map(|c| c.to_f64().abs()).fold(0.0, f64::max));
    for a in 0..size {
        for b in a + 1..size {
            let (ua, ub) = (unit(a), unit(b));
            let lhs = apply(&bracket_vectors(alg, &ua, &ub));
            let r1 = bracket_vectors(alg, &apply(&ua), &ub);
            let r2 = bracket_vectors(alg, &ua, &apply(&ub));
            for t in 0..size {
                let diff = lhs[t].clone() - r1[t].clone() - r2[t].clone();
                if !diff.near_zero(tol, scale) {
                    return false;
                }
            }
        }
    }
    true
}

/// `B^T J(Z_l) + J(Z_l) B = J(A^T Z_l)` for every `l`.
pub fn graded_derivation_check<S: Scalar>(alg: &TwoStepAlgebra<S>, b: &Matrix<S>, a: &Matrix<S>) -> bool {
    let (m, n) = (alg.m(), alg.n());
    if b.rows() != m || b.cols() != m || a.rows() != n || a.cols() != n {
        return false;
    }
    let js = alg.j_matrices();
    let bt = b.transpose();
    let scale = 1f64.max(b.max_abs()).max(a.max_abs()) * 1f64.max(js.iter().map(Matrix::max_abs).fold(0.0, f64::max));
    (0..n).all(|l| {
        let lhs = bt.mul(&js[l]).add(&js[l].mul(b));
        let mut rhs = Matrix::zeros(m, m);
        for (k, jk) in js.iter().enumerate() {
            rhs = rhs.add(&jk.scale(&a[(l, k)]));
        }
        let diff = lhs.sub(&rhs);
        (0..m).all(|i| (0..m).all(|j| diff[(i, j)].near_zero(1e-9, scale)))
    })
}

/// `J(Z_k)^2 = -I` and `J(Z_k) J(Z_l) + J(Z_l) J(Z_k) = 0` for `k != l`.
pub fn htype_check<S: Scalar>(alg: &TwoStepAlgebra<S>) -> bool {
    let js = alg.j_matrices();
    let m = alg.m();
    let minus_id: Matrix<S> = Matrix::identity(m).scale(&-S::one());
    for k in 0..js.len() {
        if !js[k].mul(&js[k]).approx_eq(&minus_id, 1e-9) {
            return false;
        }
        for l in k + 1..js.len() {
            if !js[k].mul(&js[l]).add(&js[l].mul(&js[k])).approx_eq(&Matrix::zeros(m, m), 1e-9) {
                return false;
            }
        }
    }
    true
}

/// Result of testing `f_mu = c q^(m/4)` for a positive definite quadratic `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPower {
    /// Gram matrix of `q` with `c = 1` (sign absorbed into `f`).
    pub q: Matrix<f64>,
    /// `||f - q^p|| / ||f||` in the coefficient norm.
    pub residual: f64,
}

/// The candidate `q` with `q(x) = |f(x)|^(1/p)` fitted on `e_i` and `e_i + e_j`,
/// which is exact whenever `f` is a positive multiple of a `p`-th power of a
/// quadratic form.
pub fn quadratic_power_fit<S: Scalar>(f: &HomogeneousForm<S>, p: u32) -> Result<QuadraticPower> {
    let f = f.to_float();
    let n = f.n();
    if p == 0 || f.degree() != 2 * p {
        return Err(Error::Precondition(format!("degree {} is not 2 * {p}", f.degree())));
    }
    let unit = |i: usize| (0..n).map(|r| if r == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let sign = if f.eval_f64(&unit(0)) < 0.0 { -1.0 } else { 1.0 };
    let root = |x: &[f64]| (sign * f.eval_f64(x)).max(0.0).powf(1.0 / p as f64);
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        q[(i, i)] = root(&unit(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut x = unit(i);
            x[j] = 1.0;
            let off = (root(&x) - q[(i, i)] - q[(j, j)]) / 2.0;
            q[(i, j)] = off;
            q[(j, i)] = off;
        }
    }
    let mut quad = HomogeneousForm::zero(n, 2);
    for i in 0..n {
        for j in 0..n {
            let term = HomogeneousForm::variable(n, i).mul(&HomogeneousForm::variable(n, j)).scale(&q[(i, j)]);
            quad = quad.add(&term);
        }
    }
    let diff = f.scale(&sign).sub(&quad.pow(p));
    let norm = f.norm_sq().sqrt();
    Ok(QuadraticPower { q, residual: diff.norm_sq().max(0.0).sqrt() / norm })
}

/// Whether the Pfaffian form is projectively `(x_1^2 + ... + x_n^2)^(m/4)`, that is,
/// a multiple of `q^(m/4)` with `q` positive definite (residual within 1e-8).
pub fn htype_tilde_check<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<bool> {
    if !alg.m().is_multiple_of(4) {
        return Err(Error::Precondition(format!("m = {} is not a multiple of 4", alg.m())));
    }
    if !is_nonsingular(alg) {
        return Err(Error::Precondition("the algebra is not nonsingular".into()));
    }
    let f = pfaffian_form(alg)?;
    let fit = quadratic_power_fit(&f, (alg.m() / 4) as u32)?;
    let positive = crate::linalg::symmetric_eigenvalues(&fit.q).first().is_some_and(|&e| e > 0.0);
    Ok(positive && fit.residual <= 1e-8)
}

/// Structure constants `[Z_k, Z_l] = sum_p c Z_p` of a Lie algebra on the center,
/// given as `(k, l, p, c)` with `k < l` (0-based).
pub fn center_bracket_matrices<S: Scalar>(n: usize, bracket2: &[(usize, usize, usize, S)]) -> Result<Vec<Matrix<S>>> {
    // ad(Z_k) as matrices: ad[k][(p, l)] = c_kl^p.
    let mut ad: Vec<Matrix<S>> = vec![Matrix::zeros(n, n); n];
    for (k, l, p, c) in bracket2 {
        if k >= l || *l >= n || *p >= n {
            return Err(Error::InvalidAlgebra(format!("bad center bracket ({}, {}, {})", k + 1, l + 1, p + 1)));
        }
        ad[*k][(*p, *l)] = ad[*k][(*p, *l)].clone() + c.clone();
        ad[*l][(*p, *k)] = ad[*l][(*p, *k)].clone() - c.clone();
    }
    Ok(ad)
}

/// Whether `J([Z_k, Z_l]) = [J(Z_k), J(Z_l)]` for all `k, l`, after checking the
/// Jacobi identity for `bracket2`.
pub fn rep_type_check<S: Scalar>(alg: &TwoStepAlgebra<S>, bracket2: &[(usize, usize, usize, S)]) -> Result<bool> {
    let n = alg.n();
    let ad = center_bracket_matrices(n, bracket2)?;
    // Jacobi: ad([Z_k, Z_l]) = [ad Z_k, ad Z_l].
    for k in 0..n {
        for l in k + 1..n {
            let mut lhs = Matrix::zeros(n, n);
            for (p, adp) in ad.iter().enumerate() {
                lhs = lhs.add(&adp.scale(&ad[k][(p, l)]));
            }
            let rhs = ad[k].mul(&ad[l]).sub(&ad[l].mul(&ad[k]));
            if !lhs.approx_eq(&rhs, 1e-9) {
                return Err(Error::InvalidAlgebra("center bracket fails the Jacobi identity".into()));
            }
        }
    }
    let js = alg.j_matrices();
    for k in 0..n {
        for l in k + 1..n {
            let mut lhs = Matrix::zeros(alg.m(), alg.m());
            for (p, jp) in js.iter().enumerate() {
                lhs = lhs.add(&jp.scale(&ad[k][(p, l)]));
            }
            let rhs = js[k].mul(&js[l]).sub(&js[l].mul(&js[k]));
            if !lhs.approx_eq(&rhs, 1e-9) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The matrices `M_1`, `M_2` of size `2k` such that `(M_1 + M_2, [[0, 1], [-1, 0]])`
/// is a graded derivation of the pencil algebra of `{(i, k)}`.
///
/// Both are block upper bidiagonal in 2x2 blocks: `M_1` has diagonal blocks
/// `2(r-1) J` and superdiagonal blocks `(r-2) I`; `M_2` has diagonal blocks
/// `-(2(k-r)+1) J` and superdiagonal blocks `-(k-r-1) I`, with `J = [[0, 1], [-1, 0]]`.
pub fn derik_construct<S: Scalar>(k: usize) -> Result<(Matrix<S>, Matrix<S>)> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let build = |diag: &dyn Fn(i64) -> i64, sup: &dyn Fn(i64) -> i64| {
        let mut mat = Matrix::zeros(2 * k, 2 * k);
        for r in 1..=k as i64 {
            let o = 2 * (r as usize - 1);
            let d = diag(r);
            mat[(o, o + 1)] = S::from_i64(d);
            mat[(o + 1, o)] = S::from_i64(-d);
            if (r as usize) < k {
                let s = S::from_i64(sup(r));
                mat[(o, o + 2)] = s.clone();
                mat[(o + 1, o + 3)] = s;
            }
        }
        mat
    };
    let kk = k as i64;
    let m1 = build(&|r| 2 * (r - 1), &|r| r - 2);
    let m2 = build(&|r| -(2 * (kk - r) + 1), &|r| -(kk - r - 1));
    Ok((m1, m2))
}
