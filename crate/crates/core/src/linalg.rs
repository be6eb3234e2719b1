//! Small dense matrices over a [`Scalar`] field.
//!
//! Exact elimination is used for rationals; float kernels and ranks go
//! through an SVD with a relative singular-value threshold.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Singular values at or below this fraction of the largest are treated as zero.
pub const SVD_REL_THRESHOLD: f64 = 1e-8;

/// Relative pivot threshold for float inversion.
const PIVOT_REL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let v = out[(i, j)].clone() + a.clone() * b.clone();
                        out[(i, j)] = v;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Sum of squared entries.
    pub fn frobenius_sq(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, x| acc + x.clone() * x.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)].approx_eq(&self[(j, i)], tol)))
    }

    pub fn is_skew(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self[(i, i)].approx_eq(&S::zero(), tol)
                    && (0..i).all(|j| self[(i, j)].approx_eq(&-self[(j, i)].clone(), tol))
            })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                other[(i - self.rows, j - self.cols)].clone()
            } else {
                S::zero()
            }
        })
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = pick_pivot(&a, col, col, 0.0, 0.0) else {
                return S::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse. Float pivots below `1e-12` of the largest entry
    /// are treated as singular.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = pick_pivot(&a, col, col, PIVOT_REL, scale)
                .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                    let w = inv[(r, c)].clone() - factor.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = w;
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(S::to_f64).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    pub fn rank(&self) -> usize {
        S::rank(self)
    }

    pub fn nullspace(&self) -> Vec<Vec<S>> {
        S::nullspace(self)
    }
}

impl Matrix<f64> {
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Row index of the largest-magnitude entry in `col` at or below `start`,
/// ignoring entries that are zero relative to `scale`.
fn pick_pivot<S: Scalar>(a: &Matrix<S>, col: usize, start: usize, tol: f64, scale: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in start..a.rows {
        let v = &a[(r, col)];
        if v.is_zero() || (tol > 0.0 && v.near_zero(tol, scale)) {
            continue;
        }
        let mag = v.to_f64().abs();
        if best.is_none_or(|(_, m)| mag > m) {
            best = Some((r, mag));
        }
    }
    best.map(|(r, _)| r)
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns.
pub fn rref<S: Scalar>(a: &Matrix<S>) -> (Matrix<S>, Vec<usize>) {
    let mut m = a.clone();
    let scale = a.max_abs();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row >= m.rows {
            break;
        }
        let tol = if S::KIND == crate::scalar::ScalarKind::Float { 1e-12 } else { 0.0 };
        let Some(p) = pick_pivot(&m, col, row, tol, scale) else {
            continue;
        };
        m.swap_rows(p, row);
        let pivot = m[(row, col)].clone();
        for c in col..m.cols {
            m[(row, c)] = m[(row, c)].clone() / pivot.clone();
        }
        for r in 0..m.rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for c in col..m.cols {
                let v = m[(r, c)].clone() - factor.clone() * m[(row, c)].clone();
                m[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rref_rank<S: Scalar>(a: &Matrix<S>) -> usize {
    rref(a).1.len()
}

pub fn rref_nullspace<S: Scalar>(a: &Matrix<S>) -> Vec<Vec<S>> {
    let (r, pivots) = rref(a);
    let n = a.cols;
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![S::zero(); n];
        v[free] = S::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(row, free)].clone();
        }
        basis.push(v);
    }
    basis
}

fn padded_svd(a: &Matrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.cols;
    let rows = a.rows.max(n);
    let m = DMatrix::from_fn(rows, n, |i, j| if i < a.rows { a[(i, j)] } else { 0.0 });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    (svd.singular_values.iter().copied().collect(), vt)
}

pub fn svd_nullspace(a: &Matrix<f64>, rel: f64) -> Vec<Vec<f64>> {
    if a.cols == 0 {
        return Vec::new();
    }
    let (sv, vt) = padded_svd(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let thr = rel * smax;
    sv.iter()
        .enumerate()
        .filter(|(_, &s)| s <= thr)
        .map(|(i, _)| vt.row(i).iter().copied().collect())
        .collect()
}

pub fn svd_rank(a: &Matrix<f64>, rel: f64) -> usize {
    if a.cols == 0 || a.rows == 0 {
        return 0;
    }
    let (sv, _) = padded_svd(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * smax).count()
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues<S: Scalar>(m: &Matrix<S>) -> Vec<f64> {
    let d = m.to_dmatrix();
    let sym = (&d + d.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Groups sorted values into clusters whose consecutive gaps are at most `radius`.
pub fn cluster_sorted(values: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        match clusters.last_mut() {
            Some(c) if (v - *c.last().unwrap()).abs() <= radius => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn exact_inverse_and_determinant() {
        let a = Matrix::from_rows(vec![vec![q(2, 1), q(1, 1)], vec![q(7, 1), q(4, 1)]]);
        assert_eq!(a.determinant(), q(1, 1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn singular_matrices_are_rejected() {
        let a = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert!(matches!(a.inverse(), Err(Error::Singular(_))));
        let f = a.to_f64();
        assert!(f.inverse().is_err());
        assert_eq!(a.determinant(), q(0, 1));
    }

    #[test]
    fn nullspace_exact_and_float_agree_on_dimension() {
        let a = Matrix::from_rows(vec![
            vec![q(1, 1), q(2, 1), q(3, 1), q(4, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1), q(8, 1)],
            vec![q(0, 1), q(1, 1), q(1, 1), q(0, 1)],
        ]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in 0..a.rows() {
                let dot = (0..4).fold(q(0, 1), |acc, c| acc + a[(r, c)].clone() * v[c].clone());
                assert_eq!(dot, q(0, 1));
            }
        }
        assert_eq!(a.rank(), 2);
        assert_eq!(a.to_f64().rank(), 2);
        assert_eq!(a.to_f64().nullspace().len(), 2);
    }

    #[test]
    fn clustering() {
        let c = cluster_sorted(&[-1.0, -1.0 + 1e-12, 0.5, 0.5], 1e-9);
        assert_eq!(c.len(), 2);
    }
}
