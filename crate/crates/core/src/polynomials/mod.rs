//! Homogeneous forms in `n` variables with sparse exponent-vector storage.

mod moment;
mod pfaffian;
mod positivity;
pub mod univariate;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub use moment::{is_critical_form, moment_map_form, pi_form, Criticality};
pub use pfaffian::{pfaffian_form, pfaffian_of_pencil};
pub use positivity::{binary_stability, is_positive_form, PositivityOptions, PositivityReport, Stability, Verdict};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousForm<S> {
    n: usize,
    d: u32,
    terms: BTreeMap<Exponent, S>,
}

impl<S: Scalar> HomogeneousForm<S> {
    pub fn zero(n: usize, d: u32) -> Self {
        Self { n, d, terms: BTreeMap::new() }
    }

    /// The degree-0 form `c`.
    pub fn constant(n: usize, c: S) -> Self {
        let mut f = Self::zero(n, 0);
        f.insert(vec![0; n], c);
        f
    }

    /// The linear form `x_i` (0-based).
    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(e, S::one())
    }

    pub fn monomial(exp: Exponent, c: S) -> Self {
        let d = exp.iter().sum();
        let mut f = Self::zero(exp.len(), d);
        f.insert(exp, c);
        f
    }

    /// The linear form `sum_i c_i x_i`.
    pub fn linear(coeffs: &[S]) -> Self {
        let n = coeffs.len();
        let mut f = Self::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            f.insert(e, c.clone());
        }
        f
    }

    /// Builds a form from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms(n: usize, d: u32, terms: impl IntoIterator<Item = (Exponent, S)>) -> Result<Self> {
        let mut f = Self::zero(n, d);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::WrongShape(format!("exponent {e:?} has {} entries, expected {n}", e.len())));
            }
            if e.iter().sum::<u32>() != d {
                return Err(Error::WrongShape(format!("exponent {e:?} does not have degree {d}")));
            }
            f.insert(e, c);
        }
        Ok(f)
    }

    fn insert(&mut self, e: Exponent, c: S) {
        let v = match self.terms.remove(&e) {
            Some(old) => old + c,
            None => c,
        };
        if !v.negligible() {
            self.terms.insert(e, v);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, S> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_shape(&self, other: &Self) {
        assert!(self.n == other.n && self.d == other.d, "form shape mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n, self.d);
        for (e, v) in &self.terms {
            out.insert(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "form variable count mismatch");
        let mut out = Self::zero(self.n, self.d + other.d);
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert(e, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.n, S::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.n);
        self.terms.iter().fold(S::zero(), |acc, (e, c)| {
            let mut t = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                t = t * xi.powi(ei);
            }
            acc + t
        })
    }

    /// Derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n, self.d.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.insert(e2, c.clone() * S::from_i64(e[i] as i64));
            }
        }
        out
    }

    /// The form `x -> f(A x)`.
    pub fn compose(&self, a: &Matrix<S>) -> Self {
        assert!(a.rows() == self.n && a.cols() == self.n, "substitution matrix has the wrong size");
        let linear: Vec<Self> = (0..self.n).map(|i| Self::linear(a.row(i))).collect();
        let mut powers: Vec<Vec<Self>> = linear.iter().map(|l| vec![Self::constant(self.n, S::one()), l.clone()]).collect();
        let mut out = Self::zero(self.n, self.d);
        for (e, c) in &self.terms {
            let mut t = Self::constant(self.n, c.clone());
            for (i, &ei) in e.iter().enumerate() {
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().mul(&linear[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][ei as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// The Laplacian `sum_i d^2 f / dx_i^2`.
    pub fn laplacian(&self) -> Result<Self> {
        if self.d < 2 {
            return Err(Error::Precondition(format!("Laplacian needs degree >= 2, got {}", self.d)));
        }
        let mut out = Self::zero(self.n, self.d - 2);
        for i in 0..self.n {
            out = out.add(&self.partial(i).partial(i));
        }
        Ok(out)
    }

    pub fn norm_sq(&self) -> S {
        form_inner(self, self).expect("same shape")
    }

    pub fn to_float(&self) -> HomogeneousForm<f64> {
        let mut out = HomogeneousForm::zero(self.n, self.d);
        for (e, c) in &self.terms {
            out.insert(e.clone(), c.to_f64());
        }
        out
    }

    /// Largest coefficientwise absolute difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.check_shape(other);
        self.sub(other).terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Float evaluation, used by the numeric minimizers.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(0.0, |acc, (e, c)| {
            acc + c.to_f64() * e.iter().zip(x).map(|(&ei, &xi)| xi.powi(ei as i32)).product::<f64>()
        })
    }
}

/// `x -> f(phi^-1 x)`.
pub fn act_form<S: Scalar>(phi: &Matrix<S>, f: &HomogeneousForm<S>) -> Result<HomogeneousForm<S>> {
    if phi.rows() != f.n || phi.cols() != f.n {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix on a form in {} variables", phi.rows(), phi.cols(), f.n)));
    }
    Ok(f.compose(&phi.inverse()?))
}

/// Inner product with orthogonal monomials and `<x^D, x^D> = d_1! ... d_n! / d!`.
pub fn form_inner<S: Scalar>(f: &HomogeneousForm<S>, g: &HomogeneousForm<S>) -> Result<S> {
    if f.n != g.n || f.d != g.d {
        return Err(Error::WrongShape(format!(
            "forms of shape (n={}, d={}) and (n={}, d={})",
            f.n, f.d, g.n, g.d
        )));
    }
    let dfact = factorial::<S>(f.d);
    let mut acc = S::zero();
    for (e, a) in &f.terms {
        if let Some(b) = g.terms.get(e) {
            let w = e.iter().fold(S::one(), |w, &ei| w * factorial::<S>(ei));
            acc = acc + a.clone() * b.clone() * w;
        }
    }
    Ok(acc / dfact)
}

fn factorial<S: Scalar>(k: u32) -> S {
    (1..=k as i64).fold(S::one(), |acc, i| acc * S::from_i64(i))
}

fn var_name(n: usize, i: usize) -> String {
    if n <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl<S: Scalar> fmt::Display for HomogeneousForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Lexicographically largest exponent first, so x^4 precedes y^4.
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &ei)| ei > 0)
                .map(|(i, &ei)| if ei == 1 { var_name(self.n, i) } else { format!("{}^{ei}", var_name(self.n, i)) })
                .collect();
            let text = c.to_string();
            let (neg, mag) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let unit = c.abs().is_one() && !mono.is_empty();
            if !unit {
                f.write_str(&mag)?;
                if !mono.is_empty() {
                    f.write_str("*")?;
                }
            }
            f.write_str(&mono.join("*"))?;
        }
        Ok(())
    }
}
