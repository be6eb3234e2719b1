//! Dense univariate polynomials, used for binary forms dehomogenized at `x = 1`.

use crate::scalar::{Scalar, Q};

/// Coefficients in ascending degree order, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UPoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `tol` times `scale` (no-op for exact scalars).
    fn chop(mut self, tol: f64, scale: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero() || (tol > 0.0 && c.near_zero(tol, scale))) {
            self.coeffs.pop();
        }
        self
    }

    /// Quotient and remainder; leading remainder terms below `tol * scale` are chopped.
    pub fn divrem(&self, divisor: &Self, tol: f64, scale: f64) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top].clone() / lead.clone();
            let shift = top - dd;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = rem[shift + i].clone() - c.clone() * dc.clone();
            }
            quot[shift] = c;
            rem.pop();
            rem = Self { coeffs: rem }.chop(tol, scale).coeffs;
        }
        (Self::new(quot), Self { coeffs: rem }.chop(tol, scale))
    }

    /// Monic gcd via Euclid; for floats, remainders below `tol` (relative to
    /// the inputs) are treated as zero.
    pub fn gcd(&self, other: &Self, tol: f64) -> Self {
        let scale = self.max_abs().max(other.max_abs());
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let b_scale = b.max_abs();
            let bn = b.scale_to(&S::one());
            let (_, r) = a.divrem(&bn, tol, scale.max(b_scale));
            a = bn;
            b = r;
        }
        a.scale_to(&S::one())
    }

    fn scale_to(&self, lead: &S) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let f = lead.clone() / self.leading();
        Self::new(self.coeffs.iter().map(|c| c.clone() * f.clone()).collect())
    }

    /// Largest multiplicity of a complex root, by repeated gcd with the derivative.
    pub fn max_root_multiplicity(&self, tol: f64) -> usize {
        let mut g = self.clone();
        let mut mult = 0;
        while g.degree().is_some_and(|d| d > 0) {
            mult += 1;
            g = g.gcd(&g.derivative(), tol);
        }
        mult
    }
}

impl UPoly<Q> {
    /// Number of distinct real roots, by Sturm's theorem.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().is_none_or(|d| d == 0) {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let len = seq.len();
            let (_, r) = seq[len - 2].divrem(&seq[len - 1], 0.0, 0.0);
            if r.is_zero() {
                break;
            }
            seq.push(Self::new(r.coeffs.iter().map(|c| -c.clone()).collect()));
        }
        let changes = |signs: Vec<i32>| {
            let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos_inf = seq.iter().map(|p| p.leading().sign()).collect();
        let at_neg_inf = seq
            .iter()
            .map(|p| {
                let s = p.leading().sign();
                if p.degree().unwrap_or(0) % 2 == 1 { -s } else { s }
            })
            .collect();
        changes(at_neg_inf) - changes(at_pos_inf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(c: &[i64]) -> UPoly<Q> {
        UPoly::new(c.iter().map(|&v| Q::from_i64(v)).collect())
    }

    #[test]
    fn sturm_counts() {
        // (y - 1)(y - 2)(y^2 + 1)
        let p = qp(&[2, -3, 3, -3, 1]);
        assert_eq!(p.count_real_roots(), 2);
        assert_eq!(qp(&[1, 0, 1]).count_real_roots(), 0);
        // (y - 1)^2
        assert_eq!(qp(&[1, -2, 1]).count_real_roots(), 1);
    }

    #[test]
    fn multiplicities() {
        // (y^2 + 1)^2
        assert_eq!(qp(&[1, 0, 2, 0, 1]).max_root_multiplicity(0.0), 2);
        // (y^2+1)(y^2+4)
        assert_eq!(qp(&[4, 0, 5, 0, 1]).max_root_multiplicity(0.0), 1);
        let f = UPoly::new(vec![1.0, 0.0, 2.0, 0.0, 1.0]);
        assert_eq!(f.max_root_multiplicity(1e-9), 2);
        let g = UPoly::new(vec![4.0, 0.0, 5.0, 0.0, 1.0]);
        assert_eq!(g.max_root_multiplicity(1e-9), 1);
    }
}
