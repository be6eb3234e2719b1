use super::{form_inner, HomogeneousForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// The moment map of the `GL_n` action on forms:
/// `m(f)_ij = -<x_j df/dx_i, f> / ||f||^2`.
pub fn moment_map_form<S: Scalar>(f: &HomogeneousForm<S>) -> Result<Matrix<S>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("moment map of the zero form".into()));
    }
    let n = f.n();
    let norm = f.norm_sq();
    let partials: Vec<_> = (0..n).map(|i| f.partial(i)).collect();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = partials[i].mul(&HomogeneousForm::variable(n, j));
            let v = -form_inner(&g, f)? / norm.clone();
            out[(i, j)] = v.clone();
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Tangent action `pi(alpha) f = -sum_ij alpha_ij x_j df/dx_i`.
pub fn pi_form<S: Scalar>(alpha: &Matrix<S>, f: &HomogeneousForm<S>) -> HomogeneousForm<S> {
    let n = f.n();
    let mut out = HomogeneousForm::zero(n, f.degree());
    for i in 0..n {
        let di = f.partial(i);
        if di.is_zero() {
            continue;
        }
        let mut lin = vec![S::zero(); n];
        for (j, slot) in lin.iter_mut().enumerate() {
            *slot = -alpha[(i, j)].clone();
        }
        out = out.add(&di.mul(&HomogeneousForm::linear(&lin)));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Criticality<S> {
    /// `pi(m(f)) f = c f`.
    Critical { c: S },
    NotCritical { residual: f64 },
}

impl<S> Criticality<S> {
    pub fn is_critical(&self) -> bool {
        matches!(self, Criticality::Critical { .. })
    }
}

/// Tests whether `pi(m(f)) f` is proportional to `f`. The residual is measured
/// relative to `||pi(m(f)) f||`; rationals are tested exactly.
pub fn is_critical_form<S: Scalar>(f: &HomogeneousForm<S>, tol: f64) -> Result<Criticality<S>> {
    let m = moment_map_form(f)?;
    let g = pi_form(&m, f);
    let c = form_inner(&g, f)? / f.norm_sq();
    let r = g.sub(&f.scale(&c));
    let r2 = r.norm_sq();
    let g2 = g.norm_sq().to_f64();
    if r.is_zero() || r2.near_zero(tol * tol, g2) {
        Ok(Criticality::Critical { c })
    } else {
        Ok(Criticality::NotCritical { residual: (r2.to_f64() / g2.max(f64::MIN_POSITIVE)).sqrt() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    #[test]
    fn monomials_are_critical_with_sum_of_squares() {
        let f = HomogeneousForm::monomial(vec![3, 1, 2], Q::from_i64(5));
        let m = moment_map_form(&f).unwrap();
        assert_eq!(m, Matrix::diagonal(&[Q::from_i64(-3), Q::from_i64(-1), Q::from_i64(-2)]));
        assert_eq!(is_critical_form(&f, 1e-9).unwrap(), Criticality::Critical { c: Q::from_i64(14) });
    }

    #[test]
    fn trace_is_minus_degree() {
        let f = HomogeneousForm::from_terms(2, 4, [(vec![4, 0], Q::from_i64(1)), (vec![3, 1], Q::from_i64(1))]).unwrap();
        assert_eq!(moment_map_form(&f).unwrap().trace(), Q::from_i64(-4));
        assert!(!is_critical_form(&f, 1e-9).unwrap().is_critical());
    }

    #[test]
    fn zero_form_is_rejected() {
        assert!(moment_map_form(&HomogeneousForm::<f64>::zero(2, 2)).is_err());
    }
}
