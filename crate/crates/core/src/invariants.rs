//! Invariants of ternary quartics: the degree-3 invariant `I3`, the
//! calecticant `I6 = det H(f)`, and ratio tests separating projective classes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::polynomials::{is_critical_form, HomogeneousForm};
use crate::scalar::Scalar;

/// Coefficients of
/// `a x^4 + 4b x^3y + 6c x^2y^2 + 4d xy^3 + e y^4 + 4f x^3z + 12g x^2yz + 12h xy^2z
///  + 4i y^3z + 6j x^2z^2 + 12k xyz^2 + 6l y^2z^2 + 4m xz^3 + 4n yz^3 + p z^4`.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryQuarticCoeffs<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
    pub e: S,
    pub f: S,
    pub g: S,
    pub h: S,
    pub i: S,
    pub j: S,
    pub k: S,
    pub l: S,
    pub m: S,
    pub n: S,
    pub p: S,
}

/// Exponents and weights in the order `a, b, ..., p`.
const MONOMIALS: [([u32; 3], i64); 15] = [
    ([4, 0, 0], 1),
    ([3, 1, 0], 4),
    ([2, 2, 0], 6),
    ([1, 3, 0], 4),
    ([0, 4, 0], 1),
    ([3, 0, 1], 4),
    ([2, 1, 1], 12),
    ([1, 2, 1], 12),
    ([0, 3, 1], 4),
    ([2, 0, 2], 6),
    ([1, 1, 2], 12),
    ([0, 2, 2], 6),
    ([1, 0, 3], 4),
    ([0, 1, 3], 4),
    ([0, 0, 4], 1),
];

fn check_shape<S: Scalar>(f: &HomogeneousForm<S>) -> Result<()> {
    if f.n() != 3 || f.degree() != 4 {
        return Err(Error::WrongShape(format!(
            "ternary quartic expected, got n = {}, d = {}",
            f.n(),
            f.degree()
        )));
    }
    Ok(())
}

pub fn coeffs<S: Scalar>(f: &HomogeneousForm<S>) -> Result<TernaryQuarticCoeffs<S>> {
    check_shape(f)?;
    let v: Vec<S> = MONOMIALS.iter().map(|(e, w)| f.coeff(e) / S::from_i64(*w)).collect();
    let [a, b, c, d, e, f_, g, h, i, j, k, l, m, n, p]: [S; 15] = v.try_into().expect("15 coefficients");
    Ok(TernaryQuarticCoeffs { a, b, c, d, e, f: f_, g, h, i, j, k, l, m, n, p })
}

impl<S: Scalar> TernaryQuarticCoeffs<S> {
    pub fn to_vec(&self) -> Vec<S> {
        vec![
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
            self.f.clone(),
            self.g.clone(),
            self.h.clone(),
            self.i.clone(),
            self.j.clone(),
            self.k.clone(),
            self.l.clone(),
            self.m.clone(),
            self.n.clone(),
            self.p.clone(),
        ]
    }

    /// Rebuilds the quartic.
    pub fn to_form(&self) -> HomogeneousForm<S> {
        let terms = MONOMIALS
            .iter()
            .zip(self.to_vec())
            .map(|((e, w), c)| (e.to_vec(), c * S::from_i64(*w)));
        HomogeneousForm::from_terms(3, 4, terms).expect("valid exponents")
    }
}

/// The 6x6 Hankel matrix whose determinant is `I6`.
pub fn hankel<S: Scalar>(f: &HomogeneousForm<S>) -> Result<Matrix<S>> {
    let q = coeffs(f)?;
    let TernaryQuarticCoeffs { a, b, c, d, e, f, g, h, i, j, k, l, m, n, p } = q;
    Ok(Matrix::from_rows(vec![
        vec![a, c.clone(), j.clone(), g.clone(), f.clone(), b.clone()],
        vec![c.clone(), e, l.clone(), i.clone(), h.clone(), d.clone()],
        vec![j.clone(), l.clone(), p, n.clone(), m.clone(), k.clone()],
        vec![g.clone(), i, n, l, k.clone(), h.clone()],
        vec![f, h.clone(), m, k.clone(), j, g.clone()],
        vec![b, d, k, h, g, c],
    ]))
}

pub fn invariant_i3<S: Scalar>(f: &HomogeneousForm<S>) -> Result<S> {
    let q = coeffs(f)?;
    let TernaryQuarticCoeffs { a, b, c, d, e, f, g, h, i, j, k, l, m, n, p } = q;
    let w = |v: i64| S::from_i64(v);
    let t3 = |x: &S, y: &S, z: &S| x.clone() * y.clone() * z.clone();
    let sq = |x: &S| x.clone() * x.clone();
    let v = t3(&a, &e, &p)
        + w(3) * (a.clone() * sq(&l) + e.clone() * sq(&j) + p.clone() * sq(&c))
        + w(4) * (t3(&b, &i, &m) + t3(&f, &d, &n))
        - w(4) * (t3(&a, &i, &n) + t3(&e, &f, &m) + t3(&p, &b, &d))
        + w(6) * t3(&c, &j, &l)
        + w(12) * (c.clone() * sq(&k) + j.clone() * sq(&h) + l.clone() * sq(&g))
        - w(12) * t3(&g, &h, &k)
        - w(12)
            * (t3(&b, &k, &l)
                + t3(&f, &h, &l)
                + t3(&d, &k, &j)
                + t3(&i, &g, &j)
                + t3(&m, &h, &c)
                + t3(&n, &g, &c))
        + w(12) * (t3(&g, &d, &m) + t3(&h, &n, &b) + t3(&k, &f, &i));
    Ok(v)
}

pub fn invariant_i6<S: Scalar>(f: &HomogeneousForm<S>) -> Result<S> {
    Ok(hankel(f)?.determinant())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distinction {
    ProvablyInequivalent,
    Inconclusive,
}

/// Relative tolerance for comparing float invariant ratios.
pub const RATIO_TOL: f64 = 1e-6;

/// Compares `I6 / I3^2`, which is constant on `R^* SL_3`-orbits and hence on
/// projective classes in three variables.
pub fn distinguish<S: Scalar>(f: &HomogeneousForm<S>, g: &HomogeneousForm<S>) -> Result<Distinction> {
    distinguish_with_tol(f, g, RATIO_TOL)
}

pub fn distinguish_with_tol<S: Scalar>(f: &HomogeneousForm<S>, g: &HomogeneousForm<S>, tol: f64) -> Result<Distinction> {
    let (i3f, i3g) = (invariant_i3(f)?, invariant_i3(g)?);
    if i3f.near_zero(1e-12, 1.0) || i3g.near_zero(1e-12, 1.0) {
        return Ok(Distinction::Inconclusive);
    }
    let rf = invariant_i6(f)? / (i3f.clone() * i3f);
    let rg = invariant_i6(g)? / (i3g.clone() * i3g);
    Ok(if rf.approx_eq(&rg, tol) { Distinction::Inconclusive } else { Distinction::ProvablyInequivalent })
}

/// Eigenvalues of the quadratic form `Delta f`, divided by the eigenvalue of
/// largest magnitude and sorted ascending.
pub fn laplacian_spectrum_ratios<S: Scalar>(f: &HomogeneousForm<S>) -> Result<Vec<f64>> {
    let q = f.laplacian()?;
    if q.degree() != 2 {
        return Err(Error::WrongShape("Laplacian ratios need a quartic".into()));
    }
    let n = f.n();
    let mat = Matrix::from_fn(n, n, |i, j| {
        let mut e = vec![0u32; n];
        e[i] += 1;
        e[j] += 1;
        let c = q.coeff(&e).to_f64();
        if i == j { c } else { c / 2.0 }
    });
    let ev = symmetric_eigenvalues(&mat);
    let lead = ev.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
    if lead == 0.0 {
        return Err(Error::ZeroInput("Laplacian vanishes".into()));
    }
    let mut r: Vec<f64> = ev.iter().map(|v| v / lead).collect();
    r.sort_by(|a, b| a.total_cmp(b));
    Ok(r)
}

/// At critical points of `||m||^2` two forms are projectively equivalent only
/// through an orthogonal map, which preserves the spectrum of `Delta f` up to scale.
pub fn laplacian_ratio_distinguish<S: Scalar>(f: &HomogeneousForm<S>, g: &HomogeneousForm<S>, tol: f64) -> Result<Distinction> {
    for (name, h) in [("first", f), ("second", g)] {
        if !is_critical_form(h, 1e-8)?.is_critical() {
            return Err(Error::Precondition(format!("{name} form is not a critical point of the moment map norm")));
        }
    }
    let (rf, rg) = (laplacian_spectrum_ratios(f)?, laplacian_spectrum_ratios(g)?);
    let same = rf.len() == rg.len() && rf.iter().zip(&rg).all(|(a, b)| (a - b).abs() <= tol);
    Ok(if same { Distinction::Inconclusive } else { Distinction::ProvablyInequivalent })
}
