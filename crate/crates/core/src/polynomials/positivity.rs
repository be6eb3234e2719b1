//! Positivity of forms off the origin, and stability of binary forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::univariate::UPoly;
use super::HomogeneousForm;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind, Q};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Positive,
    NegativeDefinite,
    VanishesOffOrigin { zero: Vec<f64> },
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub min_on_sphere: f64,
    pub max_on_sphere: f64,
    /// Unit vector at which `min_on_sphere` is attained.
    pub witness: Vec<f64>,
    pub seed: u64,
    /// `||f||` under the form inner product; thresholds are relative to it.
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct PositivityOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Positive when the minimum exceeds `tau_pos * ||f||`.
    pub tau_pos: f64,
    /// A point with `|f| < zero_tol * ||f||` is accepted as a zero.
    pub zero_tol: f64,
}

impl Default for PositivityOptions {
    fn default() -> Self {
        Self { starts: 64, seed: 0, max_iter: 400, tau_pos: 1e-7, zero_tol: 1e-10 }
    }
}

/// Decides whether `f` is nonzero off the origin, and with which sign.
///
/// Exact for one and two variables (Sturm sequences on rationalized
/// coefficients); numeric multi-start minimization on the sphere otherwise.
pub fn is_positive_form<S: Scalar>(f: &HomogeneousForm<S>, opts: &PositivityOptions) -> PositivityReport {
    let n = f.n();
    let norm = f.norm_sq().to_f64().max(0.0).sqrt();
    let ff = f.to_float();
    let (min_on_sphere, witness) = sphere_extremum(&ff, opts, 1.0);
    let (max_on_sphere, max_point) = sphere_extremum(&ff, opts, -1.0);
    let mut report = PositivityReport {
        verdict: Verdict::Indeterminate,
        min_on_sphere,
        max_on_sphere,
        witness: witness.clone(),
        seed: opts.seed,
        norm,
    };
    if f.is_zero() {
        let mut e = vec![0.0; n.max(1)];
        e[0] = 1.0;
        report.verdict = Verdict::VanishesOffOrigin { zero: e };
        return report;
    }
    if f.degree() == 0 {
        report.verdict = sign_verdict(f.coeff(&vec![0; n]).sign());
        return report;
    }
    if n == 1 {
        // c x^d: nonzero off the origin whenever c != 0; odd degree takes the sign of c.
        report.verdict = sign_verdict(f.coeff(&[f.degree()]).sign());
        return report;
    }
    let zero_tol = opts.zero_tol * norm;
    if n == 2 {
        report.verdict = binary_verdict(f);
        if S::KIND == ScalarKind::Float && !matches!(report.verdict, Verdict::VanishesOffOrigin { .. }) {
            let near = if min_on_sphere.abs() < zero_tol { Some(&witness) } else if max_on_sphere.abs() < zero_tol { Some(&max_point) } else { None };
            if let Some(p) = near {
                report.verdict = Verdict::VanishesOffOrigin { zero: p.clone() };
            }
        }
        if let Verdict::VanishesOffOrigin { zero } = &mut report.verdict {
            if zero.is_empty() {
                *zero = locate_zero(&ff, &witness, &max_point, min_on_sphere, max_on_sphere, zero_tol);
            }
        }
        return report;
    }
    let pos = opts.tau_pos * norm;
    report.verdict = if min_on_sphere > pos {
        Verdict::Positive
    } else if max_on_sphere < -pos {
        Verdict::NegativeDefinite
    } else if min_on_sphere.abs() < zero_tol {
        Verdict::VanishesOffOrigin { zero: witness.clone() }
    } else if max_on_sphere.abs() < zero_tol {
        Verdict::VanishesOffOrigin { zero: max_point.clone() }
    } else if min_on_sphere < 0.0 && max_on_sphere > 0.0 {
        Verdict::VanishesOffOrigin {
            zero: locate_zero(&ff, &witness, &max_point, min_on_sphere, max_on_sphere, zero_tol),
        }
    } else {
        Verdict::Indeterminate
    };
    report
}

fn sign_verdict(s: i32) -> Verdict {
    match s {
        1 => Verdict::Positive,
        -1 => Verdict::NegativeDefinite,
        _ => Verdict::VanishesOffOrigin { zero: Vec::new() },
    }
}

/// Exact decision for binary forms: `f(0, 1) != 0` and `f(1, y)` has no real root.
/// Float coefficients are rationalized through their decimal representation.
fn binary_verdict<S: Scalar>(f: &HomogeneousForm<S>) -> Verdict {
    let d = f.degree() as usize;
    let mut coeffs = vec![Q::from_i64(0); d + 1];
    for (e, c) in f.terms() {
        coeffs[e[1] as usize] = c.to_rational().unwrap_or_else(|| Q::from_i64(0));
    }
    let at_infinity = coeffs[d].clone();
    let p = UPoly::new(coeffs);
    if at_infinity.sign() == 0 {
        return Verdict::VanishesOffOrigin { zero: vec![0.0, 1.0] };
    }
    if p.count_real_roots() > 0 {
        return Verdict::VanishesOffOrigin { zero: Vec::new() };
    }
    // No zeros on the circle, so the sign is that of f(0, 1).
    sign_verdict(at_infinity.sign())
}

/// Sphere minimum of `sign * f`, returned as the value of `f` there, from deterministic starts: the signed
/// coordinate axes followed by a randomly shifted Halton sequence.
fn sphere_extremum(f: &HomogeneousForm<f64>, opts: &PositivityOptions, sign: f64) -> (f64, Vec<f64>) {
    let n = f.n();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let grads: Vec<HomogeneousForm<f64>> = (0..n).map(|i| f.partial(i)).collect();
    let value = |x: &[f64]| sign * f.eval_f64(x);
    let gradient = |x: &[f64]| grads.iter().map(|g| sign * g.eval_f64(x)).collect::<Vec<f64>>();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in start_points(n, opts.starts, opts.seed) {
        let (v, x) = descend(&start, &value, &gradient, opts.max_iter);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
    }
    let (v, x) = best.unwrap();
    (sign * v, x)
}

fn start_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let mut out = Vec::with_capacity(count.max(2 * n));
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            out.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut idx = 1u32;
    while out.len() < count {
        let p: Vec<f64> = (0..n)
            .map(|k| {
                let base = PRIMES.get(k).copied().unwrap_or(2 + k as u32);
                let h = (radical_inverse(idx, base) + shift[k]).fract();
                2.0 * h - 1.0
            })
            .collect();
        idx += 1;
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-3 {
            out.push(p.iter().map(|v| v / norm).collect());
        }
    }
    out
}

fn radical_inverse(mut i: u32, base: u32) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    acc
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in x.iter_mut() {
        *v /= norm;
    }
}

/// Projected gradient descent on the unit sphere with backtracking.
fn descend(
    start: &[f64],
    value: &impl Fn(&[f64]) -> f64,
    gradient: &impl Fn(&[f64]) -> Vec<f64>,
    max_iter: usize,
) -> (f64, Vec<f64>) {
    let mut x = start.to_vec();
    let mut fx = value(&x);
    let mut step = 0.5;
    for _ in 0..max_iter {
        let g = gradient(&x);
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        let tangent: Vec<f64> = g.iter().zip(&x).map(|(a, b)| a - radial * b).collect();
        let tnorm = tangent.iter().map(|v| v * v).sum::<f64>().sqrt();
        if tnorm < 1e-14 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let mut y: Vec<f64> = x.iter().zip(&tangent).map(|(a, t)| a - step * t).collect();
            normalize(&mut y);
            let fy = value(&y);
            if fy < fx - 1e-4 * step * tnorm * tnorm {
                x = y;
                fx = fy;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (fx, x)
}

/// A point on the unit sphere where `f` changes sign, found by bisection between
/// a negative and a positive point.
fn locate_zero(f: &HomogeneousForm<f64>, lo_point: &[f64], hi_point: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    if lo.abs() <= tol {
        return lo_point.to_vec();
    }
    if hi.abs() <= tol || lo > 0.0 || hi < 0.0 {
        return hi_point.to_vec();
    }
    let n = lo_point.len();
    let mut a = lo_point.to_vec();
    let mut b = hi_point.to_vec();
    // Antipodal endpoints: route through a point orthogonal to `a`.
    if a.iter().zip(&b).map(|(p, q)| (p + q).abs()).sum::<f64>() < 1e-6 {
        let k = (0..n).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
        let mut c: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        let dot = c[k] * a[k];
        for i in 0..n {
            c[i] -= dot * a[i];
        }
        normalize(&mut c);
        if f.eval_f64(&c) >= 0.0 {
            b = c;
        } else {
            a = c;
        }
    }
    let point = |s: f64| {
        let mut p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (1.0 - s) * x + s * y).collect();
        normalize(&mut p);
        p
    };
    let (mut s0, mut s1) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (s0 + s1);
        if f.eval_f64(&point(mid)) < 0.0 {
            s0 = mid;
        } else {
            s1 = mid;
        }
    }
    point(0.5 * (s0 + s1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    StrictlySemistable,
    Unstable,
}

/// Stability of a binary form under `SL_2`: compares the largest multiplicity
/// of a projective root with `d / 2`. Float forms use a relative gcd tolerance.
pub fn binary_stability<S: Scalar>(f: &HomogeneousForm<S>) -> Result<Stability> {
    if f.n() != 2 {
        return Err(Error::WrongShape(format!("binary form expected, got {} variables", f.n())));
    }
    if f.is_zero() {
        return Err(Error::ZeroInput("stability of the zero form".into()));
    }
    let d = f.degree() as usize;
    let mut coeffs = vec![S::zero(); d + 1];
    for (e, c) in f.terms() {
        coeffs[e[1] as usize] = c.clone();
    }
    let p = UPoly::new(coeffs);
    let at_infinity = d - p.degree().unwrap_or(0);
    let tol = if S::KIND == ScalarKind::Float { 1e-8 } else { 0.0 };
    let mult = p.max_root_multiplicity(tol).max(at_infinity);
    Ok(match (2 * mult).cmp(&d) {
        std::cmp::Ordering::Less => Stability::Stable,
        std::cmp::Ordering::Equal => Stability::StrictlySemistable,
        std::cmp::Ordering::Greater => Stability::Unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(n: usize, d: u32, terms: &[(&[u32], i64)]) -> HomogeneousForm<Q> {
        HomogeneousForm::from_terms(n, d, terms.iter().map(|(e, c)| (e.to_vec(), Q::from_i64(*c)))).unwrap()
    }

    #[test]
    fn sum_of_squares_is_positive() {
        let f = form(3, 2, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]);
        let r = is_positive_form(&f, &PositivityOptions::default());
        assert_eq!(r.verdict, Verdict::Positive);
        assert!((r.min_on_sphere - 1.0).abs() < 1e-9);
    }

    #[test]
    fn indefinite_quartic_vanishes() {
        let f = form(3, 4, &[(&[4, 0, 0], 1), (&[0, 4, 0], 1), (&[0, 0, 4], 1), (&[2, 2, 0], -4)]);
        let r = is_positive_form(&f, &PositivityOptions::default());
        let Verdict::VanishesOffOrigin { zero } = &r.verdict else { panic!("{:?}", r.verdict) };
        assert!(f.to_float().eval_f64(zero).abs() < 1e-9);
        assert!(r.min_on_sphere < 0.0);
    }

    #[test]
    fn binary_exact_path() {
        // (x^2 + y^2)(x^2 + 2y^2)
        let f = form(2, 4, &[(&[4, 0], 1), (&[2, 2], 3), (&[0, 4], 2)]);
        assert_eq!(is_positive_form(&f, &PositivityOptions::default()).verdict, Verdict::Positive);
        // x y^3 vanishes on both axes
        let g = form(2, 4, &[(&[1, 3], 1)]);
        assert!(matches!(is_positive_form(&g, &PositivityOptions::default()).verdict, Verdict::VanishesOffOrigin { .. }));
        let h = form(2, 2, &[(&[2, 0], -1), (&[0, 2], -3)]);
        assert_eq!(is_positive_form(&h, &PositivityOptions::default()).verdict, Verdict::NegativeDefinite);
    }

    #[test]
    fn univariate_sign_convention() {
        let f = form(1, 1, &[(&[1], -2)]);
        assert_eq!(is_positive_form(&f, &PositivityOptions::default()).verdict, Verdict::NegativeDefinite);
        let g = form(1, 3, &[(&[3], 5)]);
        assert_eq!(is_positive_form(&g, &PositivityOptions::default()).verdict, Verdict::Positive);
    }

    #[test]
    fn stability_classes() {
        let sq = form(2, 4, &[(&[4, 0], 1), (&[2, 2], 2), (&[0, 4], 1)]);
        assert_eq!(binary_stability(&sq).unwrap(), Stability::StrictlySemistable);
        let st = form(2, 4, &[(&[4, 0], 4), (&[2, 2], 5), (&[0, 4], 1)]);
        assert_eq!(binary_stability(&st).unwrap(), Stability::Stable);
        let x4 = form(2, 4, &[(&[4, 0], 1)]);
        assert_eq!(binary_stability(&x4).unwrap(), Stability::Unstable);
        assert_eq!(binary_stability(&x4.to_float()).unwrap(), Stability::Unstable);
        assert_eq!(binary_stability(&sq.to_float()).unwrap(), Stability::StrictlySemistable);
    }
}
