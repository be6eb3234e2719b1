use serde::Serialize;

use super::set::{ComplexPair, PencilSet, RealPair, RealPoint};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Tolerance for matching float points.
pub const MATCH_TOL: f64 = 1e-9;

/// `T z = (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMap<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

impl<S: Scalar> MobiusMap<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self> {
        let t = Self { a, b, c, d };
        if t.det().near_zero(1e-12, t.scale()) {
            return Err(Error::Singular("Mobius matrix has zero determinant".into()));
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Self { a: S::one(), b: S::zero(), c: S::zero(), d: S::one() }
    }

    pub fn det(&self) -> S {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    fn scale(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d].iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max).powi(2)
    }

    /// `self o other`, the matrix product.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&other.a, &other.b, &other.c, &other.d);
        Self {
            a: a.clone() * e.clone() + b.clone() * g.clone(),
            b: a.clone() * f.clone() + b.clone() * h.clone(),
            c: c.clone() * e.clone() + d.clone() * g.clone(),
            d: c.clone() * f.clone() + d.clone() * h.clone(),
        }
    }

    /// Image of `re + i im`, reflected back to the upper half-plane.
    pub fn apply_complex(&self, re: &S, im: &S) -> (S, S) {
        let nr = self.a.clone() * re.clone() + self.b.clone();
        let ni = self.a.clone() * im.clone();
        let dr = self.c.clone() * re.clone() + self.d.clone();
        let di = self.c.clone() * im.clone();
        let den = dr.clone() * dr.clone() + di.clone() * di.clone();
        let out_re = (nr.clone() * dr.clone() + ni.clone() * di.clone()) / den.clone();
        let out_im = (ni * dr - nr * di) / den;
        let out_im = if out_im.sign() < 0 { -out_im } else { out_im };
        (out_re, out_im)
    }

    pub fn apply_real(&self, p: &RealPoint<S>) -> RealPoint<S> {
        match p {
            RealPoint::Finite(x) => {
                let den = self.c.clone() * x.clone() + self.d.clone();
                let num = self.a.clone() * x.clone() + self.b.clone();
                if den.near_zero(1e-12, 1f64.max(num.to_f64().abs())) {
                    RealPoint::Infinity
                } else {
                    RealPoint::Finite(num / den)
                }
            }
            RealPoint::Infinity => {
                if self.c.near_zero(1e-12, self.scale().sqrt()) {
                    RealPoint::Infinity
                } else {
                    RealPoint::Finite(self.a.clone() / self.c.clone())
                }
            }
        }
    }
}

/// Applies `T` to every point; multiplicities and odd blocks are unchanged.
pub fn mobius_act<S: Scalar>(t: &MobiusMap<S>, s: &PencilSet<S>) -> PencilSet<S> {
    let complex = s
        .complex()
        .iter()
        .map(|p| {
            let (re, im) = t.apply_complex(&p.re, &p.im);
            ComplexPair { re, im, k: p.k }
        })
        .collect();
    let real = s.real().iter().map(|p| RealPair { a: t.apply_real(&p.a), j: p.j }).collect();
    PencilSet::new(complex, real, s.eps().to_vec()).expect("Mobius maps preserve the upper half-plane")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Isomorphism<S> {
    /// `mobius_act(witness, left)` equals `right` as weighted point sets.
    Isomorphic { witness: MobiusMap<S> },
    NotIsomorphic,
}

impl<S: Serialize> Serialize for MobiusMap<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        [[&self.a, &self.b], [&self.c, &self.d]].serialize(ser)
    }
}

impl<S> Isomorphism<S> {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Isomorphism::Isomorphic { .. })
    }
}

#[derive(Clone, Debug)]
enum Site<S> {
    Complex(S, S),
    Real(RealPoint<S>),
}

impl<S: Scalar> Site<S> {
    fn same_point(&self, other: &Self) -> bool {
        match (self, other) {
            (Site::Complex(a, b), Site::Complex(c, d)) => a.approx_eq(c, MATCH_TOL) && b.approx_eq(d, MATCH_TOL),
            (Site::Real(p), Site::Real(q)) => p.approx_eq(q, MATCH_TOL),
            _ => false,
        }
    }

    fn equations(&self, target: &Self, conjugate: bool) -> Vec<[S; 4]> {
        let z = S::zero;
        let one = S::one;
        match (self, target) {
            (Site::Complex(pr, pi), Site::Complex(qr, qi)) => {
                let qi = if conjugate { -qi.clone() } else { qi.clone() };
                // a p + b - q (c p + d) = 0, real and imaginary parts.
                vec![
                    [
                        pr.clone(),
                        one(),
                        -(qr.clone() * pr.clone() - qi.clone() * pi.clone()),
                        -qr.clone(),
                    ],
                    [pi.clone(), z(), -(qr.clone() * pi.clone() + qi.clone() * pr.clone()), -qi],
                ]
            }
            (Site::Real(RealPoint::Finite(x)), Site::Real(RealPoint::Finite(y))) => {
                vec![[x.clone(), one(), -(y.clone() * x.clone()), -y.clone()]]
            }
            (Site::Real(RealPoint::Infinity), Site::Real(RealPoint::Finite(y))) => vec![[one(), z(), -y.clone(), z()]],
            (Site::Real(RealPoint::Finite(x)), Site::Real(RealPoint::Infinity)) => vec![[z(), z(), x.clone(), one()]],
            (Site::Real(RealPoint::Infinity), Site::Real(RealPoint::Infinity)) => vec![[z(), z(), one(), z()]],
            _ => unreachable!("anchors are matched within their kind"),
        }
    }
}

/// Weighted sites `(point, multiplicity)` of complex and real pairs.
fn sites<S: Scalar>(s: &PencilSet<S>) -> Vec<(Site<S>, usize)> {
    s.complex()
        .iter()
        .map(|p| (Site::Complex(p.re.clone(), p.im.clone()), p.k))
        .chain(s.real().iter().map(|p| (Site::Real(p.a.clone()), p.j)))
        .collect()
}

fn sorted<T: Ord + Clone>(v: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = v.collect();
    out.sort();
    out
}

/// Whether the weighted sites of `left` and `right` coincide as multisets.
fn same_sites<S: Scalar>(left: &[(Site<S>, usize)], right: &[(Site<S>, usize)]) -> bool {
    let mut used = vec![false; right.len()];
    left.iter().all(|(p, k)| {
        let hit = right.iter().enumerate().position(|(i, (q, j))| !used[i] && j == k && p.same_point(q));
        hit.map(|i| used[i] = true).is_some()
    })
}

/// Decides isomorphism of `mu_S` and `mu_S'`: the odd blocks and the numbers of
/// complex pairs agree, and a real Mobius map carries the weighted points of
/// `S` onto those of `S'`.
///
/// Candidate maps solve the linear conditions `T(anchor) = target` for up to
/// three distinct anchor points of `S` and every assignment of targets of the
/// same kind and weight; each candidate is verified on the whole set.
pub fn pencil_isomorphic<S: Scalar>(left: &PencilSet<S>, right: &PencilSet<S>) -> Isomorphism<S> {
    if sorted(left.eps().iter()) != sorted(right.eps().iter())
        || sorted(left.complex().iter().map(|p| p.k)) != sorted(right.complex().iter().map(|p| p.k))
        || sorted(left.real().iter().map(|p| p.j)) != sorted(right.real().iter().map(|p| p.j))
    {
        return Isomorphism::NotIsomorphic;
    }
    let ls = sites(left);
    let rs = sites(right);
    if ls.is_empty() {
        return Isomorphism::Isomorphic { witness: MobiusMap::identity() };
    }

    let mut anchors: Vec<usize> = Vec::new();
    let mut eqs = 0;
    for (i, (p, _)) in ls.iter().enumerate() {
        if eqs >= 3 {
            break;
        }
        if anchors.iter().all(|&a| !ls[a].0.same_point(p)) {
            anchors.push(i);
            eqs += if matches!(p, Site::Complex(..)) { 2 } else { 1 };
        }
    }

    let mut assignment = Vec::with_capacity(anchors.len());
    let mut found = None;
    search(&ls, &rs, &anchors, &mut assignment, &mut |targets| {
        for conjugate in [false, true] {
            let rows: Vec<Vec<S>> = anchors
                .iter()
                .zip(targets)
                .flat_map(|(&a, &t)| ls[a].0.equations(&rs[t].0, conjugate))
                .map(|r| r.to_vec())
                .collect();
            for t in candidates(&Matrix::from_rows(rows)) {
                if same_sites(&sites(&mobius_act(&t, left)), &rs) {
                    found = Some(t);
                    return true;
                }
            }
        }
        false
    });
    match found {
        Some(witness) => Isomorphism::Isomorphic { witness },
        None => Isomorphism::NotIsomorphic,
    }
}

/// Enumerates injective assignments of anchors to sites of the same kind and
/// weight until `visit` returns true.
fn search<S: Scalar>(
    ls: &[(Site<S>, usize)],
    rs: &[(Site<S>, usize)],
    anchors: &[usize],
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chosen.len() == anchors.len() {
        return visit(chosen);
    }
    let (p, k) = &ls[anchors[chosen.len()]];
    for (i, (q, j)) in rs.iter().enumerate() {
        let kind_ok = matches!((p, q), (Site::Complex(..), Site::Complex(..)) | (Site::Real(_), Site::Real(_)));
        if !kind_ok || j != k || chosen.contains(&i) {
            continue;
        }
        chosen.push(i);
        if search(ls, rs, anchors, chosen, visit) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Invertible maps in the solution space of the anchor equations: the basis
/// vectors and a few small combinations when the space is not a single line.
fn candidates<S: Scalar>(eqs: &Matrix<S>) -> Vec<MobiusMap<S>> {
    let basis = S::nullspace(eqs);
    let mut vecs: Vec<Vec<S>> = basis.clone();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i == j {
                continue;
            }
            for lambda in [1, -1, 2, -3] {
                let l = S::from_i64(lambda);
                vecs.push(basis[i].iter().zip(&basis[j]).map(|(a, b)| a.clone() + l.clone() * b.clone()).collect());
            }
        }
    }
    vecs.into_iter()
        .filter_map(|v| MobiusMap::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).ok())
        .collect()
}
