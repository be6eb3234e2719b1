use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::TwoStepAlgebra;
use crate::error::{Error, Result};
use crate::polynomials::HomogeneousForm;
use crate::scalar::Scalar;

/// A point of the real projective line.
#[derive(Clone, Debug, PartialEq)]
pub enum RealPoint<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> RealPoint<S> {
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (RealPoint::Finite(a), RealPoint::Finite(b)) => a.approx_eq(b, tol),
            (RealPoint::Infinity, RealPoint::Infinity) => true,
            _ => false,
        }
    }

    pub fn to_float(&self) -> RealPoint<f64> {
        match self {
            RealPoint::Finite(a) => RealPoint::Finite(a.to_f64()),
            RealPoint::Infinity => RealPoint::Infinity,
        }
    }
}

/// A non-real eigenvalue `re + i im` with its block multiplicity `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPair<S> {
    pub re: S,
    pub im: S,
    pub k: usize,
}

/// A real (or infinite) eigenvalue with its block multiplicity `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPair<S> {
    pub a: RealPoint<S>,
    pub j: usize,
}

/// The datum classifying a 2-step algebra of type `(2, m)`: complex pairs
/// (kept in the upper half-plane), real pairs and odd blocks of size `2 eps + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilSet<S> {
    complex: Vec<ComplexPair<S>>,
    real: Vec<RealPair<S>>,
    eps: Vec<usize>,
}

impl<S: Scalar> PencilSet<S> {
    /// Validates multiplicities and moves every complex point to `Im > 0`.
    pub fn new(complex: Vec<ComplexPair<S>>, real: Vec<RealPair<S>>, eps: Vec<usize>) -> Result<Self> {
        let mut out = Vec::with_capacity(complex.len());
        for p in complex {
            if p.im.is_zero() {
                return Err(Error::Precondition(format!("complex point {} has zero imaginary part", p.re)));
            }
            if p.k == 0 {
                return Err(Error::Precondition("multiplicities must be positive".into()));
            }
            let im = if p.im.sign() < 0 { -p.im } else { p.im };
            out.push(ComplexPair { re: p.re, im, k: p.k });
        }
        if real.iter().any(|p| p.j == 0) || eps.contains(&0) {
            return Err(Error::Precondition("multiplicities must be positive".into()));
        }
        Ok(Self { complex: out, real, eps })
    }

    /// Only complex points `(re, im, k)`.
    pub fn from_complex(points: &[(S, S, usize)]) -> Result<Self> {
        let complex = points.iter().map(|(re, im, k)| ComplexPair { re: re.clone(), im: im.clone(), k: *k }).collect();
        Self::new(complex, Vec::new(), Vec::new())
    }

    pub fn complex(&self) -> &[ComplexPair<S>] {
        &self.complex
    }

    pub fn real(&self) -> &[RealPair<S>] {
        &self.real
    }

    pub fn eps(&self) -> &[usize] {
        &self.eps
    }

    /// `sum 4k` over complex pairs, `sum 2j` over real pairs, `sum (2 eps + 1)`.
    pub fn m(&self) -> usize {
        self.complex.iter().map(|p| 4 * p.k).sum::<usize>()
            + self.real.iter().map(|p| 2 * p.j).sum::<usize>()
            + self.eps.iter().map(|e| 2 * e + 1).sum::<usize>()
    }

    pub fn to_float(&self) -> PencilSet<f64> {
        PencilSet {
            complex: self.complex.iter().map(|p| ComplexPair { re: p.re.to_f64(), im: p.im.to_f64(), k: p.k }).collect(),
            real: self.real.iter().map(|p| RealPair { a: p.a.to_float(), j: p.j }).collect(),
            eps: self.eps.clone(),
        }
    }
}

impl<S: Scalar> fmt::Display for PencilSet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for p in &self.complex {
            parts.push(format!("({} + {}i, {})", p.re, p.im, p.k));
        }
        for p in &self.real {
            match &p.a {
                RealPoint::Finite(a) => parts.push(format!("({a}, {})", p.j)),
                RealPoint::Infinity => parts.push(format!("(inf, {})", p.j)),
            }
        }
        for e in &self.eps {
            parts.push(format!("eps {e}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Upper-right block entries `(row, col, var) -> coefficient` of `J(x Z_1 + y Z_2)`.
struct Blocks<S> {
    entries: BTreeMap<(usize, usize, usize), S>,
}

const X: usize = 0;
const Y: usize = 1;

impl<S: Scalar> Blocks<S> {
    fn put(&mut self, row: usize, col: usize, var: usize, c: S) {
        if !c.is_zero() {
            self.entries.insert((row, col, var), c);
        }
    }

    /// `y - a x` at `(row, col)`.
    fn put_shifted(&mut self, row: usize, col: usize, a: &S) {
        self.put(row, col, Y, S::one());
        self.put(row, col, X, -a.clone());
    }
}

/// Assembles `J(x Z_1 + y Z_2)` block-diagonally, complex pairs first, then
/// real pairs, then odd blocks; each block is `[[0, B], [-B^T, 0]]`.
pub fn build_pencil_algebra<S: Scalar>(s: &PencilSet<S>) -> TwoStepAlgebra<S> {
    let mut b = Blocks { entries: BTreeMap::new() };
    let mut off = 0;
    for p in &s.complex {
        let k = p.k;
        let half = 2 * k;
        for r in 1..=k {
            for c in 1..=k {
                let (row, col) = (off + 2 * (r - 1), off + half + 2 * (c - 1));
                if r + c == k + 1 {
                    b.put(row, col, X, -p.im.clone());
                    b.put_shifted(row, col + 1, &p.re);
                    b.put_shifted(row + 1, col, &p.re);
                    b.put(row + 1, col + 1, X, p.im.clone());
                } else if r + c == k + 2 {
                    b.put(row, col + 1, X, S::one());
                    b.put(row + 1, col, X, S::one());
                }
            }
        }
        off += 4 * k;
    }
    for p in &s.real {
        let k = p.j;
        for r in 1..=k {
            for c in 1..=k {
                let (row, col) = (off + r - 1, off + k + c - 1);
                match (&p.a, r + c) {
                    (RealPoint::Finite(a), sum) if sum == k + 1 => b.put_shifted(row, col, a),
                    (RealPoint::Finite(_), sum) if sum == k + 2 => b.put(row, col, X, S::one()),
                    (RealPoint::Infinity, sum) if sum == k + 1 => b.put(row, col, X, S::one()),
                    (RealPoint::Infinity, sum) if sum == k + 2 => b.put(row, col, Y, S::one()),
                    _ => {}
                }
            }
        }
        off += 2 * k;
    }
    for &e in &s.eps {
        for c in 0..e {
            b.put(off + c, off + e + 1 + c, Y, S::one());
            b.put(off + c + 1, off + e + 1 + c, X, S::one());
        }
        off += 2 * e + 1;
    }
    // J(Z_k)_{ij} = -mu_ij^k.
    let brackets = b.entries.into_iter().map(|((i, j, k), c)| (i, j, k, -c));
    TwoStepAlgebra::from_brackets(off, 2, brackets).expect("pencil blocks are well formed")
}

/// `x^(sum over infinity) prod (y - a x)^j prod ((y - re x)^2 + im^2 x^2)^k`.
///
/// With odd blocks present the Pfaffian vanishes identically (zero form of
/// degree `m / 2`); an odd total dimension is an error.
pub fn pencil_pfaffian<S: Scalar>(s: &PencilSet<S>) -> Result<HomogeneousForm<S>> {
    let m = s.m();
    if m % 2 == 1 {
        return Err(Error::OddDimension(m));
    }
    if !s.eps.is_empty() {
        return Ok(HomogeneousForm::zero(2, (m / 2) as u32));
    }
    let x = HomogeneousForm::<S>::variable(2, X);
    let shifted = |a: &S| HomogeneousForm::linear(&[-a.clone(), S::one()]);
    let mut f = HomogeneousForm::constant(2, S::one());
    for p in &s.real {
        let factor = match &p.a {
            RealPoint::Finite(a) => shifted(a),
            RealPoint::Infinity => x.clone(),
        };
        f = f.mul(&factor.pow(p.j as u32));
    }
    for p in &s.complex {
        let l = shifted(&p.re);
        let q = l.mul(&l).add(&x.mul(&x).scale(&(p.im.clone() * p.im.clone())));
        f = f.mul(&q.pow(p.k as u32));
    }
    Ok(f)
}

/// Nonsingular exactly when there are only complex pairs.
pub fn is_nonsingular_pencil<S: Scalar>(s: &PencilSet<S>) -> bool {
    !s.complex.is_empty() && s.real.is_empty() && s.eps.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_nonsingular, is_type_nm};
    use crate::polynomials::pfaffian_form;
    use crate::scalar::Q;

    fn q(v: i64) -> Q {
        Q::from_i64(v)
    }

    fn same_up_to_sign(f: &HomogeneousForm<Q>, g: &HomogeneousForm<Q>) -> bool {
        f == g || *f == g.neg()
    }

    #[test]
    fn single_complex_block() {
        let s = PencilSet::from_complex(&[(q(0), q(1), 1)]).unwrap();
        let alg = build_pencil_algebra(&s);
        assert_eq!((alg.n(), alg.m()), (2, 4));
        let expected = HomogeneousForm::from_terms(2, 2, [(vec![2, 0], q(1)), (vec![0, 2], q(1))]).unwrap();
        assert!(same_up_to_sign(&pfaffian_form(&alg).unwrap(), &expected));
        assert_eq!(pencil_pfaffian(&s).unwrap(), expected);
        assert!(is_nonsingular(&alg));
    }

    #[test]
    fn lower_half_plane_is_reflected() {
        let s = PencilSet::from_complex(&[(q(1), q(-2), 1)]).unwrap();
        assert_eq!(s.complex()[0].im, q(2));
        assert!(PencilSet::from_complex(&[(q(1), q(0), 1)]).is_err());
    }

    #[test]
    fn closed_form_matches_blocks() {
        let s = PencilSet::new(
            vec![ComplexPair { re: q(1), im: q(2), k: 2 }],
            vec![
                RealPair { a: RealPoint::Finite(q(3)), j: 2 },
                RealPair { a: RealPoint::Infinity, j: 3 },
            ],
            vec![],
        )
        .unwrap();
        let alg = build_pencil_algebra(&s);
        assert_eq!(alg.m(), 18);
        assert!(is_type_nm(&alg));
        assert!(same_up_to_sign(&pfaffian_form(&alg).unwrap(), &pencil_pfaffian(&s).unwrap()));
        assert!(!is_nonsingular(&alg));
        assert!(!is_nonsingular_pencil(&s));
    }

    #[test]
    fn odd_block() {
        let s = PencilSet::<Q>::new(vec![], vec![], vec![1]).unwrap();
        let alg = build_pencil_algebra(&s);
        assert_eq!(alg.m(), 3);
        assert!(is_type_nm(&alg));
        assert!(!is_nonsingular(&alg));
        assert!(pencil_pfaffian(&s).is_err());
        let s = PencilSet::<Q>::new(vec![], vec![], vec![1, 2]).unwrap();
        assert!(pencil_pfaffian(&s).unwrap().is_zero());
        assert!(pfaffian_form(&build_pencil_algebra(&s)).unwrap().is_zero());
    }
}
