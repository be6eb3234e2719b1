//! Randomized property checks shared by the proptest suite and the acceptance run.
//! Each check draws its instance from a seed and returns a description of the
//! first violation.

#![allow(dead_code)]

use nilform::algebra::{act, GroupElement, TwoStepAlgebra};
use nilform::catalog::{prop41, prop42, prop43, prop44, prop45};
use nilform::invariants::{hankel, invariant_i3, invariant_i6};
use nilform::linalg::{symmetric_eigenvalues, Matrix};
use nilform::nilsoliton::{gradient_flow, moment_map, FlowOptions};
use nilform::pencil::{mobius_act, pencil_isomorphic, ComplexPair, Isomorphism, MobiusMap, PencilSet, RealPair, RealPoint};
use nilform::polynomials::{pfaffian_form, HomogeneousForm};
use nilform::{Scalar, Q};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

/// Small integer entries, redrawn until invertible.
pub fn random_invertible(rng: &mut ChaCha8Rng, size: usize) -> Matrix<Q> {
    loop {
        let a = Matrix::from_fn(size, size, |_, _| Q::from_i64(rng.gen_range(-2..=2)));
        if !a.determinant().is_zero() {
            return a;
        }
    }
}

/// Cayley transform `(I - S)(I + S)^-1` of a random integer skew matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, size: usize) -> Matrix<Q> {
    let mut s = Matrix::<Q>::zeros(size, size);
    for i in 0..size {
        for j in i + 1..size {
            let v = Q::from_i64(rng.gen_range(-2..=2));
            s[(i, j)] = v.clone();
            s[(j, i)] = -v;
        }
    }
    let id = Matrix::identity(size);
    id.sub(&s).mul(&id.add(&s).inverse().expect("I + S is invertible for skew S"))
}

/// Nonzero algebra of a random type with integer constants in `[-3, 3]`.
pub fn random_algebra(rng: &mut ChaCha8Rng) -> TwoStepAlgebra<Q> {
    let (n, m) = [(2, 4), (3, 4), (2, 6), (3, 6), (2, 5)][rng.gen_range(0..5)];
    let mut brackets = vec![(0, 1, 0, Q::from_i64(rng.gen_range(1..=3)))];
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..n {
                if (i, j, k) != (0, 1, 0) && rng.gen_bool(0.4) {
                    brackets.push((i, j, k, Q::from_i64(rng.gen_range(-3..=3))));
                }
            }
        }
    }
    TwoStepAlgebra::from_brackets(m, n, brackets).unwrap()
}

/// `f_{g mu}(z) = det(psi)^-1 f_mu(phi^T z)`.
pub fn pfaffian_equivariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let mu = loop {
        let mu = random_algebra(&mut r);
        if mu.m().is_multiple_of(2) {
            break mu;
        }
    };
    let psi = random_invertible(&mut r, mu.m());
    let phi = random_invertible(&mut r, mu.n());
    let det = psi.determinant();
    let g = GroupElement::new(psi, phi.clone()).map_err(|e| e.to_string())?;
    let moved = act(&g, &mu).map_err(|e| e.to_string())?;
    let lhs = pfaffian_form(&moved).map_err(|e| e.to_string())?;
    let rhs = pfaffian_form(&mu).map_err(|e| e.to_string())?.compose(&phi.transpose()).scale(&(Q::one() / det));
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("seed {seed}: {lhs} != {rhs}"))
    }
}

/// `m(k . mu) = (psi m1 psi^T, phi m2 phi^T)` for orthogonal `(psi, phi)`, and
/// `m(c mu) = m(mu)`.
pub fn moment_equivariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let mu = random_algebra(&mut r);
    let psi = random_orthogonal(&mut r, mu.m());
    let phi = random_orthogonal(&mut r, mu.n());
    let base = moment_map(&mu).map_err(|e| e.to_string())?;
    let g = GroupElement::new(psi.clone(), phi.clone()).map_err(|e| e.to_string())?;
    let moved = moment_map(&act(&g, &mu).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if moved.m1 != psi.mul(&base.m1).mul(&psi.transpose()) {
        return Err(format!("seed {seed}: m1 not equivariant"));
    }
    if moved.m2 != phi.mul(&base.m2).mul(&phi.transpose()) {
        return Err(format!("seed {seed}: m2 not equivariant"));
    }
    let c = q(r.gen_range(1..=9), r.gen_range(1..=9)) * Q::from_i64(if r.gen_bool(0.5) { 1 } else { -1 });
    let scaled = moment_map(&mu.scale(&c)).map_err(|e| e.to_string())?;
    if scaled != base {
        return Err(format!("seed {seed}: not scale invariant under {c}"));
    }
    Ok(())
}

pub fn random_quartic(rng: &mut ChaCha8Rng) -> HomogeneousForm<Q> {
    let mut terms = Vec::new();
    for a in 0..=4u32 {
        for b in 0..=4 - a {
            terms.push((vec![a, b, 4 - a - b], Q::from_i64(rng.gen_range(-4..=4))));
        }
    }
    HomogeneousForm::from_terms(3, 4, terms).unwrap()
}

/// Product of elementary matrices and a determinant-one diagonal.
pub fn random_sl3(rng: &mut ChaCha8Rng) -> Matrix<Q> {
    let mut a = Matrix::<Q>::identity(3);
    for _ in 0..4 {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        if i != j {
            let mut e = Matrix::<Q>::identity(3);
            e[(i, j)] = q(rng.gen_range(-3..=3), rng.gen_range(1..=2));
            a = a.mul(&e);
        }
    }
    let d = q(rng.gen_range(1..=3), rng.gen_range(1..=3));
    let diag = Matrix::diagonal(&[d.clone(), Q::one() / d, Q::one()]);
    a.mul(&diag)
}

pub fn sl3_invariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let f = random_quartic(&mut r);
    let a = random_sl3(&mut r);
    if a.determinant() != Q::one() {
        return Err(format!("seed {seed}: drew det {}", a.determinant()));
    }
    let g = f.compose(&a);
    let pairs = [
        (invariant_i3(&f), invariant_i3(&g), "I3"),
        (invariant_i6(&f), invariant_i6(&g), "I6"),
    ];
    for (x, y, name) in pairs {
        let (x, y) = (x.map_err(|e| e.to_string())?, y.map_err(|e| e.to_string())?);
        if x != y {
            return Err(format!("seed {seed}: {name} changed from {x} to {y}"));
        }
    }
    Ok(())
}

/// Mixed set with rational points: complex pairs, a real pair, sometimes an odd block.
pub fn random_pencil(rng: &mut ChaCha8Rng) -> PencilSet<Q> {
    let complex = (0..rng.gen_range(1..=3))
        .map(|_| ComplexPair { re: q(rng.gen_range(-6..=6), rng.gen_range(1..=3)), im: q(rng.gen_range(1..=8), rng.gen_range(1..=3)), k: rng.gen_range(1..=2) })
        .collect();
    let real = (0..rng.gen_range(0..=2))
        .map(|_| {
            let a = if rng.gen_bool(0.2) { RealPoint::Infinity } else { RealPoint::Finite(q(rng.gen_range(-5..=5), rng.gen_range(1..=2))) };
            RealPair { a, j: rng.gen_range(1..=2) }
        })
        .collect();
    let eps = if rng.gen_bool(0.3) { vec![rng.gen_range(1..=2)] } else { vec![] };
    PencilSet::new(complex, real, eps).unwrap()
}

pub fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusMap<Q> {
    loop {
        let mut e = || Q::from_i64(rng.gen_range(-4..=4));
        if let Ok(t) = MobiusMap::new(e(), e(), e(), e()) {
            return t;
        }
    }
}

/// Order-free description of a set.
pub fn canonical(s: &PencilSet<Q>) -> (Vec<(Q, Q, usize)>, Vec<(Option<Q>, usize)>, Vec<usize>) {
    let mut c: Vec<_> = s.complex().iter().map(|p| (p.re.clone(), p.im.clone(), p.k)).collect();
    let mut r: Vec<_> = s
        .real()
        .iter()
        .map(|p| match &p.a {
            RealPoint::Finite(a) => (Some(a.clone()), p.j),
            RealPoint::Infinity => (None, p.j),
        })
        .collect();
    let mut e = s.eps().to_vec();
    c.sort_by(|a, b| (&a.0, &a.1, a.2).cmp(&(&b.0, &b.1, b.2)));
    r.sort();
    e.sort();
    (c, r, e)
}

/// `pencil_isomorphic(S, T S)` is `Isomorphic` and its witness carries `S` onto `T S`.
pub fn isomorphic_pair(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = random_pencil(&mut r);
    let t = random_mobius(&mut r);
    let ts = mobius_act(&t, &s);
    match pencil_isomorphic(&s, &ts) {
        Isomorphism::Isomorphic { witness } if canonical(&mobius_act(&witness, &s)) == canonical(&ts) => Ok(()),
        Isomorphism::Isomorphic { .. } => Err(format!("seed {seed}: witness does not map S onto T S")),
        Isomorphism::NotIsomorphic => Err(format!("seed {seed}: missed T = {t:?}")),
    }
}

/// Identity acts trivially and `T2 (T1 S) = (T2 T1) S`.
pub fn mobius_laws(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = random_pencil(&mut r);
    if canonical(&mobius_act(&MobiusMap::identity(), &s)) != canonical(&s) {
        return Err(format!("seed {seed}: identity moved the set"));
    }
    let (t1, t2) = (random_mobius(&mut r), random_mobius(&mut r));
    let two_steps = mobius_act(&t2, &mobius_act(&t1, &s));
    let composed = mobius_act(&t2.compose(&t1), &s);
    if canonical(&two_steps) != canonical(&composed) {
        return Err(format!("seed {seed}: action is not compatible with composition"));
    }
    isomorphic_pair(seed)
}

/// The sampled objective never increases along the normalized flow.
pub fn flow_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let (n, m) = [(2, 4), (3, 4), (2, 5), (2, 6)][r.gen_range(0..4)];
    let mut brackets = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..n {
                brackets.push((i, j, k, r.gen_range(-1.0..1.0)));
            }
        }
    }
    let mu = TwoStepAlgebra::from_brackets(m, n, brackets).unwrap();
    let opts = FlowOptions { max_iter: 300, sample_every: 1, ..FlowOptions::default() };
    let report = gradient_flow(&mu, &opts).map_err(|e| e.to_string())?;
    for (i, w) in report.trajectory_norms.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + 1e-12) {
            return Err(format!("seed {seed}: objective rose from {} to {} at sample {i}", w[0], w[1]));
        }
    }
    Ok(())
}

/// Hankel matrix of a catalog Pfaffian drawn from a parameter range where the
/// form is a positive combination of fourth powers; eigenvalues must be
/// nonnegative up to `1e-9` of the largest.
pub fn hankel_psd(seed: u64) -> Check {
    let mut r = rng(seed);
    let family = r.gen_range(0..5);
    let f: HomogeneousForm<f64> = match family {
        0 => {
            let mut t = || q(r.gen_range(2..=8), 4);
            pfaffian_form(&prop41(t(), t(), t())).map_err(|e| e.to_string())?.to_float()
        }
        1 => pfaffian_form(&prop42(r.gen_range(2.0..6.0)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
        2 => pfaffian_form(&prop43(r.gen_range(1.1..4.0)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?,
        3 => pfaffian_form(&prop44(q(r.gen_range(2..=20), 2))).map_err(|e| e.to_string())?.to_float(),
        _ => pfaffian_form(&prop45(q(r.gen_range(2..=20), 2))).map_err(|e| e.to_string())?.to_float(),
    };
    let f = if f.coeff(&[4, 0, 0]) < 0.0 { f.neg() } else { f };
    let ev = symmetric_eigenvalues(&hankel(&f).map_err(|e| e.to_string())?);
    let top = ev.iter().fold(0f64, |a, v| a.max(v.abs()));
    match ev.first() {
        Some(&low) if low >= -1e-9 * top => Ok(()),
        _ => Err(format!("seed {seed}: family {family} has Hankel spectrum {ev:?}")),
    }
}
