//! Built-in algebras: Heisenberg and H-type algebras, the type-(3, 8)
//! families, and pencil algebras.
//!
//! Matrices of `J(x Z_1 + y Z_2 + z Z_3)` are written as text grids, one row
//! per line. An entry is a sum of terms `coef*var`, where `coef` is a product
//! or quotient of numbers and named constants (with optional `^power`).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::TwoStepAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pencil::{build_pencil_algebra, PencilSet};
use crate::scalar::{parse_rational, Scalar, Q};

/// An algebra over either scalar kind.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyAlgebra {
    Rational(TwoStepAlgebra<Q>),
    Float(TwoStepAlgebra<f64>),
}

impl AnyAlgebra {
    pub fn to_float(&self) -> TwoStepAlgebra<f64> {
        match self {
            AnyAlgebra::Rational(a) => a.to_float(),
            AnyAlgebra::Float(a) => a.clone(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            AnyAlgebra::Rational(a) => a.m(),
            AnyAlgebra::Float(a) => a.m(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyAlgebra::Rational(a) => a.n(),
            AnyAlgebra::Float(a) => a.n(),
        }
    }
}

/// Value of one coefficient: a signed product/quotient of factors.
fn parse_coef<S: Scalar>(text: &str, consts: &BTreeMap<&str, S>) -> Result<S> {
    if text.is_empty() {
        return Ok(S::one());
    }
    let bad = || Error::Parse(format!("bad coefficient `{text}`"));
    let mut value = S::one();
    let mut divide = false;
    let mut start = 0;
    let bytes = text.as_bytes();
    for end in 0..=text.len() {
        if end < text.len() && bytes[end] != b'*' && bytes[end] != b'/' {
            continue;
        }
        let factor = &text[start..end];
        let (base, power) = match factor.split_once('^') {
            Some((b, p)) => (b, p.parse::<u32>().map_err(|_| bad())?),
            None => (factor, 1),
        };
        let v = match consts.get(base) {
            Some(c) => c.clone(),
            None => S::parse(base).map_err(|_| bad())?,
        }
        .powi(power);
        value = if divide { value / v } else { value * v };
        if end < text.len() {
            divide = bytes[end] == b'/';
        }
        start = end + 1;
    }
    Ok(value)
}

/// Parses one grid entry into coefficients of `vars`.
fn parse_entry<S: Scalar>(text: &str, vars: &[char], consts: &BTreeMap<&str, S>) -> Result<Vec<S>> {
    let mut out = vec![S::zero(); vars.len()];
    if text == "0" {
        return Ok(out);
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        let after_op = i > 0 && matches!(text.as_bytes()[i - 1], b'*' | b'/' | b'^');
        if (ch == '+' || ch == '-') && i > start && !after_op {
            terms.push(&text[start..i]);
            start = i;
        }
    }
    terms.push(&text[start..]);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-S::one(), rest),
            None => (S::one(), term.strip_prefix('+').unwrap_or(term)),
        };
        let var = body.chars().last().ok_or_else(|| Error::Parse(format!("empty term in `{text}`")))?;
        let idx = vars
            .iter()
            .position(|&v| v == var)
            .ok_or_else(|| Error::Parse(format!("term `{term}` does not end in a variable")))?;
        let coef = body[..body.len() - 1].trim_end_matches('*');
        out[idx] = out[idx].clone() + sign * parse_coef(coef, consts)?;
    }
    Ok(out)
}

/// Reads `J(x Z_1 + ...)` from a text grid and returns the algebra; the grid must be skew.
pub fn parse_j_grid<S: Scalar>(grid: &str, vars: &[char], consts: &BTreeMap<&str, S>) -> Result<TwoStepAlgebra<S>> {
    let rows: Vec<Vec<&str>> =
        grid.lines().map(str::split_whitespace).map(Iterator::collect).filter(|r: &Vec<&str>| !r.is_empty()).collect();
    let m = rows.len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::WrongShape("grid is not square".into()));
    }
    let mut js = vec![Matrix::zeros(m, m); vars.len()];
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            for (k, c) in parse_entry(entry, vars, consts)?.into_iter().enumerate() {
                js[k][(i, j)] = c;
            }
        }
    }
    TwoStepAlgebra::from_j_matrices(m, &js)
}

const XYZ: [char; 3] = ['x', 'y', 'z'];

fn grid<S: Scalar>(text: &str, consts: &[(&'static str, S)]) -> TwoStepAlgebra<S> {
    let map: BTreeMap<&str, S> = consts.iter().cloned().collect();
    parse_j_grid(text, &XYZ, &map).expect("built-in grid is valid")
}

/// `[X_{2i-1}, X_{2i}] = Z`, type `(1, 2k)`.
pub fn heisenberg<S: Scalar>(k: usize) -> Result<TwoStepAlgebra<S>> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    TwoStepAlgebra::from_brackets(2 * k, 1, (0..k).map(|i| (2 * i, 2 * i + 1, 0, S::one())))
}

/// Quaternions `H + Im H` with `J(Z_1), J(Z_2), J(Z_3)` left multiplication by `i, j, k`.
pub fn quaternionic<S: Scalar>() -> TwoStepAlgebra<S> {
    grid(
        "0 -x -y -z
         x 0 -z y
         y z 0 -x
         z -y x 0",
        &[],
    )
}

/// `H + H + Im H`: two quaternionic blocks over the same center.
pub fn htype_3_8<S: Scalar>() -> TwoStepAlgebra<S> {
    crate::algebra::shared_center_sum(&quaternionic(), &quaternionic()).expect("same center")
}

/// Type `(3, 8)` with Pfaffian form `x^4 + y^4 + z^4`.
pub fn example_2_2() -> TwoStepAlgebra<f64> {
    let s2 = 2f64.sqrt();
    grid(
        "0 0 x 0 y 0 2y-s2*z 0
         0 0 0 x 0 y 0 y+h*z
         -x 0 0 0 z 0 s2*y 0
         0 -x 0 0 0 z 0 -h*y
         -y 0 -z 0 0 0 0 x
         0 -y 0 -z 0 0 x 0
         -2y+s2*z 0 -s2*y 0 0 -x 0 0
         0 -y-h*z 0 h*y -x 0 0 0",
        &[("s2", s2), ("h", 1.0 / s2)],
    )
}

/// The irreducible 4-dimensional complex representation of `su(2)` viewed as real,
/// type `(3, 8)`, Pfaffian form `9 (x^2 + y^2 + z^2)^2`.
pub fn example_su2() -> TwoStepAlgebra<f64> {
    grid(
        "0 3x -s3*y -s3*z 0 0 0 0
         -3x 0 s3*z -s3*y 0 0 0 0
         s3*y -s3*z 0 x -2y -2z 0 0
         s3*z s3*y -x 0 2z -2y 0 0
         0 0 2y -2z 0 -x -s3*y -s3*z
         0 0 2z 2y x 0 s3*z -s3*y
         0 0 0 0 s3*y -s3*z 0 -3x
         0 0 0 0 s3*z s3*y 3x 0",
        &[("s3", 3f64.sqrt())],
    )
}

/// Su(2) brackets on the center matching [`example_su2`]: `[Z_1, Z_2] = 2 Z_3` and cyclic.
pub fn su2_center_bracket<S: Scalar>() -> Vec<(usize, usize, usize, S)> {
    let two = S::from_i64(2);
    vec![(0, 1, 2, two.clone()), (1, 2, 0, two.clone()), (0, 2, 1, -two)]
}

/// Uniform family with Pfaffian `(x^2 + y^2 + z^2)(t1 x^2 + t2 y^2 + t3 z^2)`.
pub fn prop41<S: Scalar>(t1: S, t2: S, t3: S) -> TwoStepAlgebra<S> {
    grid(
        "0 0 x 0 y 0 z 0
         0 0 0 t1*x 0 t2*y 0 t3*z
         -x 0 0 0 z 0 -y 0
         0 -t1*x 0 0 0 z 0 -y
         -y 0 -z 0 0 0 x 0
         0 -t2*y 0 -z 0 0 0 x
         -z 0 y 0 -x 0 0 0
         0 -t3*z 0 y 0 -x 0 0",
        &[("t1", t1), ("t2", t2), ("t3", t3)],
    )
}

/// Needs `t >= 2`; `a, b = (-t -+ sqrt(t^2 - 4)) / 2`. Pfaffian `x^4 + y^4 + z^4 + t x^2 y^2`.
/// Over the rationals `t^2 - 4` must be a square.
pub fn prop42<S: Scalar>(t: S) -> Result<TwoStepAlgebra<S>> {
    if t.to_f64() < 2.0 {
        return Err(Error::OutOfRange("prop42 needs t >= 2".into()));
    }
    let root = (t.clone() * t.clone() - S::from_i64(4))
        .sqrt_exact()
        .ok_or_else(|| Error::Precondition("sqrt(t^2 - 4) is irrational".into()))?;
    let half = S::from_ratio(1, 2);
    let a = (-t.clone() - root.clone()) * half.clone();
    let b = (-t + root) * half;
    Ok(grid(
        "0 0 a*x 0 0 y 0 z
         0 0 0 b*x y 0 -z 0
         -a*x 0 0 0 0 z y 0
         0 -b*x 0 0 z 0 0 y
         0 -y 0 -z 0 0 0 x
         -y 0 -z 0 0 0 x 0
         0 z -y 0 0 -x 0 0
         -z 0 0 -y -x 0 0 0",
        &[("a", a), ("b", b)],
    ))
}

/// Needs `t > 1`; `alpha = 2t^2 / (2t^2 + 1 - sqrt(4t^2 + 1))`.
/// The Pfaffian is `(t^2 x^2 + y^2 + z^2)^2 + x^2 z^2`, which becomes
/// `(x^2 + y^2 + z^2)^2 + t^-2 x^2 z^2` after `x -> x / t`.
pub fn prop43<S: Scalar>(t: S) -> Result<TwoStepAlgebra<S>> {
    if t.to_f64() <= 1.0 {
        return Err(Error::OutOfRange("prop43 needs t > 1".into()));
    }
    let t2 = t.clone() * t.clone();
    let root = (S::from_i64(4) * t2.clone() + S::one())
        .sqrt_exact()
        .ok_or_else(|| Error::Precondition("sqrt(4t^2 + 1) is irrational".into()))?;
    let two_t2 = S::from_i64(2) * t2;
    let alpha = two_t2.clone() / (two_t2 + S::one() - root);
    Ok(grid(
        "0 0 -t^2*x 0 y 0 0 al*z
         0 0 0 -t^2*x 0 y z 0
         t^2*x 0 0 0 0 -z y 0
         0 t^2*x 0 0 -1/al*z 0 0 y
         -y 0 0 1/al*z 0 0 x 0
         0 -y z 0 0 0 0 x
         0 -z -y 0 -x 0 0 0
         -al*z 0 0 -y 0 -x 0 0",
        &[("t", t), ("al", alpha)],
    ))
}

/// Pfaffian `(x^2 + y^2 + z^2)(x^2 + t y^2 + z^2)`; no nilsoliton for `t > 1`.
pub fn prop44<S: Scalar>(t: S) -> TwoStepAlgebra<S> {
    grid(
        "0 0 -x -y 0 0 0 -z
         0 0 t*y -x 0 0 -z 0
         x -t*y 0 -x 0 -z 0 0
         y x x 0 -z 0 0 0
         0 0 0 z 0 0 -x -y
         0 0 z 0 0 0 y -x
         0 z 0 0 x -y 0 -x
         z 0 0 0 y x x 0",
        &[("t", t)],
    )
}

/// Limit of [`prop44`] and [`prop45`] under the diagonal degeneration.
pub fn tilde_mu<S: Scalar>(t: S) -> TwoStepAlgebra<S> {
    grid(
        "0 0 -x -y 0 0 0 -z
         0 0 t*y -x 0 0 -z 0
         x -t*y 0 0 0 -z 0 0
         y x 0 0 -z 0 0 0
         0 0 0 z 0 0 -x -y
         0 0 z 0 0 0 y -x
         0 z 0 0 x -y 0 0
         z 0 0 0 y x 0 0",
        &[("t", t)],
    )
}

/// Same Pfaffian as [`prop44`], not isomorphic to it; no nilsoliton for `t > 1`.
pub fn prop45<S: Scalar>(t: S) -> TwoStepAlgebra<S> {
    grid(
        "0 0 -x -y 0 0 0 -z
         0 0 t*y -x 0 0 -z 0
         x -t*y 0 -y 0 -z -y -y
         y x y 0 -z 0 -y -y
         0 0 0 z 0 0 -x -y
         0 0 z 0 0 0 y -x
         0 z y y x -y 0 -y
         z 0 y y y x y 0",
        &[("t", t)],
    )
}

/// A known value attached to a catalog entry.
#[derive(Clone, Debug, Serialize)]
pub struct Expected {
    pub quantity: &'static str,
    pub value: &'static str,
    pub source: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Parameter names with their admissible ranges.
    pub params: Vec<(&'static str, &'static str)>,
    pub expected: Vec<Expected>,
}

fn entry(
    name: &'static str,
    description: &'static str,
    params: &[(&'static str, &'static str)],
    expected: &[(&'static str, &'static str, &'static str)],
) -> CatalogEntry {
    CatalogEntry {
        name,
        description,
        params: params.to_vec(),
        expected: expected.iter().map(|&(quantity, value, source)| Expected { quantity, value, source }).collect(),
    }
}

pub fn catalog_list() -> Vec<CatalogEntry> {
    vec![
        entry("heisenberg", "Heisenberg algebra of type (1, 2k)", &[("k", "integer >= 1")], &[
            ("pfaffian", "x^k", "Pfaffian of k standard 2x2 blocks"),
            ("nilsoliton", "yes", "uniform with a nice basis"),
        ]),
        entry("quaternionic", "quaternionic H-type algebra of type (3, 4)", &[], &[
            ("pfaffian", "(x^2 + y^2 + z^2)", "H-type Pfaffian (sum of squares)^(m/4)"),
            ("skew quotient", "3", "every rotation of the center extends for H-type algebras"),
        ]),
        entry("htype_3_8", "H-type algebra H + H + Im H of type (3, 8)", &[], &[
            ("pfaffian", "(x^2 + y^2 + z^2)^2", "H-type Pfaffian"),
        ]),
        entry("example_2_2", "type (3, 8) with Pfaffian x^4 + y^4 + z^4", &[], &[
            ("pfaffian", "x^4 + y^4 + z^4", "explicit (3, 8) example with Fermat quartic Pfaffian"),
        ]),
        entry("example_su2", "irreducible su(2) representation on C^4, type (3, 8)", &[], &[
            ("pfaffian", "9 (x^2 + y^2 + z^2)^2", "Rep-type (3, 8) example"),
            ("htype", "false", "irreducible su(2) action on n_1"),
            ("htype_tilde", "true", "Pfaffian is a power of a quadratic form"),
            ("skew quotient", "3", "Rep-type algebras with center su(2)"),
        ]),
        entry("prop41", "uniform family mu_{t1,t2,t3}", &[("t1", "> 0"), ("t2", "> 0"), ("t3", "> 0")], &[
            ("pfaffian", "(x^2 + y^2 + z^2)(t1 x^2 + t2 y^2 + t3 z^2)", "three-parameter nilsoliton family"),
            ("nilsoliton", "yes", "uniform"),
        ]),
        entry("prop42", "uniform family with Pfaffian x^4 + y^4 + z^4 + t x^2 y^2", &[("t", ">= 2")], &[
            ("pfaffian", "x^4 + y^4 + z^4 + t x^2 y^2", "one-parameter nilsoliton family"),
            ("nilsoliton", "yes", "uniform"),
        ]),
        entry("prop43", "nice-basis family with Pfaffian equivalent to (x^2 + y^2 + z^2)^2 + t^-2 x^2 z^2", &[("t", "> 1")], &[
            ("pfaffian", "(t^2 x^2 + y^2 + z^2)^2 + x^2 z^2", "direct evaluation of the displayed matrix"),
            ("nilsoliton", "yes", "positive solution of the nice-basis linear system"),
        ]),
        entry("prop44", "family without nilsolitons, Pfaffian (x^2 + y^2 + z^2)(x^2 + t y^2 + z^2)", &[("t", "> 1")], &[
            ("pfaffian", "(x^2 + y^2 + z^2)(x^2 + t y^2 + z^2)", "non-closed orbit family"),
            ("dim Der", "26", "derivation count separating it from its degeneration"),
            ("nilsoliton", "no", "orbit degenerates to tilde_mu"),
        ]),
        entry("tilde_mu", "common degeneration of prop44 and prop45", &[("t", "> 1")], &[
            ("dim Der", "29", "derivation count of the limit algebra"),
        ]),
        entry("prop45", "second family without nilsolitons, same Pfaffian as prop44", &[("t", "> 1")], &[
            ("pfaffian", "(x^2 + y^2 + z^2)(x^2 + t y^2 + z^2)", "non-closed orbit family"),
            ("dim Der", "27", "derivation count"),
            ("nilsoliton", "no", "orbit degenerates to tilde_mu"),
        ]),
        entry("pencil", "type (2, m) algebra of a pencil set given as JSON", &[("set", "pencil JSON")], &[]),
    ]
}

/// Parameters that are not exact rationals (or constants that turn out
/// irrational) select the float path.
fn rational_params(params: &[String]) -> Option<Vec<Q>> {
    params.iter().map(|p| parse_rational(p).ok()).collect()
}

fn float_params(params: &[String]) -> Result<Vec<f64>> {
    params.iter().map(|p| f64::parse(p)).collect()
}

fn arity(name: &str, params: &[String], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::Precondition(format!("{name} takes {n} parameter(s), got {}", params.len())));
    }
    Ok(())
}

fn first<S>(p: Vec<S>) -> S {
    p.into_iter().next().expect("arity checked")
}

fn gt_one<S: Scalar>(t: S, build: fn(S) -> TwoStepAlgebra<S>) -> Result<TwoStepAlgebra<S>> {
    if t.to_f64() <= 1.0 {
        return Err(Error::OutOfRange("t must exceed 1".into()));
    }
    Ok(build(t))
}

fn prop41_checked<S: Scalar>(p: Vec<S>) -> Result<TwoStepAlgebra<S>> {
    if p.iter().any(|t| t.to_f64() <= 0.0) {
        return Err(Error::OutOfRange("prop41 needs positive parameters".into()));
    }
    let [t1, t2, t3]: [S; 3] = p.try_into().map_err(|_| Error::Precondition("prop41 takes 3 parameters".into()))?;
    Ok(prop41(t1, t2, t3))
}

/// Builds a named catalog algebra. `pencil` is handled by the caller through
/// [`pencil_entry`].
pub fn catalog_get(name: &str, params: &[String]) -> Result<AnyAlgebra> {
    macro_rules! exact_or_float {
        ($n:expr, $build:expr) => {{
            arity(name, params, $n)?;
            match rational_params(params).map(|p| $build(p)) {
                Some(Ok(alg)) => Ok(AnyAlgebra::Rational(alg)),
                Some(Err(Error::Precondition(_))) | None => Ok(AnyAlgebra::Float($build(float_params(params)?)?)),
                Some(Err(e)) => Err(e),
            }
        }};
    }
    match name {
        "heisenberg" => {
            arity(name, params, 1)?;
            let k: usize = params[0].parse().map_err(|_| Error::Parse(format!("bad k `{}`", params[0])))?;
            Ok(AnyAlgebra::Rational(heisenberg(k)?))
        }
        "quaternionic" => {
            arity(name, params, 0)?;
            Ok(AnyAlgebra::Rational(quaternionic()))
        }
        "htype_3_8" => {
            arity(name, params, 0)?;
            Ok(AnyAlgebra::Rational(htype_3_8()))
        }
        "example_2_2" => {
            arity(name, params, 0)?;
            Ok(AnyAlgebra::Float(example_2_2()))
        }
        "example_su2" => {
            arity(name, params, 0)?;
            Ok(AnyAlgebra::Float(example_su2()))
        }
        "prop41" => exact_or_float!(3, prop41_checked),
        "prop42" => exact_or_float!(1, |p: Vec<_>| prop42(first(p))),
        "prop43" => exact_or_float!(1, |p: Vec<_>| prop43(first(p))),
        "prop44" => exact_or_float!(1, |p: Vec<_>| gt_one(first(p), prop44)),
        "tilde_mu" => exact_or_float!(1, |p: Vec<_>| gt_one(first(p), tilde_mu)),
        "prop45" => exact_or_float!(1, |p: Vec<_>| gt_one(first(p), prop45)),
        _ => Err(Error::Unknown(name.to_string())),
    }
}

/// The pencil algebra of a set, exact when the set is.
pub fn pencil_entry<S: Scalar>(set: &PencilSet<S>) -> TwoStepAlgebra<S> {
    build_pencil_algebra(set)
}
