//! JSON formats for algebras, forms, pencil sets, matrices and flow reports.
//!
//! Bracket indices in algebra files are 1-based. Rational values are written
//! as integers when integral and as `"p/q"` strings otherwise.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::TwoStepAlgebra;
use crate::catalog::AnyAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nilsoliton::FlowReport;
use crate::pencil::{ComplexPair, Isomorphism, PencilSet, RealPair, RealPoint};
use crate::polynomials::HomogeneousForm;
use crate::scalar::{parse_rational, rational_text, Scalar, ScalarKind, Q};

/// A form over either scalar kind.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyForm {
    Rational(HomogeneousForm<Q>),
    Float(HomogeneousForm<f64>),
}

/// A pencil set over either scalar kind.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPencil {
    Rational(PencilSet<Q>),
    Float(PencilSet<f64>),
}

/// JSON value of a scalar.
pub fn scalar_json<S: Scalar>(v: &S) -> Value {
    match v.to_rational() {
        Some(q) if S::KIND == ScalarKind::Rational => match (q.is_integer(), i64::try_from(q.numer())) {
            (true, Ok(i)) => Value::from(i),
            _ => Value::from(rational_text(&q)),
        },
        _ => json!(v.to_f64()),
    }
}

/// Reads a number or a `"p/q"` string.
pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::Number(n) => S::parse(&n.to_string()),
        Value::String(s) => S::parse(s),
        _ => Err(Error::Parse(format!("expected a number, got {v}"))),
    }
}

/// Whether a value can be read exactly: integers, `"p/q"` strings and short decimals.
fn is_exact(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::String(s) => s.contains('/') || parse_rational(s).is_ok(),
        _ => false,
    }
}

pub fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(scalar_json).collect())).collect())
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Deserialize, Serialize)]
struct BracketRecord {
    i: usize,
    j: usize,
    k: usize,
    c: Value,
}

#[derive(Deserialize, Serialize)]
struct AlgebraRecord {
    n: usize,
    m: usize,
    scalar: ScalarKind,
    brackets: Vec<BracketRecord>,
}

pub fn algebra_to_json<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Value {
    let brackets = alg
        .constants()
        .iter()
        .map(|(&(i, j, k), c)| BracketRecord { i: i + 1, j: j + 1, k: k + 1, c: scalar_json(c) })
        .collect();
    serde_json::to_value(AlgebraRecord { n: alg.n(), m: alg.m(), scalar: S::KIND, brackets }).expect("plain data")
}

pub fn any_algebra_to_json(alg: &AnyAlgebra) -> Value {
    match alg {
        AnyAlgebra::Rational(a) => algebra_to_json(a),
        AnyAlgebra::Float(a) => algebra_to_json(a),
    }
}

fn build_algebra<S: Scalar>(rec: &AlgebraRecord) -> Result<TwoStepAlgebra<S>> {
    let mut brackets = Vec::with_capacity(rec.brackets.len());
    for b in &rec.brackets {
        if b.i == 0 || b.j == 0 || b.k == 0 {
            return Err(Error::InvalidAlgebra("bracket indices are 1-based".into()));
        }
        brackets.push((b.i - 1, b.j - 1, b.k - 1, scalar_from_json(&b.c)?));
    }
    TwoStepAlgebra::from_brackets(rec.m, rec.n, brackets)
}

pub fn load_algebra(text: &str) -> Result<AnyAlgebra> {
    let rec: AlgebraRecord = from_value(parse_json(text)?)?;
    match rec.scalar {
        ScalarKind::Rational => Ok(AnyAlgebra::Rational(build_algebra(&rec)?)),
        ScalarKind::Float => Ok(AnyAlgebra::Float(build_algebra(&rec)?)),
    }
}

#[derive(Deserialize, Serialize)]
struct TermRecord {
    exp: Vec<u32>,
    c: Value,
}

#[derive(Deserialize, Serialize)]
struct FormRecord {
    n: usize,
    d: u32,
    scalar: ScalarKind,
    terms: Vec<TermRecord>,
}

pub fn form_to_json<S: Scalar>(f: &HomogeneousForm<S>) -> Value {
    let terms = f.terms().iter().map(|(e, c)| TermRecord { exp: e.clone(), c: scalar_json(c) }).collect();
    serde_json::to_value(FormRecord { n: f.n(), d: f.degree(), scalar: S::KIND, terms }).expect("plain data")
}

pub fn any_form_to_json(f: &AnyForm) -> Value {
    match f {
        AnyForm::Rational(f) => form_to_json(f),
        AnyForm::Float(f) => form_to_json(f),
    }
}

fn build_form<S: Scalar>(rec: &FormRecord) -> Result<HomogeneousForm<S>> {
    let terms = rec.terms.iter().map(|t| Ok((t.exp.clone(), scalar_from_json(&t.c)?))).collect::<Result<Vec<_>>>()?;
    HomogeneousForm::from_terms(rec.n, rec.d, terms)
}

pub fn load_form(text: &str) -> Result<AnyForm> {
    let rec: FormRecord = from_value(parse_json(text)?)?;
    match rec.scalar {
        ScalarKind::Rational => Ok(AnyForm::Rational(build_form(&rec)?)),
        ScalarKind::Float => Ok(AnyForm::Float(build_form(&rec)?)),
    }
}

#[derive(Deserialize, Serialize)]
struct ComplexRecord {
    re: Value,
    im: Value,
    k: usize,
}

#[derive(Deserialize, Serialize)]
struct RealRecord {
    a: Value,
    j: usize,
}

#[derive(Deserialize, Serialize, Default)]
struct PencilRecord {
    #[serde(default)]
    complex: Vec<ComplexRecord>,
    #[serde(default)]
    real: Vec<RealRecord>,
    #[serde(default)]
    eps: Vec<usize>,
}

pub fn pencil_to_json<S: Scalar>(s: &PencilSet<S>) -> Value {
    let rec = PencilRecord {
        complex: s
            .complex()
            .iter()
            .map(|p| ComplexRecord { re: scalar_json(&p.re), im: scalar_json(&p.im), k: p.k })
            .collect(),
        real: s
            .real()
            .iter()
            .map(|p| RealRecord {
                a: match &p.a {
                    RealPoint::Finite(a) => scalar_json(a),
                    RealPoint::Infinity => Value::from("inf"),
                },
                j: p.j,
            })
            .collect(),
        eps: s.eps().to_vec(),
    };
    serde_json::to_value(rec).expect("plain data")
}

pub fn any_pencil_to_json(s: &AnyPencil) -> Value {
    match s {
        AnyPencil::Rational(s) => pencil_to_json(s),
        AnyPencil::Float(s) => pencil_to_json(s),
    }
}

fn build_pencil<S: Scalar>(rec: &PencilRecord) -> Result<PencilSet<S>> {
    let complex = rec
        .complex
        .iter()
        .map(|p| Ok(ComplexPair { re: scalar_from_json(&p.re)?, im: scalar_from_json(&p.im)?, k: p.k }))
        .collect::<Result<Vec<_>>>()?;
    let real = rec
        .real
        .iter()
        .map(|p| {
            let a = match &p.a {
                Value::String(s) if s.eq_ignore_ascii_case("inf") => RealPoint::Infinity,
                v => RealPoint::Finite(scalar_from_json(v)?),
            };
            Ok(RealPair { a, j: p.j })
        })
        .collect::<Result<Vec<_>>>()?;
    PencilSet::new(complex, real, rec.eps.clone())
}

/// Exact when every number is an integer or a `"p/q"` string.
pub fn load_pencil(text: &str) -> Result<AnyPencil> {
    let rec: PencilRecord = from_value(parse_json(text)?)?;
    let exact = rec.complex.iter().all(|p| is_exact(&p.re) && is_exact(&p.im))
        && rec.real.iter().all(|p| matches!(&p.a, Value::String(s) if s.eq_ignore_ascii_case("inf")) || is_exact(&p.a));
    if exact {
        Ok(AnyPencil::Rational(build_pencil(&rec)?))
    } else {
        Ok(AnyPencil::Float(build_pencil(&rec)?))
    }
}

/// `{"result": "isomorphic", "witness": [[a, b], [c, d]]}` or `{"result": "not-isomorphic"}`.
pub fn isomorphism_json<S: Scalar>(iso: &Isomorphism<S>) -> Value {
    match iso {
        Isomorphism::Isomorphic { witness: w } => json!({
            "result": "isomorphic",
            "witness": [[scalar_json(&w.a), scalar_json(&w.b)], [scalar_json(&w.c), scalar_json(&w.d)]],
        }),
        Isomorphism::NotIsomorphic => json!({ "result": "not-isomorphic" }),
    }
}

pub fn flow_report_json(r: &FlowReport) -> Value {
    json!({
        "iterations": r.iterations,
        "final_algebra": algebra_to_json(&r.final_algebra),
        "final_grad_norm": r.final_grad_norm,
        "verdict": r.verdict,
        "seed": r.seed,
        "trajectory_norms": r.trajectory_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        let alg = TwoStepAlgebra::from_brackets(4, 2, [(0, 1, 0, Q::new(3.into(), 2.into())), (2, 3, 1, Q::from_i64(-1))])
            .unwrap();
        let v = algebra_to_json(&alg);
        assert_eq!(v["brackets"][0]["c"], json!("3/2"));
        assert_eq!(v["brackets"][1]["i"], json!(3));
        assert_eq!(load_algebra(&v.to_string()).unwrap(), AnyAlgebra::Rational(alg));
    }

    #[test]
    fn loader_rejects_bad_brackets() {
        let dup = r#"{"n":1,"m":2,"scalar":"rational","brackets":[{"i":1,"j":2,"k":1,"c":1},{"i":1,"j":2,"k":1,"c":2}]}"#;
        assert!(load_algebra(dup).is_err());
        let order = r#"{"n":1,"m":2,"scalar":"float","brackets":[{"i":2,"j":1,"k":1,"c":1.5}]}"#;
        assert!(load_algebra(order).is_err());
        let range = r#"{"n":1,"m":2,"scalar":"float","brackets":[{"i":1,"j":3,"k":1,"c":1}]}"#;
        assert!(load_algebra(range).is_err());
    }

    #[test]
    fn form_round_trip() {
        let text = r#"{"n":2,"d":2,"scalar":"rational","terms":[{"exp":[2,0],"c":1},{"exp":[0,2],"c":"1/3"}]}"#;
        let f = load_form(text).unwrap();
        assert_eq!(load_form(&any_form_to_json(&f).to_string()).unwrap(), f);
    }

    #[test]
    fn pencil_formats() {
        let s = load_pencil(r#"{"complex":[{"re":0,"im":1,"k":2}],"real":[{"a":"inf","j":1}],"eps":[1]}"#).unwrap();
        let AnyPencil::Rational(set) = &s else { panic!("expected exact set") };
        assert_eq!(set.m(), 8 + 2 + 3);
        assert_eq!(load_pencil(&any_pencil_to_json(&s).to_string()).unwrap(), s);
        let f = load_pencil(r#"{"complex":[{"re":0.25,"im":1.5,"k":1}]}"#).unwrap();
        assert!(matches!(f, AnyPencil::Float(_)));
    }
}
