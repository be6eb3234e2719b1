//! Every expected value listed by the catalog is recomputed from the builder.
//! Pfaffian formulas are read from the listing itself and evaluated at random
//! points; an expected quantity without an oracle here fails the sweep.

use std::collections::BTreeMap;

use nilform::catalog::{catalog_get, catalog_list, AnyAlgebra};
use nilform::derivations::{derivation_space, htype_check, htype_tilde_check, skew_derivation_dims};
use nilform::nilsoliton::{gradient_flow, has_nice_basis, nikolayevsky_test, FlowOptions, FlowVerdict};
use nilform::polynomials::pfaffian_form;
use nilform::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimal evaluator for the formulas in the listing: numbers, names,
/// `+ - ^`, parentheses and multiplication by juxtaposition.
struct Formula<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
    env: &'a BTreeMap<String, f64>,
}

fn tokenize(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while let Some(c) = rest.chars().next() {
        let len = if c.is_ascii_alphanumeric() || c == '.' {
            rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '.' || ch == '_')).unwrap_or(rest.len())
        } else {
            c.len_utf8()
        };
        out.push(&rest[..len]);
        rest = rest[len..].trim_start();
    }
    out
}

impl<'a> Formula<'a> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self) -> &'a str {
        self.pos += 1;
        self.tokens[self.pos - 1]
    }

    fn expr(&mut self) -> f64 {
        let mut v = self.term();
        while let Some(op @ ("+" | "-")) = self.peek() {
            let plus = op == "+";
            self.next();
            let t = self.term();
            v = if plus { v + t } else { v - t };
        }
        v
    }

    fn term(&mut self) -> f64 {
        let mut v = self.power();
        while matches!(self.peek(), Some(t) if t != "+" && t != "-" && t != ")") {
            v *= self.power();
        }
        v
    }

    fn power(&mut self) -> f64 {
        if self.peek() == Some("-") {
            self.next();
            return -self.power();
        }
        let base = self.atom();
        if self.peek() == Some("^") {
            self.next();
            return base.powf(self.power());
        }
        base
    }

    fn atom(&mut self) -> f64 {
        match self.next() {
            "(" => {
                let v = self.expr();
                assert_eq!(self.next(), ")");
                v
            }
            tok => tok.parse().unwrap_or_else(|_| *self.env.get(tok).unwrap_or_else(|| panic!("unbound `{tok}`"))),
        }
    }
}

fn evaluate(text: &str, env: &BTreeMap<String, f64>) -> f64 {
    let mut f = Formula { tokens: tokenize(text), pos: 0, env };
    let v = f.expr();
    assert_eq!(f.pos, f.tokens.len(), "trailing input in `{text}`");
    v
}

#[test]
fn evaluator_reads_listing_formulas() {
    let env: BTreeMap<String, f64> = [("x", 1.0), ("y", 2.0), ("z", 3.0), ("t", 0.5)].map(|(k, v)| (k.to_string(), v)).into();
    assert_eq!(evaluate("9 (x^2 + y^2 + z^2)^2", &env), 9.0 * 196.0);
    assert_eq!(evaluate("x^4 + y^4 + z^4 + t x^2 y^2", &env), 1.0 + 16.0 + 81.0 + 2.0);
    assert_eq!(evaluate("-x^2 - 2", &env), -3.0);
}

/// Parameter lists at which each entry is swept.
fn sample_params(name: &str) -> Vec<Vec<&'static str>> {
    match name {
        "heisenberg" => vec![vec!["1"], vec!["3"]],
        "prop41" => vec![vec!["1", "2", "3"], vec!["0.5", "1.5", "2.5"]],
        "prop42" => vec![vec!["2"], vec!["3"]],
        "prop43" => vec![vec!["2"], vec!["3"]],
        "prop44" | "prop45" | "tilde_mu" => vec![vec!["2"], vec!["3/2"]],
        _ => vec![vec![]],
    }
}

fn pfaffian_matches(alg: &AnyAlgebra, formula: &str, names: &[&str], params: &[&str]) -> Result<(), String> {
    let f = match alg {
        AnyAlgebra::Rational(a) => pfaffian_form(a).map(|f| f.to_float()),
        AnyAlgebra::Float(a) => pfaffian_form(a),
    }
    .map_err(|e| e.to_string())?;
    let mut env: BTreeMap<String, f64> = names.iter().zip(params).map(|(n, p)| (n.to_string(), nilform::Q::parse(p).unwrap().to_f64())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sign = 0.0;
    for _ in 0..6 {
        let point: Vec<f64> = (0..f.n()).map(|_| rng.gen_range(-1.5..1.5)).collect();
        for (v, x) in ["x", "y", "z"].iter().zip(&point) {
            env.insert(v.to_string(), *x);
        }
        let (got, want) = (f.eval_f64(&point), evaluate(formula, &env));
        if sign == 0.0 {
            sign = if got * want < 0.0 { -1.0 } else { 1.0 };
        }
        if (got - sign * want).abs() > 1e-8 * want.abs().max(1.0) {
            return Err(format!("at {point:?}: Pfaffian {got}, listing {want}"));
        }
    }
    Ok(())
}

fn admits_nilsoliton(alg: &AnyAlgebra) -> bool {
    let opts = FlowOptions { max_iter: 20_000, ..FlowOptions::default() };
    match alg {
        AnyAlgebra::Rational(a) if has_nice_basis(a) => nikolayevsky_test(a).unwrap().admits_nilsoliton(),
        AnyAlgebra::Rational(a) => gradient_flow(a, &opts).unwrap().verdict == FlowVerdict::MinimalVectorFound,
        AnyAlgebra::Float(a) => gradient_flow(a, &opts).unwrap().verdict == FlowVerdict::MinimalVectorFound,
    }
}

fn flow_finds_minimum(alg: &AnyAlgebra) -> bool {
    let a = alg.to_float();
    gradient_flow(&a, &FlowOptions::default()).unwrap().verdict == FlowVerdict::MinimalVectorFound
}

fn check(name: &str, names: &[&str], params: &[&str], quantity: &str, value: &str) -> Result<(), String> {
    let owned: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    let alg = catalog_get(name, &owned).map_err(|e| e.to_string())?;
    let float = alg.to_float();
    let same = |got: String| if got == value { Ok(()) } else { Err(format!("got {got}")) };
    match quantity {
        "pfaffian" => pfaffian_matches(&alg, value, names, params),
        "nilsoliton" if value == "yes" => same(if admits_nilsoliton(&alg) { "yes" } else { "no" }.into()),
        // Non-existence is not certified numerically; the flow must at least not reach a minimum.
        "nilsoliton" => same(if flow_finds_minimum(&alg) { "yes" } else { "no" }.into()),
        "dim Der" => same(derivation_space(&float).dim.to_string()),
        "skew quotient" => same(skew_derivation_dims(&float).quotient_dim.to_string()),
        "htype" => same(htype_check(&float).to_string()),
        "htype_tilde" => same(htype_tilde_check(&float).map_err(|e| e.to_string())?.to_string()),
        _ => Err(format!("no oracle for `{quantity}`")),
    }
}

#[test]
fn every_listed_value_is_reproduced() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for entry in catalog_list() {
        let names: Vec<&str> = entry.params.iter().map(|p| p.0).collect();
        for params in sample_params(entry.name) {
            for e in &entry.expected {
                checked += 1;
                if let Err(why) = check(entry.name, &names, &params, e.quantity, e.value) {
                    failures.push(format!("{}({}) {}: {why}", entry.name, params.join(","), e.quantity));
                }
            }
        }
    }
    assert!(checked > 30, "only {checked} values swept");
    assert!(failures.is_empty(), "{failures:#?}");
}
