use std::process::Command;

use nilform::catalog::{catalog_get, AnyAlgebra};
use nilform::io::{load_algebra, load_form, AnyForm};
use nilform::polynomials::pfaffian_form;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: Value,
    stderr: String,
}

fn nilform(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_nilform")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: serde_json::from_str(&text).unwrap_or(Value::Null),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

const DOUBLED: &str = r#"{"complex":[{"re":0,"im":1,"k":2}]}"#;
const TWO_SIMPLE: &str = r#"{"complex":[{"re":0,"im":1,"k":1},{"re":0,"im":1,"k":1}]}"#;

#[test]
fn fermat_pfaffian() {
    let r = nilform(&["pfaffian", "catalog:example_2_2"]);
    assert_eq!(r.code, 0);
    let terms = r.stdout["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    for t in terms {
        let e: Vec<u64> = t["exp"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        assert!(e.contains(&4), "{e:?}");
        assert!((t["c"].as_f64().unwrap().abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn flow_on_non_closed_orbit_is_inconclusive() {
    let r = nilform(&["nilsoliton", "catalog:prop44", "--t", "2", "--method=flow"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout["verdict"], "inconclusive-plateau");
}

#[test]
fn flow_from_perturbation_finds_nilsoliton() {
    let dir = std::env::temp_dir().join(format!("nilform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let r = nilform(&["nilsoliton", "catalog:example_su2", "--jitter", "0.05", "--seed", "3", "--report", report.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["verdict"], "nilsoliton");
    assert_eq!(r.stdout["final_check"]["result"], "holds");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let final_algebra = load_algebra(&saved["final_algebra"].to_string()).unwrap();
    assert_eq!((final_algebra.n(), final_algebra.m()), (3, 8));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn nice_basis_route() {
    let r = nilform(&["nilsoliton", "catalog:prop43", "--t", "2", "--method", "nice"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout["solution"].as_array().unwrap().iter().all(|v| v == "1/10"));
    let r = nilform(&["nilsoliton", "catalog:example_2_2", "--method", "nice"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn pencil_commands() {
    let r = nilform(&["pencil", "iso", "--left", DOUBLED, "--right", TWO_SIMPLE]);
    assert_eq!((r.code, r.stdout["result"].as_str()), (1, Some("not-isomorphic")));
    let shifted = r#"{"complex":[{"re":1,"im":1,"k":1},{"re":1,"im":2,"k":1}]}"#;
    let r = nilform(&["pencil", "iso", "--left", r#"{"complex":[{"re":0,"im":1,"k":1},{"re":0,"im":2,"k":1}]}"#, "--right", shifted]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["witness"], serde_json::json!([[1, 1], [0, 1]]));
    assert_eq!(nilform(&["pencil", "nilsoliton", DOUBLED]).code, 1);
    assert_eq!(nilform(&["pencil", "nilsoliton", TWO_SIMPLE]).code, 0);
    let r = nilform(&["pencil", "nilsoliton", r#"{"complex":[{"re":0,"im":1,"k":1},{"re":0,"im":2,"k":1}]}"#]);
    assert_eq!((r.code, r.stdout["verdict"].as_str()), (0, Some("yes")));
    let r = nilform(&["pencil", "build", DOUBLED]);
    assert_eq!((r.stdout["n"].as_u64(), r.stdout["m"].as_u64()), (Some(2), Some(8)));
}

#[test]
fn emitted_algebras_round_trip() {
    for (name, params) in [("prop44", vec!["2"]), ("quaternionic", vec![]), ("example_su2", vec![]), ("prop42", vec!["3"])] {
        let mut args = vec!["catalog", "emit", name];
        let joined = params.join(",");
        if !params.is_empty() {
            args.extend(["--params", joined.as_str()]);
        }
        let r = nilform(&args);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let owned: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        let loaded = load_algebra(&r.stdout.to_string()).unwrap();
        match (catalog_get(name, &owned).unwrap(), loaded) {
            (AnyAlgebra::Rational(a), AnyAlgebra::Rational(b)) => assert_eq!(a, b, "{name}"),
            (AnyAlgebra::Float(a), AnyAlgebra::Float(b)) => assert!(a.approx_eq(&b, 1e-15), "{name}"),
            _ => panic!("{name}: scalar kind changed"),
        }
        let inline = r.stdout.to_string();
        let pf = nilform(&["pfaffian", &inline]);
        assert_eq!(pf.code, 0);
        let source = format!("catalog:{name}");
        args[0] = "pfaffian";
        args[1] = &source;
        args.remove(2);
        assert_eq!(pf.stdout, nilform(&args).stdout, "{name}");
    }
}

#[test]
fn pfaffian_output_loads_as_form() {
    let r = nilform(&["pfaffian", "catalog:prop44", "--t", "2"]);
    let AnyForm::Rational(f) = load_form(&r.stdout.to_string()).unwrap() else {
        panic!("exact input should give an exact form");
    };
    let AnyAlgebra::Rational(alg) = catalog_get("prop44", &["2".to_string()]).unwrap() else {
        panic!("prop44(2) is exact");
    };
    assert_eq!(f, pfaffian_form(&alg).unwrap());
}

#[test]
fn derivation_dimensions() {
    let r = nilform(&["derivations", "catalog:example_su2", "--skew"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["skew"]["quotient_dim"], 3);
    assert_eq!(r.stdout["skew"]["bound"], 3);
    let r = nilform(&["derivations", "catalog:prop44", "--t", "2"]);
    assert_eq!(r.stdout["dim"], 26);
}

#[test]
fn moment_and_nonsingularity() {
    let r = nilform(&["moment", "catalog:heisenberg", "--t", "1"]);
    assert_eq!(r.stdout["m1"], serde_json::json!([[-1, 0], [0, -1]]));
    assert_eq!(r.stdout["m2"], serde_json::json!([[1]]));
    let r = nilform(&["nonsingular", "catalog:quaternionic"]);
    assert_eq!((r.code, &r.stdout["nonsingular"]), (0, &Value::Bool(true)));
}

#[test]
fn invariants_of_a_pfaffian() {
    let r = nilform(&["invariants", "catalog:prop44", "--t", "2", "--which", "I3,I6"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.get("I3").is_some() && r.stdout.get("I6").is_some());
    assert!(r.stdout.get("hankel").is_none());
}

#[test]
fn usage_errors_exit_2() {
    let r = nilform(&["pfaffian", "catalog:no_such_entry"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("error"));
    let odd = r#"{"n":1,"m":3,"scalar":"rational","brackets":[{"i":1,"j":2,"k":1,"c":1}]}"#;
    assert_eq!(nilform(&["pfaffian", odd]).code, 2);
    assert_eq!(nilform(&["prop42", "--t", "1"]).code, 2);
    assert_eq!(nilform(&["pfaffian", "catalog:prop42", "--t", "1"]).code, 2);
    assert_eq!(nilform(&["catalog", "list"]).code, 0);
}
