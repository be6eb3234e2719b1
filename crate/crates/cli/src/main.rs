use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nilform::algebra::{is_nonsingular, nonsingularity_verdict, TwoStepAlgebra};
use nilform::catalog::{catalog_get, catalog_list, pencil_entry, AnyAlgebra};
use nilform::derivations::{derivation_space, skew_derivation_dims};
use nilform::invariants::{hankel, invariant_i3, invariant_i6, laplacian_spectrum_ratios};
use nilform::io::{
    any_algebra_to_json, flow_report_json, form_to_json, load_algebra, load_form, load_pencil,
    isomorphism_json, matrix_json, scalar_json, AnyForm, AnyPencil,
};
use nilform::nilsoliton::{check_nilso, gradient_flow, moment_map, nikolayevsky_test, FlowOptions, FlowVerdict};
use nilform::pencil::{pencil_admits_nilsoliton, pencil_isomorphic, pencil_pfaffian, NilsolitonAnswer, PencilSet};
use nilform::polynomials::{pfaffian_form, HomogeneousForm};
use nilform::{Error, Scalar};

/// Default relative tolerance for float comparisons; `NILFORM_PRECISION` overrides it.
const DEFAULT_PRECISION: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "nilform", version, about = "Two-step nilpotent Lie algebras: Pfaffians, nilsolitons, pencils, derivations")]
struct Cli {
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Single parameter of a catalog entry.
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<String>,
    /// Comma-separated parameters of a catalog entry.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<String>,
    /// Pencil set (JSON text or file) for `catalog:pencil`.
    #[arg(long, global = true)]
    set: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pfaffian form of an algebra.
    Pfaffian { src: String },
    /// Whether every nonzero J(Z) is invertible.
    Nonsingular { src: String },
    /// Decide whether a nilsoliton inner product exists.
    Nilsoliton {
        src: String,
        #[arg(long, value_enum, default_value_t = Method::Flow)]
        method: Method,
        /// Write the full flow report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of the random GL perturbation applied before flowing.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
    },
    /// Invariants of a ternary quartic, or of the Pfaffian of an algebra.
    Invariants {
        src: String,
        #[arg(long, value_delimiter = ',', default_value = "I3,I6,hankel,laplacian")]
        which: Vec<String>,
    },
    /// Type (2, m) algebras from pencil sets.
    Pencil {
        #[command(subcommand)]
        action: PencilAction,
    },
    /// Dimensions (and optionally a basis) of the derivation algebra.
    Derivations {
        src: String,
        /// Graded derivation dimensions.
        #[arg(long)]
        graded: bool,
        /// Skew-symmetric derivation dimensions.
        #[arg(long)]
        skew: bool,
        /// Include a basis of Der as row-major matrices.
        #[arg(long)]
        basis: bool,
    },
    /// Moment map (m1, m2) of an algebra.
    Moment { src: String },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Flow,
    Nice,
    Pencil,
}

#[derive(Subcommand)]
enum PencilAction {
    /// Algebra JSON of a pencil set.
    Build { set: String },
    /// Closed-form Pfaffian of a pencil set.
    Pf { set: String },
    /// Whether two pencil sets give isomorphic algebras.
    Iso {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Nilsoliton classification of a pencil set.
    Nilsoliton { set: String },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Algebra JSON of a catalog entry.
    Emit { name: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numeric(_) | Error::Singular(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// JSON output and exit code.
type Outcome = Result<(Value, u8), Failure>;

fn verdict_code(ok: bool) -> u8 {
    if ok { 0 } else { 1 }
}

fn precision() -> Result<f64, Failure> {
    match std::env::var("NILFORM_PRECISION") {
        Ok(v) => match v.parse::<f64>() {
            Ok(p) if p > 0.0 => Ok(p),
            _ => Err(usage(format!("NILFORM_PRECISION must be a positive number, got `{v}`"))),
        },
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

/// Inline JSON when the text starts with `{`, otherwise a file path.
fn read_text(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    std::fs::read_to_string(Path::new(src)).map_err(|e| usage(format!("cannot read `{src}`: {e}")))
}

fn load_set(src: &str) -> Result<AnyPencil, Failure> {
    Ok(load_pencil(&read_text(src)?)?)
}

fn catalog_params(cli: &Cli) -> Vec<String> {
    let mut p: Vec<String> = cli.t.iter().cloned().collect();
    p.extend(cli.params.iter().cloned());
    p
}

fn pencil_algebra(set: &AnyPencil) -> AnyAlgebra {
    match set {
        AnyPencil::Rational(s) => AnyAlgebra::Rational(pencil_entry(s)),
        AnyPencil::Float(s) => AnyAlgebra::Float(pencil_entry(s)),
    }
}

fn resolve_catalog(cli: &Cli, name: &str) -> Result<AnyAlgebra, Failure> {
    if name == "pencil" {
        let set = cli.set.as_deref().ok_or_else(|| usage("catalog:pencil needs --set"))?;
        return Ok(pencil_algebra(&load_set(set)?));
    }
    Ok(catalog_get(name, &catalog_params(cli))?)
}

fn load_source(cli: &Cli, src: &str) -> Result<AnyAlgebra, Failure> {
    match src.strip_prefix("catalog:") {
        Some(name) => resolve_catalog(cli, name),
        None => Ok(load_algebra(&read_text(src)?)?),
    }
}

macro_rules! on_algebra {
    ($alg:expr, $a:ident => $body:expr) => {
        match $alg {
            AnyAlgebra::Rational($a) => $body,
            AnyAlgebra::Float($a) => $body,
        }
    };
}

fn form_output<S: Scalar>(f: &HomogeneousForm<S>) -> Value {
    let mut v = form_to_json(f);
    v["text"] = Value::from(f.to_string());
    v
}

fn cmd_pfaffian(alg: &AnyAlgebra) -> Outcome {
    on_algebra!(alg, a => Ok((form_output(&pfaffian_form(a)?), 0)))
}

fn cmd_nonsingular(alg: &AnyAlgebra) -> Outcome {
    on_algebra!(alg, a => {
        let verdict = match nonsingularity_verdict(a) {
            Ok(v) => serde_json::to_value(v).expect("plain data"),
            Err(Error::OddDimension(m)) => json!({ "verdict": "odd-dimension", "m": m }),
            Err(e) => return Err(e.into()),
        };
        let ok = is_nonsingular(a);
        Ok((json!({ "nonsingular": ok, "pfaffian": verdict }), verdict_code(ok)))
    })
}

/// Any run that stops short of the tolerance is inconclusive; the flow cannot
/// tell a non-closed orbit from slow convergence.
fn flow_verdict(v: FlowVerdict) -> &'static str {
    match v {
        FlowVerdict::MinimalVectorFound => "nilsoliton",
        FlowVerdict::Plateau | FlowVerdict::MaxIterations => "inconclusive-plateau",
    }
}

fn cmd_flow(alg: &AnyAlgebra, seed: u64, jitter: f64, max_iter: usize, report: Option<&Path>) -> Outcome {
    let tol = precision()?;
    let opts = FlowOptions { seed, jitter, max_iter, ..FlowOptions::default() };
    let rep = on_algebra!(alg, a => gradient_flow(a, &opts)?);
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&flow_report_json(&rep)).expect("plain data");
        std::fs::write(path, text).map_err(|e| Failure { code: 3, message: format!("cannot write report: {e}") })?;
    }
    let check = check_nilso(&rep.final_algebra, tol.max(1e-6));
    let found = rep.verdict == FlowVerdict::MinimalVectorFound;
    let out = json!({
        "method": "flow",
        "verdict": flow_verdict(rep.verdict),
        "stop_reason": rep.verdict,
        "iterations": rep.iterations,
        "final_grad_norm": rep.final_grad_norm,
        "seed": rep.seed,
        "final_check": check,
    });
    Ok((out, verdict_code(found)))
}

fn cmd_nice(alg: &AnyAlgebra) -> Outcome {
    let data = on_algebra!(alg, a => nikolayevsky_test(a)?);
    let ok = data.admits_nilsoliton();
    let solution: Option<Vec<Value>> = data.solution.as_ref().map(|v| v.iter().map(scalar_json).collect());
    let out = json!({
        "method": "nice",
        "verdict": if ok { "nilsoliton" } else { "no-nilsoliton" },
        "triples": data.triples.iter().map(|&(i, j, k)| [i + 1, j + 1, k + 1]).collect::<Vec<_>>(),
        "u": data.u,
        "solution": solution,
    });
    Ok((out, verdict_code(ok)))
}

fn answer_json(a: NilsolitonAnswer) -> (Value, u8) {
    let code = verdict_code(a == NilsolitonAnswer::Yes);
    (serde_json::to_value(a).expect("plain data"), code)
}

fn cmd_pencil_nilsoliton(set: &AnyPencil) -> Outcome {
    let answer = match set {
        AnyPencil::Rational(s) => pencil_admits_nilsoliton(s),
        AnyPencil::Float(s) => pencil_admits_nilsoliton(s),
    };
    let (v, code) = answer_json(answer);
    Ok((json!({ "method": "pencil", "verdict": v }), code))
}

/// Ternary quartic from either a form file or the Pfaffian of an algebra.
fn load_quartic(cli: &Cli, src: &str) -> Result<AnyForm, Failure> {
    if src.starts_with("catalog:") {
        let alg = load_source(cli, src)?;
        return Ok(match &alg {
            AnyAlgebra::Rational(a) => AnyForm::Rational(pfaffian_form(a)?),
            AnyAlgebra::Float(a) => AnyForm::Float(pfaffian_form(a)?),
        });
    }
    let text = read_text(src)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("bad JSON: {e}")))?;
    if value.get("terms").is_some() {
        return Ok(load_form(&text)?);
    }
    Ok(match load_algebra(&text)? {
        AnyAlgebra::Rational(a) => AnyForm::Rational(pfaffian_form(&a)?),
        AnyAlgebra::Float(a) => AnyForm::Float(pfaffian_form(&a)?),
    })
}

fn invariants_of<S: Scalar>(f: &HomogeneousForm<S>, which: &[String]) -> Outcome {
    let mut out = serde_json::Map::new();
    out.insert("form".into(), form_output(f));
    for w in which {
        let value = match w.to_ascii_lowercase().as_str() {
            "i3" => scalar_json(&invariant_i3(f)?),
            "i6" => scalar_json(&invariant_i6(f)?),
            "hankel" => matrix_json(&hankel(f)?),
            "laplacian" => json!(laplacian_spectrum_ratios(f)?),
            other => return Err(usage(format!("unknown invariant `{other}` (expected I3, I6, hankel, laplacian)"))),
        };
        out.insert(w.clone(), value);
    }
    Ok((Value::Object(out), 0))
}

fn cmd_derivations<S: Scalar>(a: &TwoStepAlgebra<S>, graded: bool, skew: bool, basis: bool) -> Outcome {
    let der = derivation_space(a);
    let mut out = json!({ "dim": der.dim });
    if graded {
        out["graded"] = json!({
            "dim": der.graded_dim,
            "sl_dim": der.graded_sl_dim,
            "der0_dim": der.der0_dim,
            "quotient_dim": der.graded_quotient_dim(),
        });
    }
    if skew {
        let dims = skew_derivation_dims(a);
        let n = a.n();
        out["skew"] = json!({
            "k_dim": dims.k_dim,
            "k0_dim": dims.k0_dim,
            "quotient_dim": dims.quotient_dim,
            "bound": n * n.saturating_sub(1) / 2,
        });
    }
    if basis {
        out["basis"] = Value::Array(der.basis.iter().map(matrix_json).collect());
    }
    Ok((out, 0))
}

fn cmd_moment<S: Scalar>(a: &TwoStepAlgebra<S>) -> Outcome {
    let mp = moment_map(a)?;
    Ok((json!({ "m1": matrix_json(&mp.m1), "m2": matrix_json(&mp.m2) }), 0))
}

fn pencil_pf<S: Scalar>(s: &PencilSet<S>) -> Outcome {
    Ok((form_output(&pencil_pfaffian(s)?), 0))
}

fn cmd_pencil(action: &PencilAction) -> Outcome {
    match action {
        PencilAction::Build { set } => Ok((any_algebra_to_json(&pencil_algebra(&load_set(set)?)), 0)),
        PencilAction::Pf { set } => match load_set(set)? {
            AnyPencil::Rational(s) => pencil_pf(&s),
            AnyPencil::Float(s) => pencil_pf(&s),
        },
        PencilAction::Nilsoliton { set } => {
            let (v, code) = match load_set(set)? {
                AnyPencil::Rational(s) => answer_json(pencil_admits_nilsoliton(&s)),
                AnyPencil::Float(s) => answer_json(pencil_admits_nilsoliton(&s)),
            };
            Ok((json!({ "verdict": v }), code))
        }
        PencilAction::Iso { left, right } => {
            let (l, r) = (load_set(left)?, load_set(right)?);
            let result = match (l, r) {
                (AnyPencil::Rational(l), AnyPencil::Rational(r)) => isomorphism_json(&pencil_isomorphic(&l, &r)),
                (l, r) => {
                    let float = |s: AnyPencil| match s {
                        AnyPencil::Rational(s) => s.to_float(),
                        AnyPencil::Float(s) => s,
                    };
                    isomorphism_json(&pencil_isomorphic(&float(l), &float(r)))
                }
            };
            let code = verdict_code(result["result"] == "isomorphic");
            Ok((result, code))
        }
    }
}

fn cmd_catalog(cli: &Cli, action: &CatalogAction) -> Outcome {
    match action {
        CatalogAction::List => Ok((serde_json::to_value(catalog_list()).expect("plain data"), 0)),
        CatalogAction::Emit { name } => Ok((any_algebra_to_json(&resolve_catalog(cli, name)?), 0)),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Pfaffian { src } => cmd_pfaffian(&load_source(cli, src)?),
        Command::Nonsingular { src } => cmd_nonsingular(&load_source(cli, src)?),
        Command::Nilsoliton { src, method, report, seed, jitter, max_iter } => match method {
            Method::Flow => cmd_flow(&load_source(cli, src)?, *seed, *jitter, *max_iter, report.as_deref()),
            Method::Nice => cmd_nice(&load_source(cli, src)?),
            Method::Pencil => {
                let set = match src.strip_prefix("catalog:") {
                    Some("pencil") => cli.set.as_deref().ok_or_else(|| usage("catalog:pencil needs --set"))?,
                    Some(_) => return Err(usage("--method pencil needs a pencil set")),
                    None => src.as_str(),
                };
                cmd_pencil_nilsoliton(&load_set(set)?)
            }
        },
        Command::Invariants { src, which } => match load_quartic(cli, src)? {
            AnyForm::Rational(f) => invariants_of(&f, which),
            AnyForm::Float(f) => invariants_of(&f, which),
        },
        Command::Pencil { action } => cmd_pencil(action),
        Command::Derivations { src, graded, skew, basis } => {
            on_algebra!(&load_source(cli, src)?, a => cmd_derivations(a, *graded, *skew, *basis))
        }
        Command::Moment { src } => on_algebra!(&load_source(cli, src)?, a => cmd_moment(a)),
        Command::Catalog { action } => cmd_catalog(cli, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print = |v: &Value| {
        if cli.pretty {
            serde_json::to_string_pretty(v)
        } else {
            serde_json::to_string(v)
        }
        .expect("plain data")
    };
    match run(&cli) {
        Ok((value, code)) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{}", print(&value));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("{}", print(&json!({ "error": f.message })));
            ExitCode::from(f.code)
        }
    }
}
