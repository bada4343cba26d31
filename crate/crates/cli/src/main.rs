use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use hypercurv_core::bounds::{
    euler_integrand_bounds, f_lower_bound, s_quadratic, volume_hypothesis_bounds, volume_lower_bound_s,
    weyl_threshold_report, GlobalData, ScalSign, DEFAULT_BOUNDS_TOL,
};
use hypercurv_core::classify::{sharp_inequalities, spectrum_report};
use hypercurv_core::extrinsic::{
    bach_tensor, bochner_residuals, cgb_integrand, closed_form_norms, div_weyl_sd, gauss_equations, signature_integrand,
    FieldData, PointInput,
};
use hypercurv_core::immersions::{integrate, integrate_with_nodes, Functional, Immersion, Kind};
use hypercurv_core::PointState;
use hypercurv_poly::registry::{lookup, verify};
use hypercurv_poly::{verify_all, Verification};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

const CSV_HELP: &str = "\
CSV output (--format csv):
  point     index,n,c,H,S,A2sq,trA3,trA5,trA6,Wsq,Wpmsq,RicTFsq,cgb,signature,m,w
  classify  index,m,partition,w,lcf,einstein,twoTwoSplit,indeterminate
  bounds    predicate,status,holds,slack,equality,bound
  integrate geometry,functional,res,nodes,value,integral,topological
  verify    name,status,constraint,components,maxDegree
  --dump    param1,param2,param3,param4,integrand,weight (one row per node)

Exit codes: 0 success, 1 a bound or identity failed, 2 invalid input.";

#[derive(Parser, Debug)]
#[command(name = "hypercurv", version, about = "Curvature of hypersurfaces in five-dimensional space forms", after_help = CSV_HELP)]
struct Cli {
    /// Tolerance overriding every module default.
    #[arg(long, global = true, env = "HYPERCURV_TOL", allow_hyphen_values = true)]
    tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pointwise curvature report for one point or an array of points.
    Point(InputArg),
    /// Principal and Weyl multiplicities, structure flags and trace margins.
    Classify(InputArg),
    /// Global bounds from integral data.
    Bounds(BoundsArgs),
    /// Quadrature of a curvature functional over a catalog geometry.
    Integrate(IntegrateArgs),
    /// Exact certification of the polynomial identities.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct InputArg {
    /// JSON file, `-` for stdin, or inline JSON. Reads stdin when omitted.
    input: Option<String>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<i64>,
    #[arg(long)]
    vol: Option<f64>,
    /// Constant value of S.
    #[arg(long = "S")]
    s: Option<f64>,
    /// The Weyl functional ∫|W|².
    #[arg(long = "weyl-l2")]
    weyl_l2: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c: f64,
    /// Average of |A²|² over the volume.
    #[arg(long = "a2avg")]
    a2avg: Option<f64>,
    #[arg(long = "scal-sign", value_enum)]
    scal_sign: Option<SignArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Positive,
    Zero,
    Negative,
    Unknown,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// clifford:4:K, sphere:4 or umbilic:RHO.
    #[arg(long)]
    geometry: String,
    /// cgb, weyl, signature or volume.
    #[arg(long)]
    functional: String,
    /// Nodes per angle.
    #[arg(long, default_value_t = 32)]
    res: usize,
    /// Write every node to this CSV file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("which").required(true).args(["identity", "all"])))]
struct VerifyArgs {
    #[arg(long)]
    identity: Vec<String>,
    #[arg(long)]
    all: bool,
}

enum Failure {
    Input(String),
    Violation(String),
}

type Outcome = Result<Report, Failure>;

/// Output plus whether a checked claim failed.
struct Report {
    json: Value,
    csv: Vec<Vec<String>>,
    violated: bool,
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("error: --tol must be positive, got {t}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Point(a) => read_input(a).and_then(|v| cmd_point(&v, cli.tol)),
        Command::Classify(a) => read_input(a).and_then(|v| cmd_classify(&v, cli.tol)),
        Command::Bounds(a) => cmd_bounds(a, cli.tol),
        Command::Integrate(a) => cmd_integrate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(r) => {
            if let Err(e) = emit(&r, cli.format) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if r.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(r: &Report, format: Format) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&r.json)?),
        Format::Pretty => writeln!(out, "{}", serde_json::to_string_pretty(&r.json)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &r.csv {
                w.write_record(row)?;
            }
            w.flush()
        }
    }
}

fn read_input(a: &InputArg) -> Result<String, Failure> {
    match a.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| input_err(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(s) if s.trim_start().starts_with(['{', '[']) => Ok(s.to_string()),
        Some(path) => std::fs::read_to_string(path).map_err(|e| input_err(format!("{path}: {e}"))),
    }
}

/// Parse one point or an array of points; errors carry the JSON path.
fn parse_points(src: &str, tol: Option<f64>) -> Result<(bool, Vec<(PointState, FieldData)>), Failure> {
    let value: Value = serde_json::from_str(src).map_err(|e| input_err(format!("malformed JSON: {e}")))?;
    let (batch, items) = match value {
        Value::Array(v) => (true, v),
        other => (false, vec![other]),
    };
    let points = items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let prefix = if batch { format!("$[{i}]") } else { "$".to_string() };
            let parsed: PointInput = serde_path_to_error::deserialize(item).map_err(|e| {
                let path = e.path().to_string();
                let at = if path == "." { prefix.clone() } else { format!("{prefix}.{path}") };
                input_err(format!("{at}: {}", e.inner()))
            })?;
            parsed.build(tol).map_err(|e| input_err(format!("{prefix}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((batch, points))
}

fn rows(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn unavailable(e: impl std::fmt::Display) -> Value {
    json!({ "unavailable": e.to_string() })
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

fn point_report(p: &PointState, fields: &FieldData) -> (Value, Vec<String>) {
    let pack = gauss_equations(p);
    let norms = closed_form_norms(p);
    let spectrum = spectrum_report(p);
    let cgb = cgb_integrand(p);
    let sig = signature_integrand(p);
    let bach = match bach_tensor(p) {
        Ok(b) => rows(&DMatrix::from_iterator(4, 4, b.iter().copied())),
        Err(e) => unavailable(e),
    };
    let div = match div_weyl_sd(p) {
        Ok(d) => json!({
            "components": d.components().iter().map(|(idx, plus, minus)| json!({
                "index": idx, "plus": plus, "minus": minus
            })).collect::<Vec<_>>(),
            "plusNormSq": d.plus_norm_sq(),
            "minusNormSq": d.minus_norm_sq(),
        }),
        Err(e) => unavailable(e),
    };
    let json = json!({
        "n": p.n(),
        "c": p.c(),
        "H": p.h(),
        "S": p.s(),
        "minimal": p.is_minimal(),
        "curvature": { "scal": pack.scal, "ric": rows(&pack.ric), "ricTF": rows(&pack.ric_tf) },
        "norms": match &norms { Ok(n) => serde_json::to_value(n).unwrap_or(Value::Null), Err(e) => unavailable(e) },
        "spectrum": serde_json::to_value(&spectrum).unwrap_or(Value::Null),
        "cgb": match &cgb { Ok(v) => json!(v), Err(e) => unavailable(e) },
        "signature": match &sig { Ok(v) => json!(v), Err(e) => unavailable(e) },
        "bach": bach,
        "divWeyl": div,
        "bochner": serde_json::to_value(bochner_residuals(p, fields)).unwrap_or(Value::Null),
        "warnings": p.warnings(),
    });
    let n = norms.as_ref().ok();
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let csv = vec![
        p.n().to_string(),
        num(p.c()),
        num(p.h()),
        num(p.s()),
        opt(n.map(|n| n.a2sq)),
        opt(n.map(|n| n.tr_a3)),
        opt(n.map(|n| n.tr_a5)),
        opt(n.map(|n| n.tr_a6)),
        opt(n.map(|n| n.wsq)),
        opt(n.and_then(|n| n.wpmsq)),
        opt(n.and_then(|n| n.ric_tf_sq)),
        opt(cgb.ok()),
        opt(sig.ok()),
        spectrum.m.to_string(),
        spectrum.w.map(|w| w.to_string()).unwrap_or_default(),
    ];
    (json, csv)
}

fn batch_report<F>(src: &str, tol: Option<f64>, header: &[&str], f: F) -> Outcome
where
    F: Fn(&PointState, &FieldData) -> (Value, Vec<String>) + Sync,
{
    let (batch, points) = parse_points(src, tol)?;
    let results: Vec<(Value, Vec<String>)> = points.par_iter().map(|(p, fd)| f(p, fd)).collect();
    let mut csv = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for (i, (_, row)) in results.iter().enumerate() {
        let mut r = vec![i.to_string()];
        r.extend(row.iter().cloned());
        csv.push(r);
    }
    let mut values: Vec<Value> = results.into_iter().map(|(v, _)| v).collect();
    let json = if batch { Value::Array(values) } else { values.remove(0) };
    Ok(Report { json, csv, violated: false })
}

fn cmd_point(src: &str, tol: Option<f64>) -> Outcome {
    let header = [
        "index", "n", "c", "H", "S", "A2sq", "trA3", "trA5", "trA6", "Wsq", "Wpmsq", "RicTFsq", "cgb", "signature", "m", "w",
    ];
    batch_report(src, tol, &header, point_report)
}

fn cmd_classify(src: &str, tol: Option<f64>) -> Outcome {
    let header = ["index", "m", "partition", "w", "lcf", "einstein", "twoTwoSplit", "indeterminate"];
    batch_report(src, tol, &header, |p, _| {
        let r = spectrum_report(p);
        let sharp = sharp_inequalities(p).map(|s| serde_json::to_value(s).unwrap_or(Value::Null));
        let mut json = serde_json::to_value(&r).unwrap_or(Value::Null);
        if let (Value::Object(m), Err(e)) = (&mut json, &sharp) {
            m.insert("sharp".into(), unavailable(e));
        }
        let flag = |f: fn(&hypercurv_core::classify::Flags) -> bool| r.flags.as_ref().map(|x| f(x).to_string()).unwrap_or_default();
        let csv = vec![
            r.m.to_string(),
            r.partition.iter().map(ToString::to_string).collect::<Vec<_>>().join("+"),
            r.w.map(|w| w.to_string()).unwrap_or_default(),
            flag(|f| f.lcf),
            flag(|f| f.einstein),
            flag(|f| f.two_two_split),
            r.indeterminate.to_string(),
        ];
        (json, csv)
    })
}

fn cmd_bounds(a: &BoundsArgs, tol: Option<f64>) -> Outcome {
    let g = GlobalData {
        chi: a.chi,
        vol: a.vol,
        s: a.s,
        weyl_l2: a.weyl_l2,
        c: Some(a.c),
        a2avg: a.a2avg,
        scal_sign: match a.scal_sign {
            Some(SignArg::Positive) => ScalSign::Positive,
            Some(SignArg::Zero) => ScalSign::Zero,
            Some(SignArg::Negative) => ScalSign::Negative,
            Some(SignArg::Unknown) | None => ScalSign::Unknown,
        },
    };
    g.validate().map_err(input_err)?;
    if !a.c.is_finite() {
        return Err(input_err("c must be finite"));
    }
    let tol = tol.unwrap_or(DEFAULT_BOUNDS_TOL);
    let preds = weyl_threshold_report(&g, tol);
    let violated = preds.values().any(|p| p.violated());

    let mut derived: BTreeMap<&str, Value> = BTreeMap::new();
    if let (Some(chi), Some(vol)) = (g.chi, g.vol) {
        derived.insert("fLowerBound", json!(f_lower_bound(chi as f64 / vol)));
        if let Some(a2) = g.a2avg {
            derived.insert(
                "sQuadratic",
                match s_quadratic(a.c, chi, vol, a2) {
                    Ok(q) => serde_json::to_value(q).unwrap_or(Value::Null),
                    Err(e) => unavailable(e),
                },
            );
        }
    }
    if let Some(chi) = g.chi {
        derived.insert(
            "volumeHypothesisBound",
            match volume_hypothesis_bounds(chi) {
                Ok(Some(b)) => serde_json::to_value(b).unwrap_or(Value::Null),
                Ok(None) => unavailable("no bound for chi = 2"),
                Err(e) => unavailable(e),
            },
        );
        if let Some(b) = volume_lower_bound_s(chi) {
            derived.insert("volumeLowerBoundS", json!(b));
        }
    }
    if let Some(s) = g.s {
        let (low, high) = euler_integrand_bounds(s);
        derived.insert("eulerIntegrandBracket", json!([low, high]));
    }

    let mut csv = vec![["predicate", "status", "holds", "slack", "equality", "bound"].map(String::from).to_vec()];
    for (name, p) in &preds {
        let status = serde_json::to_value(p.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        csv.push(vec![
            name.to_string(),
            status,
            p.holds.map(|b| b.to_string()).unwrap_or_default(),
            p.slack.map(num).unwrap_or_default(),
            p.equality.map(|b| b.to_string()).unwrap_or_default(),
            p.bound.map(num).unwrap_or_default(),
        ]);
    }
    let json = json!({
        "input": g,
        "tol": tol,
        "predicates": preds,
        "derived": derived,
        "violated": violated,
    });
    Ok(Report { json, csv, violated })
}

fn cmd_integrate(a: &IntegrateArgs) -> Outcome {
    let kind: Kind = a.geometry.parse().map_err(input_err)?;
    let functional: Functional = a.functional.parse().map_err(input_err)?;
    if a.res == 0 || a.res > 512 {
        return Err(input_err(format!("res must be in 1..=512, got {}", a.res)));
    }
    let imm = Immersion::new(kind).map_err(input_err)?;
    let r = match &a.dump {
        None => integrate(&imm, functional, a.res).map_err(input_err)?,
        Some(path) => {
            let (r, nodes) = integrate_with_nodes(&imm, functional, a.res).map_err(input_err)?;
            let mut w = csv::Writer::from_path(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            let io = |e: csv::Error| input_err(format!("{}: {e}", path.display()));
            w.write_record(["param1", "param2", "param3", "param4", "integrand", "weight"]).map_err(io)?;
            for n in &nodes {
                let mut row: Vec<String> = n.params.iter().map(|x| num(*x)).collect();
                row.push(num(n.integrand));
                row.push(num(n.weight));
                w.write_record(&row).map_err(io)?;
            }
            w.flush().map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            r
        }
    };
    let csv = vec![
        ["geometry", "functional", "res", "nodes", "value", "integral", "topological"].map(String::from).to_vec(),
        vec![
            r.geometry.clone(),
            serde_json::to_value(r.functional).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            r.res.to_string(),
            r.nodes.to_string(),
            num(r.value),
            num(r.integral),
            r.topological.to_string(),
        ],
    ];
    let json = serde_json::to_value(&r).map_err(input_err)?;
    Ok(Report { json, csv, violated: false })
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let results: Vec<Verification> = if a.all {
        verify_all().map_err(|e| Failure::Violation(e.to_string()))?
    } else {
        let ids = a.identity.iter().map(|n| lookup(n).map_err(input_err)).collect::<Result<Vec<_>, _>>()?;
        ids.par_iter().map(verify).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Violation(e.to_string()))?
    };
    let passed = results.iter().filter(|v| v.passed()).count();
    let mut csv = vec![["name", "status", "constraint", "components", "maxDegree"].map(String::from).to_vec()];
    for v in &results {
        let field = |x: Value| match x {
            Value::String(s) => s,
            other => other.to_string(),
        };
        csv.push(vec![
            v.name.clone(),
            field(json!(v.status)),
            field(json!(v.constraint)),
            v.components.to_string(),
            v.max_degree.to_string(),
        ]);
    }
    let json = json!({ "identities": results, "passed": passed, "total": results.len() });
    Ok(Report { json, csv, violated: passed != results.len() })
}
