//! `paley`: build generalized Paley graphs, compute independence numbers and
//! theta values, construct and verify difference-free polynomial sets, and
//! print bound ledgers.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use paley_core::bounds::{bounds_report, fmt12, BoundsLedger};
use paley_core::graphs::{build_paley, export_dimacs, CayleyGraph, ProductGraph};
use paley_core::indep::{alpha_cayley_power, AlphaOptions, SolverOptions};
use paley_core::rings::{RingCtx, RingSpec};
use paley_core::sarkozy::{
    build_sarkozy_general, build_sarkozy_power, Certificate, SarkozyParams, SarkozySet, Variant,
};
use paley_core::theta::{lovasz_theta, ruzsa_bound_check, theta_character_lp, theta_zmod, ThetaReport};
use paley_core::Error;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "paley", version, about = "Generalized Paley graphs and difference-free polynomial sets")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Solver time budget in seconds.
    #[arg(long, default_value_t = 300, global = true)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build Paley_k(R), its complement or a strong power, and summarize it.
    Graph(GraphArgs),
    /// Independence number of a strong power.
    Alpha(AlphaArgs),
    /// Lovász theta and the extreme eigenvalues.
    Theta(ThetaArgs),
    /// Build a set in P_{q,n} with no F(u) differences.
    Construct(ConstructArgs),
    /// Check a saved construction with the brute-force verifier.
    Verify(VerifyArgs),
    /// Per-symbol lower and upper bounds for (q, k, n).
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct GraphSel {
    /// `fq:<q>` or `zmod:<m>`.
    #[arg(long)]
    ring: String,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    complement: bool,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    sel: GraphSel,
    #[arg(long, default_value_t = 1)]
    power: usize,
    /// Write the (symmetric) graph in DIMACS edge format.
    #[arg(long)]
    dimacs: Option<PathBuf>,
}

#[derive(Args)]
struct AlphaArgs {
    #[command(flatten)]
    sel: GraphSel,
    #[arg(long, default_value_t = 1)]
    power: usize,
    /// Run plain branch and bound without theta or slice cutoffs.
    #[arg(long)]
    no_cutoff: bool,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    sel: GraphSel,
    /// Also check the bound α < m^{1-1/k} for squarefree odd m.
    #[arg(long)]
    ruzsa: bool,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "power")]
    variant: String,
    /// Coefficients of F as canonical indices, constant term first. Default T^k.
    #[arg(long)]
    f: Option<String>,
    /// Save the certificate for `verify --in`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip running the verifier.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: usize,
    /// Exponent weight for the refined rate, e.g. `4/9` or `0.444`.
    #[arg(long, value_parser = parse_fraction)]
    gamma: Option<f64>,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if b == 0.0 {
                return Err("zero denominator".into());
            }
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    Ok(value)
}

/// A failed command: exit code plus an optional JSON payload for stdout.
struct Failure {
    code: u8,
    message: String,
    payload: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            _ if e.is_cap_violation() => 3,
            Error::Timeout { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string(), payload: None }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into(), payload: None }
}

type CmdResult = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = AlphaOptions {
        solver: SolverOptions { budget: Duration::from_secs(cli.budget), ..Default::default() },
        ..Default::default()
    };
    if cli.format == Format::Csv && !matches!(cli.command, Command::Bounds(_)) {
        eprintln!("error: csv output is only available for `bounds`");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Graph(a) => cmd_graph(a),
        Command::Alpha(a) => cmd_alpha(a, &opts),
        Command::Theta(a) => cmd_theta(a, &opts),
        Command::Construct(a) => cmd_construct(a, &opts),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a, &opts, cli.format),
    };
    match result {
        Ok(value) => {
            emit(&value, cli.format);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(p) = f.payload {
                emit(&p, cli.format);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(value: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&round_floats(value.clone())).expect("json") + "\n",
        Format::Csv => value.as_str().unwrap_or_default().to_string(),
        Format::Text => to_text(value, 0),
    };
    // A closed pipe downstream is not an error worth reporting.
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

/// Rounds every float to 12 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x: f64 = fmt12(n.as_f64().expect("f64")).parse().expect("rounded float");
            json!(x)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn to_text(v: &Value, indent: usize) -> String {
    if let Value::String(s) = v {
        if indent == 0 && s.contains('\n') {
            return s.clone();
        }
    }
    let pad = "  ".repeat(indent);
    let mut out = String::new();
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                match v {
                    Value::Object(_) => out.push_str(&format!("{pad}{k}:\n{}", to_text(v, indent + 1))),
                    Value::Array(a) if a.len() > 16 => {
                        out.push_str(&format!("{pad}{k}: [{} entries]\n", a.len()));
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map(fmt12).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => serde_json::to_string(&round_floats(other.clone())).expect("json"),
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    if let Value::Object(o) = body {
        map.extend(o);
    }
    Value::Object(map)
}

fn select(sel: &GraphSel) -> Result<CayleyGraph, Failure> {
    let spec: RingSpec = sel.ring.parse()?;
    if sel.k < 2 {
        return Err(invalid("--k must be at least 2"));
    }
    let ring = Arc::new(RingCtx::new(spec)?);
    let g = build_paley(&ring, sel.k);
    Ok(if sel.complement { g.complement_cayley() } else { g })
}

fn cmd_graph(a: &GraphArgs) -> CmdResult {
    let g = select(&a.sel)?;
    if a.power == 0 {
        return Err(invalid("--power must be at least 1"));
    }
    let base = g.to_generic();
    let mut summary = g.summary();
    let product;
    let graph = if a.power == 1 {
        &base
    } else {
        product = ProductGraph::power(&base, a.power)?;
        let s = product.graph().summary();
        summary.power = a.power as u32;
        summary.order = s.order;
        summary.degree = s.degree;
        summary.edges = s.edges;
        summary.connection = None;
        product.graph()
    };
    let mut body = serde_json::to_value(&summary).expect("summary");
    body["directed"] = json!(!summary.symmetric);
    if let Some(path) = &a.dimacs {
        export_dimacs(graph, path)?;
        body["dimacs"] = json!(path.display().to_string());
    }
    Ok(envelope("graph", body))
}

fn cmd_alpha(a: &AlphaArgs, opts: &AlphaOptions) -> CmdResult {
    let g = select(&a.sel)?;
    if a.power == 0 {
        return Err(invalid("--power must be at least 1"));
    }
    let mut opts = opts.clone();
    if a.no_cutoff {
        opts.theta_cutoff = false;
        opts.slice_cutoff = false;
    }
    let head = json!({
        "ring": a.sel.ring,
        "k": a.sel.k,
        "complement": a.sel.complement,
        "power": a.power,
    });
    match alpha_cayley_power(&g, a.power, &opts) {
        Ok(set) => {
            let mut body = head;
            body["alpha"] = json!(set.size);
            body["status"] = json!("exact");
            body["certificate"] = serde_json::to_value(&set).expect("set");
            Ok(envelope("alpha", body))
        }
        Err(Error::Timeout { budget, incumbent }) => {
            let mut body = head;
            body["alpha_lower_bound"] = json!(incumbent.size);
            body["status"] = json!("timeout");
            body["budget_s"] = json!(budget.as_secs());
            body["certificate"] = serde_json::to_value(&*incumbent).expect("set");
            Err(Failure {
                code: 4,
                message: format!("solver budget of {}s exhausted", budget.as_secs()),
                payload: Some(envelope("alpha", body)),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn theta_for(g: &CayleyGraph) -> Result<ThetaReport, Error> {
    let ring = g.ring();
    match ring.spec() {
        RingSpec::ZMod { m } if !ring.is_field() => {
            if g.is_complemented() {
                theta_character_lp(g)
            } else {
                theta_zmod(m as u64, g.k())
            }
        }
        _ => lovasz_theta(g),
    }
}

fn cmd_theta(a: &ThetaArgs, opts: &AlphaOptions) -> CmdResult {
    let g = select(&a.sel)?;
    let report = theta_for(&g)?;
    let mut body = json!({
        "ring": a.sel.ring,
        "k": a.sel.k,
        "complement": a.sel.complement,
        "theta": report.value,
        "method": report.method,
        "lambda_max": report.lambda_max,
        "lambda_min": report.lambda_min,
    });
    if !report.factors.is_empty() {
        body["factors"] = serde_json::to_value(&report.factors).expect("factors");
    }
    if a.ruzsa {
        let m = match g.ring().spec() {
            RingSpec::ZMod { m } => m as u64,
            RingSpec::Field { .. } => return Err(invalid("--ruzsa needs a zmod:<m> ring")),
        };
        let check = ruzsa_bound_check(m, a.sel.k, opts)?;
        body["ruzsa"] = serde_json::to_value(&check).expect("check");
    }
    Ok(envelope("theta", body))
}

fn describe(set: &SarkozySet, verify: bool) -> Result<Value, Failure> {
    let p = &set.params;
    let (q, k, n) = (p.q, p.k as usize, p.n);
    let formula = match p.variant {
        Variant::General => {
            let c = n.div_ceil(k);
            json!({ "base": set.s.len(), "base_exponent": c, "q": q, "q_exponent": n - c })
        }
        Variant::Power => {
            json!({ "base": set.u.len(), "base_exponent": n / (2 * k), "q": q, "q_exponent": n - n / k })
        }
    };
    let verdict = if verify {
        match set.verify() {
            Ok(true) => json!("pass"),
            Ok(false) => json!("fail"),
            Err(e) if e.is_cap_violation() => json!(format!("skipped: {e}")),
            Err(e) => return Err(e.into()),
        }
    } else {
        json!("skipped")
    };
    let cert = serde_json::to_value(set.certificate()).expect("certificate");
    Ok(json!({
        "params": cert["params"],
        "certificate": cert,
        "size": set.size.to_string(),
        "size_formula": formula,
        "closed_form_matches": set.closed_form() == set.size,
        "verification": verdict,
    }))
}

fn cmd_construct(a: &ConstructArgs, opts: &AlphaOptions) -> CmdResult {
    let variant: Variant = a.variant.parse()?;
    let mut params = SarkozyParams::monomial(a.q, a.k, a.n, variant);
    if let Some(f) = &a.f {
        params.f = f
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| invalid(format!("bad coefficient {t:?} in --f"))))
            .collect::<Result<_, _>>()?;
    }
    let set = match variant {
        Variant::General => build_sarkozy_general(&params, opts)?,
        Variant::Power => build_sarkozy_power(&params, opts)?,
    };
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&set.certificate()).expect("certificate");
        fs::write(path, text + "\n").map_err(Error::from)?;
    }
    Ok(envelope("construct", describe(&set, !a.no_verify)?))
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(Error::from)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", a.input.display())))?;
    // Accept a bare certificate or the output of `construct`.
    let cert_value = value.get("certificate").cloned().unwrap_or(value);
    let cert: Certificate =
        serde_json::from_value(cert_value).map_err(|e| invalid(format!("not a certificate: {e}")))?;
    let set = SarkozySet::from_json_certificate(cert)?;
    let pass = set.verify()?;
    let body = json!({
        "params": serde_json::to_value(&set.params).expect("params"),
        "size": set.size.to_string(),
        "verification": if pass { "pass" } else { "fail" },
    });
    Ok(envelope("verify", body))
}

fn cmd_bounds(a: &BoundsArgs, opts: &AlphaOptions, format: Format) -> CmdResult {
    let ledger = bounds_report(a.q, a.k, a.n, a.gamma, opts)?;
    Ok(match format {
        Format::Csv => Value::String(format!("{}\n{}\n", BoundsLedger::CSV_HEADER, ledger.csv_row())),
        Format::Text => Value::String(ledger.to_text()),
        Format::Json => {
            let mut body = serde_json::to_value(&ledger).expect("ledger");
            body["ordering_holds"] = json!(ledger.ordering_holds());
            envelope("bounds", body)
        }
    })
}
