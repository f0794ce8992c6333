//! `conedet`: determinants of Laplacians on conical surfaces from the
//! command line. Scalar results are printed as JSON, curves as CSV.
//!
//! Exit codes: 0 success, 2 usage, 3 domain or configuration error,
//! 4 convergence failure.

mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::{ContextKind, ContextValue};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use conedet::barnes::{default_route, zprime0_by_route, zprime0_cross_check, BarnesArg, ZPrimeRoute};
use conedet::cone_terms::{c_beta_breakdown, heat_trace_a0, zeta0_surface, SurfaceTopology};
use conedet::determinants::{
    logdet_disk, logdet_flat_disk, logdet_flat_sphere_as_with_area, logdet_flat_sphere_with_area,
    logdet_hyperbolic_sphere, logdet_spindle, logdet_spindle_area4pi, spindle_distance, DiskConfig, LogDet,
    SpindleConfig, ZPrimeDefinition,
};
use conedet::extremal::{find_local_max, scan_curve, taylor_check_at_zero, ScanGrid, ScanParam, ScanRow, ScanTarget};
use conedet::quadrature::{flat_sphere_area, flat_sphere_area_mc};
use conedet::special_fn::RationalOrder;

use input::{parse_order, parse_tol, OrderSpec};

const CLOSED_FORM_TOL: f64 = 1e-10;
const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "conedet", version, about = "Determinants of Laplacians on surfaces with conical singularities")]
struct Cli {
    /// Tolerance; defaults to 1e-10 for closed forms and 1e-8 for
    /// quadrature-backed quantities.
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Option<f64>,

    /// Emit the labelled terms of each log-determinant.
    #[arg(long, global = true)]
    breakdown: bool,

    /// Add the wall time to the output metadata (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// zeta_B'(0; a, 1, 1)
    #[command(name = "barnes-zprime0")]
    BarnesZprime0(BarnesArgs),
    /// The per-point constant C(beta)
    Cbeta(OrderArgs),
    /// zeta(0) of a compact surface with cone points
    Zeta0(Zeta0Args),
    /// Log-determinants
    #[command(subcommand)]
    Det(DetCommand),
    /// Total areas
    #[command(subcommand)]
    Area(AreaCommand),
    /// Curves as CSV
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Local maximum of the area-4pi spindle determinant in beta (mu = 0)
    FindMax(FindMaxArgs),
    /// Finite-difference Taylor coefficients at the round sphere
    TaylorCheck(TaylorArgs),
    /// Geodesic distances
    #[command(subcommand)]
    Distance(DistanceCommand),
}

#[derive(Args)]
struct BarnesArgs {
    /// Real a > 0
    #[arg(long, conflicts_with_all = ["p", "q"], required_unless_present = "p")]
    a: Option<f64>,
    /// Numerator of a = p/q
    #[arg(long, requires = "q")]
    p: Option<u64>,
    /// Denominator of a = p/q
    #[arg(long, requires = "p")]
    q: Option<u64>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    /// Evaluate both the closed form and the integral (needs --p/--q)
    #[arg(long, requires = "p", conflicts_with = "a")]
    cross_check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Rational,
    Integral,
    Taylor,
}

impl From<RouteArg> for ZPrimeRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Rational => ZPrimeRoute::RationalClosedForm,
            RouteArg::Integral => ZPrimeRoute::IntegralRepresentation,
            RouteArg::Taylor => ZPrimeRoute::TaylorNearOne,
        }
    }
}

#[derive(Args)]
struct OrderArgs {
    /// Cone order: integer, fraction n/d (exact) or decimal
    #[arg(long, allow_hyphen_values = true, value_parser = parse_order)]
    beta: OrderSpec,
}

#[derive(Args)]
struct Zeta0Args {
    /// Euler characteristic of the underlying surface
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    euler: i32,
    /// Comma-separated cone orders
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_order)]
    orders: Vec<OrderSpec>,
    /// Dirichlet boundary (no zero mode)
    #[arg(long)]
    boundary: bool,
}

#[derive(Subcommand)]
enum DetCommand {
    /// Sphere of curvature K with two antipodal cone points of order beta
    Spindle(SpindleArgs),
    /// Spindle normalized to area 4 pi
    #[command(name = "spindle-area4pi")]
    SpindleArea4pi(SpindleArea4piArgs),
    /// Flat metric on the sphere with cone points (JSON input)
    FlatSphere(FlatSphereArgs),
    /// Constant-curvature disk with one cone point
    Disk(DiskArgs),
    /// Flat disk of a given radius
    FlatDisk(FlatDiskArgs),
    /// Hyperbolic sphere with cone points (JSON summary input)
    Hyperbolic(FileArgs),
}

#[derive(Args)]
struct SpindleArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_order)]
    beta: OrderSpec,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    /// Curvature K > 0
    #[arg(long = "K", alias = "curvature", default_value_t = 1.0, allow_hyphen_values = true)]
    curvature: f64,
}

#[derive(Args)]
struct SpindleArea4piArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_order)]
    beta: OrderSpec,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlatForm {
    /// Per-point constants C(beta)
    Cbeta,
    /// Per-point Z'_a(0) via zeta_B'
    As,
    /// Per-point Z'_a(0) via the integral J(a)
    AsIntegral,
}

#[derive(Args)]
struct FlatSphereArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cbeta")]
    form: FlatForm,
}

#[derive(Args)]
struct DiskArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_order)]
    beta: OrderSpec,
    /// K > -1; the curvature is (beta+1)^2 K
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k: f64,
}

#[derive(Args)]
struct FlatDiskArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
}

#[derive(Args)]
struct FileArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum AreaCommand {
    /// Total area of a flat sphere (JSON input)
    FlatSphere(AreaArgs),
}

#[derive(Args)]
struct AreaArgs {
    #[arg(long)]
    input: PathBuf,
    /// Also run the Monte-Carlo estimator with this many samples
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum ScanCommand {
    /// C(beta) on a beta grid
    Cbeta(CbetaScanArgs),
    /// det of the area-4pi spindle on a beta or mu grid
    FixedArea(FixedAreaScanArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CbetaScanArgs {
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    Beta,
    Mu,
}

#[derive(Args)]
struct FixedAreaScanArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "beta")]
    param: ParamArg,
    /// Value of the other parameter (mu for beta scans, beta for mu scans)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    fixed: f64,
}

#[derive(Args)]
struct FindMaxArgs {
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    initial: f64,
}

#[derive(Args)]
struct TaylorArgs {
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
}

#[derive(Subcommand)]
enum DistanceCommand {
    /// Distance between the two cone points of a spindle
    Spindle(SpindleArgs),
}

enum Output {
    Json(Value),
    Csv { text: String, out: Option<PathBuf>, rows: usize, skipped: usize },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BarnesZprime0(_) => "barnes-zprime0",
            Command::Cbeta(_) => "cbeta",
            Command::Zeta0(_) => "zeta0",
            Command::Det(d) => match d {
                DetCommand::Spindle(_) => "det spindle",
                DetCommand::SpindleArea4pi(_) => "det spindle-area4pi",
                DetCommand::FlatSphere(_) => "det flat-sphere",
                DetCommand::Disk(_) => "det disk",
                DetCommand::FlatDisk(_) => "det flat-disk",
                DetCommand::Hyperbolic(_) => "det hyperbolic",
            },
            Command::Area(_) => "area flat-sphere",
            Command::Scan(ScanCommand::Cbeta(_)) => "scan cbeta",
            Command::Scan(ScanCommand::FixedArea(_)) => "scan fixed-area",
            Command::FindMax(_) => "find-max",
            Command::TaylorCheck(_) => "taylor-check",
            Command::Distance(_) => "distance spindle",
        }
    }

    fn default_tol(&self) -> f64 {
        match self {
            Command::Det(DetCommand::FlatSphere(_)) | Command::Area(_) | Command::FindMax(_) => QUADRATURE_TOL,
            _ => CLOSED_FORM_TOL,
        }
    }
}

fn logdet_json(d: &LogDet, breakdown: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("quantity".into(), json!("log_det"));
    m.insert("value".into(), json!(d.total));
    if breakdown {
        m.insert("parts".into(), json!(d.parts));
    }
    m
}

fn scan_csv(header: String, param: &str, rows: &[ScanRow]) -> conedet::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| conedet::Error::Config {
        parameter: "out",
        reason: e.to_string(),
    };
    w.write_record([param, "value", "status"]).map_err(io)?;
    for r in rows {
        let (value, status) = match (&r.value, &r.error) {
            (Some(v), _) => (format!("{v:?}"), "ok".to_string()),
            (None, e) => (String::new(), format!("skipped: {}", e.as_deref().unwrap_or("unknown"))),
        };
        w.write_record([format!("{:?}", r.param), value, status]).map_err(io)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| io(e.into_error().into()))?).expect("csv is utf-8");
    Ok(format!("# generated-by conedet {} {header}\n{body}", env!("CARGO_PKG_VERSION")))
}

fn csv_output(text: String, out: Option<PathBuf>, rows: &[ScanRow]) -> Output {
    Output::Csv {
        text,
        out,
        rows: rows.len(),
        skipped: rows.iter().filter(|r| r.value.is_none()).count(),
    }
}

fn run(cli: &Cli, tol: f64) -> conedet::Result<Output> {
    let bd = cli.breakdown;
    let obj = |m: Map<String, Value>| Ok(Output::Json(Value::Object(m)));
    match &cli.command {
        Command::BarnesZprime0(args) => {
            let arg = match (args.a, args.p, args.q) {
                (Some(a), _, _) => BarnesArg::Real(a),
                (None, Some(p), Some(q)) => BarnesArg::Rational(RationalOrder::new(p, q)?),
                _ => unreachable!("clap enforces --a or --p/--q"),
            };
            let route = args.route.map(ZPrimeRoute::from).unwrap_or_else(|| default_route(&arg));
            let value = zprime0_by_route(arg, route, tol)?;
            let mut m = Map::new();
            m.insert("a".into(), json!(arg.value()));
            m.insert("value".into(), json!(value));
            m.insert("route".into(), json!(route));
            if args.cross_check {
                let BarnesArg::Rational(r) = arg else { unreachable!("clap requires --p") };
                let c = zprime0_cross_check(r, tol)?;
                m.insert("cross_check".into(), json!(c));
            }
            obj(m)
        }
        Command::Cbeta(args) => {
            let b = c_beta_breakdown(args.beta.cone_order()?, tol)?;
            let mut m = Map::new();
            m.insert("beta".into(), json!(args.beta.value()));
            m.insert("value".into(), json!(b.total));
            m.insert("route".into(), json!(b.route));
            if bd {
                m.insert("parts".into(), json!(b));
            }
            obj(m)
        }
        Command::Zeta0(args) => {
            let orders = args.orders.iter().map(|o| o.cone_order()).collect::<conedet::Result<Vec<_>>>()?;
            let topo = SurfaceTopology::new(args.euler, orders, args.boundary);
            let mut m = Map::new();
            m.insert("value".into(), json!(zeta0_surface(&topo)));
            m.insert("heat_trace_a0".into(), json!(heat_trace_a0(&topo)));
            m.insert("euler_with_divisor".into(), json!(topo.euler_with_divisor()));
            m.insert("dim_kernel".into(), json!(topo.dim_kernel()));
            obj(m)
        }
        Command::Det(DetCommand::Spindle(a)) => {
            let cfg = SpindleConfig::new(a.beta.cone_order()?, a.mu, a.curvature)?;
            obj(logdet_json(&logdet_spindle(&cfg, tol)?, bd))
        }
        Command::Det(DetCommand::SpindleArea4pi(a)) => {
            let d = logdet_spindle_area4pi(a.beta.cone_order()?, a.mu, tol)?;
            let mut m = logdet_json(&d, bd);
            m.insert("det".into(), json!(d.det()));
            obj(m)
        }
        Command::Det(DetCommand::FlatSphere(a)) => {
            let cfg = input::load_flat_sphere(&a.input)?;
            let area = flat_sphere_area(&cfg, tol)?.require("flat sphere area")?;
            let d = match a.form {
                FlatForm::Cbeta => logdet_flat_sphere_with_area(&cfg, area.value, tol)?,
                FlatForm::As => logdet_flat_sphere_as_with_area(&cfg, area.value, ZPrimeDefinition::Barnes, tol)?,
                FlatForm::AsIntegral => {
                    logdet_flat_sphere_as_with_area(&cfg, area.value, ZPrimeDefinition::Integral, tol)?
                }
            };
            let mut m = logdet_json(&d, bd);
            m.insert("area".into(), json!(area.value));
            m.insert("area_error_estimate".into(), json!(area.error_estimate));
            obj(m)
        }
        Command::Det(DetCommand::Disk(a)) => {
            let cfg = DiskConfig::new(a.beta.cone_order()?, a.k)?;
            obj(logdet_json(&logdet_disk(&cfg, tol)?, bd))
        }
        Command::Det(DetCommand::FlatDisk(a)) => {
            let v = logdet_flat_disk(a.radius)?;
            let mut m = Map::new();
            m.insert("quantity".into(), json!("log_det"));
            m.insert("value".into(), json!(v));
            if bd {
                m.insert("parts".into(), json!([{ "label": "closed_form", "value": v }]));
            }
            obj(m)
        }
        Command::Det(DetCommand::Hyperbolic(a)) => {
            let s = input::load_hyperbolic(&a.input)?;
            obj(logdet_json(&logdet_hyperbolic_sphere(&s, tol)?, bd))
        }
        Command::Area(AreaCommand::FlatSphere(a)) => {
            let cfg = input::load_flat_sphere(&a.input)?;
            let r = flat_sphere_area(&cfg, tol)?.require("flat sphere area")?;
            let mut m = Map::new();
            m.insert("value".into(), json!(r.value));
            m.insert("error_estimate".into(), json!(r.error_estimate));
            m.insert("evaluations".into(), json!(r.evaluations));
            if let Some(n) = a.mc_samples {
                m.insert("monte_carlo".into(), json!(flat_sphere_area_mc(&cfg, n, a.seed)?));
            }
            obj(m)
        }
        Command::Scan(ScanCommand::Cbeta(a)) => {
            let g = &a.grid;
            let grid = ScanGrid::new(ScanParam::Beta, g.start, g.stop, g.steps, 0.0)?;
            let rows = scan_curve(ScanTarget::CBeta, &grid, tol);
            let header = format!("scan cbeta start={:?} stop={:?} steps={} tol={tol:?}", g.start, g.stop, g.steps);
            Ok(csv_output(scan_csv(header, "beta", &rows)?, g.out.clone(), &rows))
        }
        Command::Scan(ScanCommand::FixedArea(a)) => {
            let g = &a.grid;
            let (param, name, other) = match a.param {
                ParamArg::Beta => (ScanParam::Beta, "beta", "mu"),
                ParamArg::Mu => (ScanParam::Mu, "mu", "beta"),
            };
            let grid = ScanGrid::new(param, g.start, g.stop, g.steps, a.fixed)?;
            let rows = scan_curve(ScanTarget::FixedAreaDet, &grid, tol);
            let header = format!(
                "scan fixed-area param={name} start={:?} stop={:?} steps={} {other}={:?} tol={tol:?} value=det",
                g.start, g.stop, g.steps, a.fixed
            );
            Ok(csv_output(scan_csv(header, name, &rows)?, g.out.clone(), &rows))
        }
        Command::FindMax(a) => Ok(Output::Json(json!(find_local_max(a.initial, tol)?))),
        Command::TaylorCheck(a) => Ok(Output::Json(json!(taylor_check_at_zero(a.h)?))),
        Command::Distance(DistanceCommand::Spindle(a)) => {
            let cfg = SpindleConfig::new(a.beta.cone_order()?, a.mu, a.curvature)?;
            let mut m = Map::new();
            m.insert("value".into(), json!(spindle_distance(&cfg)));
            obj(m)
        }
    }
}

fn emit_error(kind: &str, parameter: Option<&str>, message: &str, code: u8) -> ExitCode {
    let v = json!({ "error": { "kind": kind, "parameter": parameter, "message": message } });
    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CONEDET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CONEDET_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let parameter = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => Some(s.clone()),
                Some(ContextValue::Strings(v)) => Some(v.join(" ")),
                _ => None,
            };
            return emit_error("usage", parameter.as_deref(), &e.kind().to_string(), 2);
        }
    };
    if let Err(msg) = configure_threads() {
        return emit_error("usage", Some("CONEDET_THREADS"), &msg, 2);
    }
    let tol = cli.tol.unwrap_or_else(|| cli.command.default_tol());
    let started = Instant::now();
    let result = run(&cli, tol);
    let elapsed = started.elapsed().as_secs_f64();
    match result {
        Ok(Output::Json(Value::Object(mut m))) => {
            let mut meta = Map::new();
            meta.insert("command".into(), json!(cli.command.name()));
            meta.insert("tol".into(), json!(tol));
            meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            if cli.timing {
                meta.insert("wall_time_s".into(), json!(elapsed));
            }
            m.insert("meta".into(), Value::Object(meta));
            println!("{}", serde_json::to_string_pretty(&Value::Object(m)).expect("json"));
            ExitCode::SUCCESS
        }
        Ok(Output::Json(v)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Ok(Output::Csv { text, out, rows, skipped }) => match out {
            None => {
                print!("{text}");
                let _ = std::io::stdout().flush();
                ExitCode::SUCCESS
            }
            Some(path) => {
                if let Err(e) = std::fs::write(&path, text) {
                    return emit_error("config", Some("out"), &format!("cannot write {}: {e}", path.display()), 3);
                }
                let mut m = json!({ "written": path.display().to_string(), "rows": rows, "skipped": skipped });
                if cli.timing {
                    m["wall_time_s"] = json!(elapsed);
                }
                println!("{}", serde_json::to_string_pretty(&m).expect("json"));
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            let code = if e.kind() == "convergence" { 4 } else { 3 };
            emit_error(e.kind(), e.parameter(), &e.to_string(), code)
        }
    }
}
