//! The `starcc` command line: argument parsing, the JSON run configuration
//! and the subcommands. `main.rs` only calls [`main`].
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 domain error / bad
//! window / bad configuration, 3 certification failure, 4 budget
//! exhaustion, 5 verification rejection.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::certify::{
    certify_all, certify_inequality, verify_certificate, CertifyConfig, CertifyError, VerifyError,
};
use crate::model::{close_center_of_mass, in_domain, FreePoint};
use crate::potential::{
    det2, hessian_measure, pentagon_hessian_closed_form, residual_vector, LambdaIndex, Matrix2,
};
use crate::regions::{export_regions, locate, region_def, region_plan, Check, RegionId};
use crate::solver::{grid_scan_from, halton_starts, Window};

pub const OUT_DIR_ENV: &str = "STARCC_OUT_DIR";

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_CERTIFY: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_REJECTED: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("certificate rejected: {0}")]
    Verify(#[from] VerifyError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) | CliError::Config(_) => EXIT_DOMAIN,
            CliError::Certify(CertifyError::InvalidConfig(_)) => EXIT_DOMAIN,
            CliError::Certify(CertifyError::Io { .. }) => EXIT_FAILURE,
            CliError::Certify(e) if e.is_budget() => EXIT_BUDGET,
            CliError::Certify(_) => EXIT_CERTIFY,
            CliError::Verify(_) => EXIT_REJECTED,
            CliError::Io { .. } | CliError::Csv(_) => EXIT_FAILURE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Settings shared by all subcommands. Read from `--config FILE` (JSON, any
/// subset of fields); command-line flags override file values, and
/// `STARCC_OUT_DIR` overrides the file's `out_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub truncation_r5: f64,
    pub delta: f64,
    pub max_box_width: f64,
    pub max_depth: u32,
    pub max_boxes: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    /// Offset into the Halton sequence used by `scan`.
    pub seed: u64,
    pub tol: f64,
    pub tail_samples: usize,
    pub audit_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = CertifyConfig::default();
        RunConfig {
            truncation_r5: c.truncation_r5,
            delta: c.delta,
            max_box_width: c.max_box_width,
            max_depth: c.max_depth,
            max_boxes: c.max_boxes,
            threads: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            tol: 1e-12,
            tail_samples: c.tail_samples,
            audit_samples: c.audit_samples,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig {
            max_box_width: self.max_box_width,
            max_depth: self.max_depth,
            max_boxes: self.max_boxes,
            delta: self.delta,
            truncation_r5: self.truncation_r5,
            tail_samples: self.tail_samples,
            audit_samples: self.audit_samples,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_depth == 0 {
            return Err(CliError::Config("max_depth must be positive".into()));
        }
        self.certify_config().validate().map_err(|e| match e {
            CertifyError::InvalidConfig(m) => CliError::Config(m),
            other => CliError::Config(other.to_string()),
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "starcc", version, about = "Star central configurations of five equal masses")]
pub struct Cli {
    /// JSON run configuration; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true, env = OUT_DIR_ENV, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; 1 runs serially
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate λ values, y1 and the residual spread at (r3, r5)
    Eval(EvalArgs),
    /// Numeric Hessian of I·U² at (1, 1) against the closed forms
    Hessian(HessianArgs),
    /// Certify one region (J1..J16) or `all` and write certificates
    Certify(CertifyArgs),
    /// Re-verify a certificate file or bundle directory
    Verify(VerifyArgs),
    /// Multi-start Newton scan for central configurations
    Scan(ScanArgs),
    /// Write CSV/JSON data for plotting
    #[command(long_about = PLOTDATA_HELP)]
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    pub r3: f64,
    pub r5: f64,
    /// λ indices to print, e.g. `31,52` (default: all nine)
    #[arg(long, value_delimiter = ',')]
    pub index: Vec<LambdaIndex>,
    /// Print all nine λ values
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct HessianArgs {
    /// Finite-difference step (Richardson-extrapolated)
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    /// Relative-error threshold for PASS
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// `all` or a region J1..J16
    #[arg(default_value = "all")]
    pub target: String,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_box_width: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<u32>,
    #[arg(long)]
    pub max_boxes: Option<u64>,
    /// Truncate unbounded regions at this r5
    #[arg(long = "truncate-r5")]
    pub truncate_r5: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Region or local certificate, manifest.json, or a bundle directory
    pub path: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// r3_lo,r3_hi,r5_lo,r5_hi
    #[arg(long, default_value = "0.2,3,0.2,3", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 10_000)]
    pub starts: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

const PLOTDATA_HELP: &str = "\
Write plotting data into the output directory.

WHAT is one of:
  regions   CSV r3,r5,region: the region (J1..J16, or `none` on a boundary)
            of every grid node inside the domain
  spread    CSV r3,r5,spread,y1: residual spread and y1 at in-domain nodes
  gap-J<n>  CSV r3,r5,part,smaller,larger,gap: λ_larger - λ_smaller for the
            first pair check of the region's plan, at nodes inside J<n>
  geometry  JSON: constraints, plans and bounding boxes of J1..J16

The grid has N x N nodes spanning the window (default [0, 3]², or the
region's truncated bounding box for gap-J<n>). Floats carry 17
significant digits.";

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PlotArgs {
    /// regions | spread | gap-J<n> | geometry
    pub what: String,
    /// Nodes per axis
    #[arg(default_value_t = 200)]
    pub grid: usize,
    /// r3_lo,r3_hi,r5_lo,r5_hi
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// File name inside the output directory [default: <what>.csv]
    #[arg(long)]
    pub output: Option<String>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out_dir {
        config.out_dir = dir.clone();
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    if let Command::Certify(a) = &cli.command {
        config.delta = a.delta.unwrap_or(config.delta);
        config.max_box_width = a.max_box_width.unwrap_or(config.max_box_width);
        config.max_depth = a.max_depth.unwrap_or(config.max_depth);
        config.max_boxes = a.max_boxes.unwrap_or(config.max_boxes);
        config.truncation_r5 = a.truncate_r5.unwrap_or(config.truncation_r5);
    }
    if let Command::Scan(a) = &cli.command {
        config.tol = a.tol.unwrap_or(config.tol);
        config.seed = a.seed.unwrap_or(config.seed);
    }
    config.validate()?;
    Ok(config)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = resolve(&cli)?;
    if let Some(n) = config.threads {
        // Fails only if a global pool already exists, as in repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, cli.json),
        Command::Hessian(a) => cmd_hessian(a, cli.json),
        Command::Certify(a) => cmd_certify(a, &config, cli.json),
        Command::Verify(a) => cmd_verify(&a.path, cli.json),
        Command::Scan(a) => cmd_scan(a, &config, cli.json),
        Command::Plotdata(a) => cmd_plotdata(a, &config),
    }
}

fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub r3: f64,
    pub r5: f64,
    pub radii: [f64; 5],
    pub lambda: BTreeMap<LambdaIndex, f64>,
    pub y1: f64,
    pub spread: f64,
}

pub fn eval_report(p: FreePoint, indices: &[LambdaIndex]) -> Result<EvalReport, CliError> {
    let domain = |e: crate::model::ModelError| CliError::Domain(e.to_string());
    let radii = close_center_of_mass(p).map_err(domain)?;
    let rv = residual_vector(p).map_err(domain)?;
    let lambda = if indices.is_empty() {
        rv.lambda_values.clone()
    } else {
        indices.iter().map(|i| (*i, rv.lambda(*i))).collect()
    };
    Ok(EvalReport { r3: p.r3, r5: p.r5, radii: radii.0, lambda, y1: rv.y1, spread: rv.pairwise_spread })
}

fn cmd_eval(a: &EvalArgs, json: bool) -> Result<(), CliError> {
    let indices: &[LambdaIndex] = if a.all { &[] } else { &a.index };
    let report = eval_report(FreePoint::new(a.r3, a.r5), indices)?;
    if json {
        print_json(&report);
        return Ok(());
    }
    println!("r3 = {}, r5 = {}  (r2 = {}, r4 = {})", a.r3, a.r5, sig15(report.radii[1]), sig15(report.radii[3]));
    for (idx, v) in &report.lambda {
        println!("{idx} = {}", sig15(*v));
    }
    println!("y1 = {}", sig15(report.y1));
    println!("spread = {}", sig15(report.spread));
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct HessianReport {
    pub step: f64,
    pub numeric: Matrix2,
    pub closed_form: Matrix2,
    pub relative_error: Matrix2,
    pub det_numeric: f64,
    pub det_closed_form: f64,
    pub det_relative_error: f64,
    /// Leading principal minors of the numeric Hessian.
    pub minors: [f64; 2],
    pub positive_definite: bool,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn hessian_report(step: f64, tolerance: f64) -> Result<HessianReport, CliError> {
    let h = hessian_measure(FreePoint::PENTAGON, step).map_err(|e| CliError::Domain(e.to_string()))?;
    let (closed, det_closed) = pentagon_hessian_closed_form();
    let rel = |x: f64, y: f64| ((x - y) / y).abs();
    let relative_error = std::array::from_fn(|i| std::array::from_fn(|j| rel(h[i][j], closed[i][j])));
    let det = det2(&h);
    let det_relative_error = rel(det, det_closed);
    let worst = relative_error.iter().flatten().fold(det_relative_error, |m: f64, x| m.max(*x));
    Ok(HessianReport {
        step,
        numeric: h,
        closed_form: closed,
        relative_error,
        det_numeric: det,
        det_closed_form: det_closed,
        det_relative_error,
        minors: [h[0][0], det],
        positive_definite: h[0][0] > 0.0 && det > 0.0,
        tolerance,
        pass: worst <= tolerance,
    })
}

fn cmd_hessian(a: &HessianArgs, json: bool) -> Result<(), CliError> {
    let r = hessian_report(a.step, a.tolerance)?;
    if json {
        print_json(&r);
        return Ok(());
    }
    println!("Hessian of I·U² at (1, 1), step {} with Richardson extrapolation", r.step);
    let names = [["H33", "H35"], ["H53", "H55"]];
    for i in 0..2 {
        for j in i..2 {
            println!(
                "{}  numeric {:>22}  closed form {:>22}  rel. err {:.2e}",
                names[i][j],
                sig15(r.numeric[i][j]),
                sig15(r.closed_form[i][j]),
                r.relative_error[i][j]
            );
        }
    }
    println!(
        "det  numeric {:>22}  closed form {:>22}  rel. err {:.2e}",
        sig15(r.det_numeric),
        sig15(r.det_closed_form),
        r.det_relative_error
    );
    println!(
        "minors: H33 {} 0, det {} 0 ({})",
        if r.minors[0] > 0.0 { ">" } else { "<=" },
        if r.minors[1] > 0.0 { ">" } else { "<=" },
        if r.positive_definite { "positive definite: (1, 1) is a minimum" } else { "not positive definite" }
    );
    println!("{} (tolerance {:.0e})", if r.pass { "PASS" } else { "FAIL" }, r.tolerance);
    Ok(())
}

fn cmd_certify(a: &CertifyArgs, config: &RunConfig, json: bool) -> Result<(), CliError> {
    let cc = config.certify_config();
    let dir = &config.out_dir;
    if a.target.eq_ignore_ascii_case("all") {
        let bundle = certify_all(&cc).inspect_err(report_failure)?;
        let manifest = bundle.write(dir)?;
        if json {
            print_json(&manifest);
            return Ok(());
        }
        println!("{:<5} {:>10} {:>6} {:>14} {:>9}", "part", "leaves", "depth", "min gap", "time [s]");
        for c in &bundle.certificates {
            println!(
                "{:<5} {:>10} {:>6} {:>14.6e} {:>9.2}",
                c.region.to_string(),
                c.leaf_count(),
                c.stats.max_depth,
                c.min_gap.0,
                c.stats.wall_time_s
            );
        }
        let b0 = crate::regions::pentagon_box(cc.delta);
        println!(
            "local  B0 = [{}, {}]²  Krawczyk norm {:.4}  root ({}, {})",
            b0.r3.lo(),
            b0.r3.hi(),
            bundle.local.contraction_norm.0,
            bundle.local.root[0],
            bundle.local.root[1]
        );
        let audit = &bundle.audit;
        println!(
            "partition audit: {} in-domain samples, {} in two regions, uncovered fraction {:.2e}",
            audit.in_domain, audit.multiple, audit.uncovered_fraction
        );
        println!("{}", bundle.verdict());
        println!("wrote {} ({:.1} s)", dir.display(), bundle.wall_time_s);
        return Ok(());
    }
    let id: RegionId = a
        .target
        .parse()
        .ok()
        .filter(|id| *id != RegionId::SHat)
        .ok_or_else(|| CliError::Config(format!("unknown region `{}`; expected J1..J16 or all", a.target)))?;
    cc.validate()?;
    let cert = certify_inequality(id, &region_plan(id), &cc).inspect_err(report_failure)?;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{id}.json"));
    let bytes = serde_json::to_vec(&cert).expect("certificate serializes");
    std::fs::write(&path, bytes).map_err(io_err(&path))?;
    if json {
        print_json(&serde_json::json!({
            "region": id,
            "file": path,
            "min_gap": cert.min_gap_decimal,
            "leaves": cert.leaf_count(),
            "stats": cert.stats,
            "truncation_r5": cert.truncation_r5.map(|t| t.0),
        }));
    } else {
        println!(
            "{id}: certified, {} leaves, max depth {}, min gap {:.6e}, {:.2} s{}",
            cert.leaf_count(),
            cert.stats.max_depth,
            cert.min_gap.0,
            cert.stats.wall_time_s,
            cert.truncation_r5.map(|t| format!(", truncated at r5 <= {}", t.0)).unwrap_or_default()
        );
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn report_failure(e: &CertifyError) {
    let errors: Vec<&CertifyError> = match e {
        CertifyError::Aggregate(v) => v.iter().collect(),
        other => vec![other],
    };
    for e in errors {
        if let CertifyError::BudgetExhausted { undecided, .. } = e {
            for u in undecided.iter().take(5) {
                if let Some(b) = u.bounds.get() {
                    eprintln!(
                        "  undecided ({}) r3 ∈ [{}, {}], r5 ∈ [{}, {}]",
                        u.part,
                        b.r3.lo(),
                        b.r3.hi(),
                        b.r5.lo(),
                        b.r5.hi()
                    );
                }
            }
        }
    }
}

fn cmd_verify(path: &Path, json: bool) -> Result<(), CliError> {
    let verdict = verify_certificate(path)?;
    if json {
        print_json(&verdict);
    } else {
        println!("ACCEPTED: {}", verdict.summary);
    }
    Ok(())
}

pub fn parse_window(s: &str) -> Result<Window, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Domain(format!("bad window `{s}`: {e}")))?;
    match v[..] {
        [a, b, c, d] if Window::new([a, b], [c, d]).is_valid() => Ok(Window::new([a, b], [c, d])),
        _ => Err(CliError::Domain(format!("bad window `{s}`: expected r3_lo,r3_hi,r5_lo,r5_hi with lo < hi"))),
    }
}

fn cmd_scan(a: &ScanArgs, config: &RunConfig, json: bool) -> Result<(), CliError> {
    let window = parse_window(&a.window)?;
    if a.starts > 0 && halton_starts(&window, 1, config.seed).is_empty() {
        return Err(CliError::Domain(format!("window {window:?} does not meet the domain")));
    }
    let report = grid_scan_from(&window, a.starts, config.tol, config.seed);
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("scan.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, &text).map_err(io_err(&path))?;
    if json {
        println!("{text}");
        return Ok(());
    }
    let s = &report.stats;
    println!(
        "{} starts in [{}, {}] x [{}, {}]: {} converged, {} rejected by the full residual, {} diverged, {} left the domain, {} hit the iteration cap",
        report.n_starts,
        window.r3[0],
        window.r3[1],
        window.r5[0],
        window.r5[1],
        s.converged,
        s.rejected,
        s.diverged,
        s.left_domain,
        s.max_iterations
    );
    println!("{} distinct root(s):", report.roots.len());
    for r in &report.roots {
        println!("  ({}, {})  spread {:.2e}  y1 {:.2e}", sig15(r.r3), sig15(r.r5), r.spread, r.y1);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn output_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    let p = Path::new(name);
    if p.components().count() != 1 || !matches!(p.components().next(), Some(std::path::Component::Normal(_))) {
        return Err(CliError::Config(format!("output `{name}` must be a plain file name")));
    }
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    Ok(dir.join(p))
}

fn nodes(w: &Window, n: usize) -> impl Iterator<Item = FreePoint> + '_ {
    let at = move |lo: f64, hi: f64, i: usize| {
        if n == 1 { (lo + hi) / 2.0 } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }
    };
    (0..n).flat_map(move |i| (0..n).map(move |j| FreePoint::new(at(w.r3[0], w.r3[1], i), at(w.r5[0], w.r5[1], j))))
}

fn cmd_plotdata(a: &PlotArgs, config: &RunConfig) -> Result<(), CliError> {
    if a.grid == 0 {
        return Err(CliError::Domain("grid must have at least one node per axis".into()));
    }
    let window = a.window.as_deref().map(parse_window).transpose()?;
    let default_window = Window::square(0.0, 3.0);
    let name = a.output.clone().unwrap_or_else(|| {
        format!("{}.{}", a.what, if a.what == "geometry" { "json" } else { "csv" })
    });
    let path = output_path(&config.out_dir, &name)?;
    let rows = match a.what.as_str() {
        "geometry" => {
            let text = serde_json::to_string_pretty(&export_regions(config.truncation_r5))
                .expect("geometry serializes");
            std::fs::write(&path, text).map_err(io_err(&path))?;
            println!("wrote {}", path.display());
            return Ok(());
        }
        "regions" => {
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["r3", "r5", "region"])?;
            let mut rows = 0;
            for p in nodes(&window.unwrap_or(default_window), a.grid).filter(|p| in_domain(*p)) {
                let id = locate(p).map(|id| id.to_string()).unwrap_or_else(|| "none".into());
                w.write_record([sig17(p.r3), sig17(p.r5), id])?;
                rows += 1;
            }
            w.flush().map_err(io_err(&path))?;
            rows
        }
        "spread" => {
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["r3", "r5", "spread", "y1"])?;
            let mut rows = 0;
            for p in nodes(&window.unwrap_or(default_window), a.grid) {
                if let Ok(rv) = residual_vector(p) {
                    w.write_record([sig17(p.r3), sig17(p.r5), sig17(rv.pairwise_spread), sig17(rv.y1)])?;
                    rows += 1;
                }
            }
            w.flush().map_err(io_err(&path))?;
            rows
        }
        what => {
            let id: RegionId = what
                .strip_prefix("gap-")
                .and_then(|s| s.parse().ok())
                .filter(|id| *id != RegionId::SHat)
                .ok_or_else(|| CliError::Config(format!("unknown plotdata kind `{what}`")))?;
            let (rows, min) = write_gap_csv(id, a.grid, window, config.truncation_r5, &path)?;
            println!("{id}: smallest sampled gap {min:.6e}");
            rows
        }
    };
    println!("wrote {} ({rows} rows)", path.display());
    Ok(())
}

fn write_gap_csv(
    id: RegionId,
    n: usize,
    window: Option<Window>,
    truncation: f64,
    path: &Path,
) -> Result<(usize, f64), CliError> {
    let mut region = region_def(id);
    if region.unbounded {
        region = region.truncated(truncation);
    }
    let window = match window {
        Some(w) => w,
        None => {
            let r = region.bounding_rect().map_err(|e| CliError::Config(e.to_string()))?;
            Window::new([r.r3.lo(), r.r3.hi()], [r.r5.lo(), r.r5.hi()])
        }
    };
    let plan = region_plan(id);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r3", "r5", "part", "smaller", "larger", "gap"])?;
    let (mut rows, mut min) = (0, f64::INFINITY);
    for p in nodes(&window, n).filter(|p| region.contains(*p)) {
        let Some(part) = plan
            .parts
            .iter()
            .find(|part| part.r3_band.is_none_or(|(lo, hi)| (lo..=hi).contains(&p.r3)))
        else {
            continue;
        };
        let Some((s, l)) = part.checks.iter().find_map(|c| match c {
            Check::Pair { smaller, larger } => Some((*smaller, *larger)),
            Check::Nonvanishing { .. } => None,
        }) else {
            continue;
        };
        let Ok(rv) = residual_vector(p) else { continue };
        let gap = rv.lambda(l) - rv.lambda(s);
        min = min.min(gap);
        w.write_record([sig17(p.r3), sig17(p.r5), part.label.clone(), s.to_string(), l.to_string(), sig17(gap)])?;
        rows += 1;
    }
    w.flush().map_err(io_err(path))?;
    Ok((rows, min))
}
