//! Command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] from an optional JSON file and
//! the flags (flags win), echoes the canonical config in its JSON output and
//! maps failures onto fixed exit codes:
//! 0 success, 1 failed invariant or I/O, 2 parse, 3 validation,
//! 4 mathematical precondition, 5 non-convergence.

mod config;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::audit::{self, AuditError};
use crate::green::{
    self, bm_potential, g_regular_fourier, g_regular_series, BmQuadrature, FourierOptions, GreenError, SeriesOptions,
    TestFunction, ZeroModePolicy,
};
use crate::kernels::{JumpKernel, KernelError};
use crate::montecarlo::{self, McError};
use crate::spectral::{GridSpec, SpectralError};

pub use config::{GridConfig, McSection, OutputConfig, RunConfig, Tolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;
pub const EXIT_NOT_CONVERGED: u8 = 5;

/// A failure with its exit code and a machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Self { code, kind, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, "parse", message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(EXIT_VALIDATION, "validation", message)
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_FAILED, "io", format!("{}: {e}", path.display()))
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        if e.is_parse_error() {
            Self::parse(e.to_string())
        } else if matches!(e, KernelError::InfiniteMoment) {
            Self::new(EXIT_PRECONDITION, "precondition", e.to_string())
        } else {
            Self::validation(e.to_string())
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<GreenError> for CliError {
    fn from(e: GreenError) -> Self {
        match e {
            GreenError::Kernel(k) => k.into(),
            GreenError::Spectral(s) => s.into(),
            GreenError::DimensionTooSmall { .. }
            | GreenError::HeavyTailUnsupported
            | GreenError::SingularAtCoincidence => Self::new(EXIT_PRECONDITION, "precondition", e.to_string()),
            GreenError::NotConverged { .. } => Self::new(EXIT_NOT_CONVERGED, "not_converged", e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Kernel(k) => k.into(),
            McError::RecurrentRegime { .. } => Self::new(EXIT_PRECONDITION, "precondition", e.to_string()),
            McError::ThreadPool(_) => Self::new(EXIT_FAILED, "runtime", e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<AuditError> for CliError {
    fn from(e: AuditError) -> Self {
        match e {
            AuditError::Green(g) => g.into(),
            AuditError::Kernel(k) => k.into(),
            AuditError::Spectral(s) => s.into(),
            AuditError::DivergesAtOne(_) => Self::new(EXIT_PRECONDITION, "precondition", e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gmeasure", version, about = "Green measures of jump processes and Brownian motion")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel diagnostics.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Green measure solvers.
    #[command(subcommand)]
    Green(GreenCommand),
    /// Monte Carlo potential of the compound Poisson process.
    Mc(McArgs),
    /// Monte Carlo potential of Brownian motion.
    #[command(name = "mc-bm")]
    McBm(McBmArgs),
    /// Decay-bound audits.
    Audit(AuditArgs),
    /// Cross-method invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum KernelCommand {
    /// Mass, second moment, sup density and Fourier samples.
    Info(KernelInfoArgs),
}

#[derive(Debug, Subcommand)]
enum GreenCommand {
    /// Regular part of the Green measure on a grid (CSV + JSON sidecar).
    Compute(GreenComputeArgs),
    /// Potential or resolvent of a test function at a point.
    Potential(GreenPotentialArgs),
}

#[derive(Debug, Args, Default)]
struct KernelArgs {
    /// Kernel spec, e.g. `gauss:b=1`, `exp:delta=1,dim=3`, `heavy:gamma=1`.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct GridArgs {
    /// Grid points per axis (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Box half-width.
    #[arg(long = "half-width", visible_alias = "L")]
    half_width: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct TestFunctionArgs {
    /// Gaussian bump center, comma separated (default: origin).
    #[arg(long = "f-center", value_delimiter = ',', allow_hyphen_values = true)]
    f_center: Option<Vec<f64>>,
    /// Gaussian bump width (default 1).
    #[arg(long = "f-width")]
    f_width: Option<f64>,
    /// Gaussian bump height (default 1).
    #[arg(long = "f-height")]
    f_height: Option<f64>,
}

#[derive(Debug, Args)]
struct KernelInfoArgs {
    #[command(flatten)]
    kernel: KernelArgs,
}

#[derive(Debug, Args)]
struct GreenComputeArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    lambda: Option<f64>,
    /// `fourier` or `series`.
    #[arg(long)]
    method: Option<String>,
    /// λ = 0 only: `excluded` or `lambda-floor`.
    #[arg(long = "zero-mode")]
    zero_mode: Option<String>,
    /// Output prefix: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "series-tol")]
    series_tol: Option<f64>,
    #[arg(long = "max-order")]
    max_order: Option<usize>,
    /// Accept heavy-tailed kernels (unverified, periodized).
    #[arg(long = "allow-heavy")]
    allow_heavy: bool,
}

#[derive(Debug, Args)]
struct GreenPotentialArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "zero-mode")]
    zero_mode: Option<String>,
    /// `jump` (default) or `brownian`.
    #[arg(long)]
    process: Option<String>,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[command(flatten)]
    f: TestFunctionArgs,
}

#[derive(Debug, Args, Default)]
struct McCommon {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (does not change results).
    #[arg(long)]
    threads: Option<usize>,
    /// Starting point, comma separated (default: origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Also write the estimate JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-path debug CSV.
    #[arg(long = "paths-csv")]
    paths_csv: Option<PathBuf>,
    #[command(flatten)]
    f: TestFunctionArgs,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    mc: McCommon,
}

#[derive(Debug, Args)]
struct McBmArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[command(flatten)]
    mc: McCommon,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// `gauss`, `exp`, `an` or `newtonian`.
    #[arg(long)]
    prop: Option<String>,
    /// Gaussian parameter for `--prop gauss`.
    #[arg(long)]
    b: Option<f64>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// `lo:hi:count` or a comma list.
    #[arg(long)]
    radii: Option<String>,
    /// Convolution powers for `--prop an`, comma separated.
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `core` or `full` (adds a Monte Carlo check).
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
}

/// Runs the CLI on `args` (including the program name), writing results
/// to `out` and failure JSON to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_PARSE;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let body = json!({ "error": e.kind, "message": e.message, "exit_code": e.code });
            let _ = writeln!(err, "{body}");
            e.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Kernel(KernelCommand::Info(a)) => kernel_info(file, a, out),
        Command::Green(GreenCommand::Compute(a)) => green_compute(file, a, out),
        Command::Green(GreenCommand::Potential(a)) => green_potential(file, a, out),
        Command::Mc(a) => mc(file, a, out),
        Command::McBm(a) => mc_bm(file, a, out),
        Command::Audit(a) => audit_cmd(file, a, out),
        Command::Verify(a) => verify_cmd(file, a, out),
    }
}

#[derive(Serialize)]
struct Echoed<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(out: &mut dyn Write, config: &RunConfig, body: T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&Echoed { config, body })
        .map_err(|e| CliError::new(EXIT_FAILED, "io", e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::new(EXIT_FAILED, "io", e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn kernel_flags(cfg: &mut RunConfig, k: KernelArgs) {
    if k.kernel.is_some() {
        cfg.kernel = k.kernel;
    }
    if k.dim.is_some() {
        cfg.dim = k.dim;
    }
}

fn grid_flags(cfg: &mut RunConfig, g: GridArgs) {
    if g.n.is_some() || g.half_width.is_some() {
        let grid = cfg.grid.get_or_insert_with(GridConfig::default);
        grid.n = g.n.or(grid.n);
        grid.half_width = g.half_width.or(grid.half_width);
    }
}

fn f_flags(cfg: &mut RunConfig, f: TestFunctionArgs) {
    if f.f_center.is_some() || f.f_width.is_some() || f.f_height.is_some() {
        let (c0, w0, h0) = match &cfg.f {
            Some(TestFunction::GaussianBump { center, width, height }) => (Some(center.clone()), *width, *height),
            _ => (None, 1.0, 1.0),
        };
        cfg.f = Some(TestFunction::GaussianBump {
            center: f.f_center.or(c0).unwrap_or_default(),
            width: f.f_width.unwrap_or(w0),
            height: f.f_height.unwrap_or(h0),
        });
    }
}

fn mc_flags(cfg: &mut RunConfig, m: McCommon) {
    if m.lambda.is_some() {
        cfg.lambda = m.lambda;
    }
    let sec = cfg.mc.get_or_insert_with(McSection::default);
    sec.paths = m.paths.or(sec.paths);
    sec.horizon = m.horizon.or(sec.horizon);
    sec.seed = m.seed.or(sec.seed);
    sec.threads = m.threads.or(sec.threads);
    if m.x0.is_some() {
        cfg.x = m.x0;
    }
    if m.out.is_some() || m.paths_csv.is_some() {
        let o = cfg.output.get_or_insert_with(OutputConfig::default);
        o.json = m.out.or(o.json.take());
        o.paths_csv = m.paths_csv.or(o.paths_csv.take());
    }
    f_flags(cfg, m.f);
}

fn kernel_info(mut cfg: RunConfig, a: KernelInfoArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    kernel_flags(&mut cfg, a.kernel);
    let kernel = cfg.resolve_kernel()?;
    cfg.subcommand = Some("kernel info".into());
    let m = kernel.moments();
    let samples: Vec<_> = [0.0, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&k| {
            let mut kv = vec![0.0; kernel.dim()];
            kv[0] = k;
            json!({ "k": k, "value": kernel.fourier(&kv) })
        })
        .collect();
    let sigma2 = match m.sigma2() {
        Ok(v) => json!(v),
        Err(_) => json!("infinite"),
    };
    emit(
        out,
        &cfg,
        json!({
            "kernel": kernel.spec().to_string(),
            "tail_class": kernel.tail_class(),
            "normalization": kernel.normalization(),
            "mass": m.mass,
            "sigma2": sigma2,
            "sup_density": m.sup_density,
            "fourier_samples": samples,
        }),
    )?;
    Ok(EXIT_OK)
}

fn parse_zero_mode(raw: Option<&str>) -> Result<ZeroModePolicy, CliError> {
    match raw.unwrap_or("excluded") {
        "excluded" => Ok(ZeroModePolicy::Excluded),
        "lambda-floor" | "lambda_floor" => Ok(ZeroModePolicy::LambdaFloor),
        other => Err(CliError::parse(format!("zero mode `{other}` is not `excluded` or `lambda-floor`"))),
    }
}

fn green_compute(mut cfg: RunConfig, a: GreenComputeArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    kernel_flags(&mut cfg, a.kernel);
    grid_flags(&mut cfg, a.grid);
    cfg.lambda = a.lambda.or(cfg.lambda);
    cfg.method = a.method.or(cfg.method.take());
    cfg.zero_mode = a.zero_mode.or(cfg.zero_mode.take());
    if a.series_tol.is_some() || a.max_order.is_some() {
        let t = cfg.tolerances.get_or_insert_with(Tolerances::default);
        t.series_tol = a.series_tol.or(t.series_tol);
        t.max_order = a.max_order.or(t.max_order);
    }
    if let Some(prefix) = a.out {
        let o = cfg.output.get_or_insert_with(OutputConfig::default);
        o.csv = Some(prefix.with_extension("csv"));
        o.json = Some(prefix.with_extension("json"));
    }
    if a.allow_heavy {
        cfg.allow_heavy = Some(true);
    }
    cfg.subcommand = Some("green compute".into());
    let kernel = cfg.resolve_kernel()?;
    let grid = cfg.resolve_grid(kernel.dim())?;
    let lambda = cfg.resolve_lambda()?;
    let allow_heavy = cfg.allow_heavy.unwrap_or(false);
    let method = cfg.method.clone().unwrap_or_else(|| "fourier".into());
    let est = match method.as_str() {
        "fourier" => {
            let zero_mode = parse_zero_mode(cfg.zero_mode.as_deref())?;
            let opts = FourierOptions { zero_mode, allow_heavy, ..Default::default() };
            g_regular_fourier(&kernel, &grid, lambda, &opts)?
        }
        "series" => {
            let t = cfg.tolerances.clone().unwrap_or_default();
            let defaults = SeriesOptions::default();
            let opts = SeriesOptions {
                max_order: t.max_order.unwrap_or(defaults.max_order),
                tol: t.series_tol.unwrap_or(defaults.tol),
                allow_heavy,
            };
            g_regular_series(&kernel, &grid, lambda, &opts)?
        }
        other => return Err(CliError::parse(format!("method `{other}` is not `fourier` or `series`"))),
    };
    cfg.method = Some(method);
    let sidecar = est.sidecar();
    let written = write_green_outputs(&cfg, &est);
    if let Err(e) = written {
        // remove partial artifacts
        if let Some(o) = &cfg.output {
            for p in [&o.csv, &o.json].into_iter().flatten() {
                let _ = fs::remove_file(p);
            }
        }
        return Err(e);
    }
    let origin = vec![0.0; grid.dim()];
    emit(
        out,
        &cfg,
        json!({
            "sidecar": sidecar,
            "value_at_origin": est.value_at(&origin),
            "invariant_violations": est.invariant_violations(),
        }),
    )?;
    Ok(EXIT_OK)
}

fn write_green_outputs(cfg: &RunConfig, est: &green::GreenEstimate) -> Result<(), CliError> {
    let Some(o) = &cfg.output else { return Ok(()) };
    if let Some(p) = &o.csv {
        est.write_csv(p).map_err(|e| CliError::io(p, e))?;
    }
    if let Some(p) = &o.json {
        let body = serde_json::to_string_pretty(&Echoed { config: cfg, body: est.sidecar() })
            .map_err(|e| CliError::io(p, e))?;
        write_file(p, &(body + "\n"))?;
    }
    Ok(())
}

fn green_potential(mut cfg: RunConfig, a: GreenPotentialArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    kernel_flags(&mut cfg, a.kernel);
    grid_flags(&mut cfg, a.grid);
    cfg.lambda = a.lambda.or(cfg.lambda);
    cfg.zero_mode = a.zero_mode.or(cfg.zero_mode.take());
    cfg.process = a.process.or(cfg.process.take());
    if a.x.is_some() {
        cfg.x = a.x;
    }
    f_flags(&mut cfg, a.f);
    cfg.subcommand = Some("green potential".into());
    let process = cfg.process.clone().unwrap_or_else(|| "jump".into());
    cfg.process = Some(process.clone());
    match process.as_str() {
        "brownian" => {
            let d = cfg.dim.ok_or_else(|| CliError::validation("`dim` is required"))?;
            let f = cfg.resolve_f(d)?;
            let x = cfg.resolve_x(d)?;
            cfg.kernel = None;
            let v = bm_potential(&f, &x, &BmQuadrature::default())?;
            emit(out, &cfg, json!({ "process": "brownian", "value": v.value, "cl_norm": v.cl_norm, "cl_constant": v.cl_constant }))?;
        }
        "jump" => {
            let kernel = cfg.resolve_kernel()?;
            let d = kernel.dim();
            let grid = cfg.resolve_grid(d)?;
            let lambda = cfg.resolve_lambda()?;
            let f = cfg.resolve_f(d)?;
            let x = cfg.resolve_x(d)?;
            let opts = FourierOptions { zero_mode: parse_zero_mode(cfg.zero_mode.as_deref())?, ..Default::default() };
            let est = g_regular_fourier(&kernel, &grid, lambda, &opts)?;
            let v = green::potential(&est, &f, &x)?;
            emit(
                out,
                &cfg,
                json!({
                    "process": "jump",
                    "value": v.value,
                    "zero_mode_uncertain": v.zero_mode_uncertain,
                    "atom_weight": est.atom_weight,
                    "truncation_error_bound": est.truncation_error_bound,
                }),
            )?;
        }
        other => return Err(CliError::parse(format!("process `{other}` is not `jump` or `brownian`"))),
    }
    Ok(EXIT_OK)
}

fn finish_mc(cfg: &RunConfig, est: &montecarlo::PotentialEstimate, values: Option<&[f64]>, out: &mut dyn Write) -> Result<u8, CliError> {
    if let Some(o) = &cfg.output {
        if let (Some(p), Some(v)) = (&o.paths_csv, values) {
            let file = fs::File::create(p).map_err(|e| CliError::io(p, e))?;
            montecarlo::write_path_csv(std::io::BufWriter::new(file), v).map_err(|e| CliError::io(p, e))?;
        }
        if let Some(p) = &o.json {
            let body = serde_json::to_string_pretty(&Echoed { config: cfg, body: est }).map_err(|e| CliError::io(p, e))?;
            write_file(p, &(body + "\n"))?;
        }
    }
    emit(out, cfg, est)?;
    Ok(EXIT_OK)
}

fn mc(mut cfg: RunConfig, a: McArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    kernel_flags(&mut cfg, a.kernel);
    mc_flags(&mut cfg, a.mc);
    cfg.subcommand = Some("mc".into());
    let kernel = cfg.resolve_kernel()?;
    let d = kernel.dim();
    let f = cfg.resolve_f(d)?;
    let x0 = cfg.resolve_x(d)?;
    let mcfg = cfg.resolve_mc(false)?;
    let want_paths = cfg.output.as_ref().is_some_and(|o| o.paths_csv.is_some());
    if want_paths {
        let values: Vec<f64> = montecarlo::cpp_path_values(&kernel, &f, &x0, &mcfg)?.iter().map(|p| p.value).collect();
        let est = montecarlo::estimate_potential_cpp(&kernel, &f, &x0, &mcfg)?;
        finish_mc(&cfg, &est, Some(&values), out)
    } else {
        let est = montecarlo::estimate_potential_cpp(&kernel, &f, &x0, &mcfg)?;
        finish_mc(&cfg, &est, None, out)
    }
}

fn mc_bm(mut cfg: RunConfig, a: McBmArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if a.dim.is_some() {
        cfg.dim = a.dim;
    }
    mc_flags(&mut cfg, a.mc);
    if a.dt.is_some() {
        cfg.mc.get_or_insert_with(McSection::default).dt = a.dt;
    }
    cfg.subcommand = Some("mc-bm".into());
    cfg.kernel = None;
    let d = cfg.dim.ok_or_else(|| CliError::validation("`dim` is required"))?;
    let f = cfg.resolve_f(d)?;
    let x0 = cfg.resolve_x(d)?;
    let mcfg = cfg.resolve_mc(true)?;
    let want_paths = cfg.output.as_ref().is_some_and(|o| o.paths_csv.is_some());
    let values = if want_paths { Some(montecarlo::bm_path_values(&f, &x0, &mcfg)?) } else { None };
    let est = montecarlo::estimate_potential_bm(&f, &x0, &mcfg)?;
    finish_mc(&cfg, &est, values.as_deref(), out)
}

fn audit_cmd(mut cfg: RunConfig, a: AuditArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    kernel_flags(&mut cfg, a.kernel);
    grid_flags(&mut cfg, a.grid);
    cfg.prop = a.prop.or(cfg.prop.take());
    cfg.b = a.b.or(cfg.b);
    if let Some(r) = a.radii {
        cfg.radii = Some(audit::parse_radii(&r).map_err(|e| CliError::parse(e.to_string()))?);
    }
    if a.n_list.is_some() {
        cfg.n_list = a.n_list;
    }
    if let Some(t) = a.tol {
        cfg.tolerances.get_or_insert_with(Tolerances::default).closed_tol = Some(t);
    }
    cfg.subcommand = Some("audit".into());
    let prop = cfg.prop.clone().ok_or_else(|| CliError::validation("`prop` is required"))?;
    let radii = |cfg: &RunConfig| cfg.radii.clone().ok_or_else(|| CliError::validation("`radii` is required"));
    let report = match prop.as_str() {
        "gauss" => {
            let d = cfg.dim.ok_or_else(|| CliError::validation("`dim` is required"))?;
            let b = cfg.b.unwrap_or(1.0);
            cfg.b = Some(b);
            let tol = cfg.tolerances.as_ref().and_then(|t| t.closed_tol).unwrap_or(1e-12);
            audit::audit_gauss_bound(b, d, &radii(&cfg)?, tol)?
        }
        "exp" => {
            let kernel = cfg.resolve_kernel()?;
            let grid = cfg.resolve_grid(kernel.dim())?;
            audit::audit_exp_bound(&kernel, &grid, &green::DEFAULT_LAMBDA_FLOOR, &radii(&cfg)?)?
        }
        "an" => {
            let kernel = cfg.resolve_kernel()?;
            let grid = cfg.resolve_grid(kernel.dim())?;
            let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
            cfg.n_list = Some(n_list.clone());
            audit::audit_an_bound(&kernel, &n_list, &grid)?
        }
        "newtonian" => {
            let kernel = cfg.resolve_kernel()?;
            let grid = match cfg.grid {
                Some(_) => Some(cfg.resolve_grid(kernel.dim())?),
                None => None,
            };
            audit::audit_newtonian(&kernel, &radii(&cfg)?, grid.as_ref())?
        }
        other => return Err(CliError::parse(format!("prop `{other}` is not gauss, exp, an or newtonian"))),
    };
    emit(out, &cfg, &report)?;
    Ok(EXIT_OK)
}

fn verify_cmd(mut cfg: RunConfig, a: VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if a.dim.is_some() {
        cfg.dim = a.dim;
    }
    cfg.suite = a.suite.or(cfg.suite.take());
    if a.threads.is_some() {
        cfg.mc.get_or_insert_with(McSection::default).threads = a.threads;
    }
    cfg.subcommand = Some("verify".into());
    let d = *cfg.dim.get_or_insert(3);
    let suite = cfg.suite.get_or_insert_with(|| "core".into()).clone();
    let checks = match suite.as_str() {
        "core" => verify::core_suite(d)?,
        "full" => {
            let mut c = verify::core_suite(d)?;
            c.extend(verify::mc_suite(d, cfg.mc.as_ref().and_then(|m| m.threads))?);
            c
        }
        other => return Err(CliError::parse(format!("suite `{other}` is not `core` or `full`"))),
    };
    let all_pass = checks.iter().all(|c| c.pass);
    emit(out, &cfg, json!({ "checks": checks, "all_pass": all_pass }))?;
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILED })
}

/// Entry point of the `gmeasure` binary.
pub fn main_exit_code() -> u8 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub(crate) fn grid_for(d: usize, n: usize, half_width: f64) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(d, n, half_width)?)
}

pub(crate) fn kernel_from(spec: &str, dim: Option<usize>) -> Result<JumpKernel, CliError> {
    let parsed = spec.parse()?;
    Ok(JumpKernel::from_spec(&parsed, dim)?)
}
