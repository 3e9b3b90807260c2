//! Batch front end: a JSON job file in, CSV tables and JSON reports out.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 unsolvable (the report
//! is still written), 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};

use crate::basis::{
    default_truncation, local_existence_check, membership_check, regularity_diagnostic,
    MembershipReport, RegularityReport,
};
use crate::error::Error;
use crate::forward::{eigensystem, BoundaryParam};
use crate::glm::{half_grid, mixed_data, reconstruct, Diagnostics, KernelMethod, ReconstructConfig};
use crate::grid::{GridSpec, SampledFunction};
use crate::model::{Primitive, SpectralSequence};
use crate::oracle;

pub const THREADS_ENV: &str = "HALFINV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "halfinv", about = "Half-inverse Sturm-Liouville solver")]
pub struct Args {
    /// JSON job description
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides the job file)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Odd node count on [0, 1] (overrides the job file)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Expansion order (overrides the job file)
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Forward,
    Phi0,
    Check,
    Reconstruct,
    Roundtrip,
    Example,
}

/// How the job file describes `sigma_0` (or `sigma` for `forward`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaSpec {
    Zero,
    ExampleGamma { gamma: f64 },
    /// Two-column CSV of `(x, sigma)`.
    Sampled { path: PathBuf },
    /// Two-column CSV of `(x, q)`; `sigma = \int_0^x q`.
    AntiderivativeOf { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default = "default_sigma")]
    pub sigma0: SigmaSpec,
    #[serde(default = "SpectralSequence::harmonic")]
    pub spectrum: SpectralSequence,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryParam,
    /// Eigenvalue count for `forward` and `roundtrip`.
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub kernel: KernelMethod,
    /// Parameter of the `example` fixtures.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_sigma() -> SigmaSpec {
    SigmaSpec::Zero
}
fn default_boundary() -> BoundaryParam {
    BoundaryParam::Robin(0.0)
}
fn default_count() -> usize {
    11
}
fn default_grid() -> usize {
    257
}
fn default_output() -> PathBuf {
    PathBuf::from("halfinv-out")
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Solver(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Solver(Error::Unsolvable { .. }) => 2,
            CliError::Solver(e) if e.is_numerical() => 3,
            CliError::Solver(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl JobConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut job: JobConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // sample paths are relative to the job file
        if let Some(dir) = path.parent() {
            job.sigma0 = match job.sigma0 {
                SigmaSpec::Sampled { path } => SigmaSpec::Sampled { path: dir.join(path) },
                SigmaSpec::AntiderivativeOf { path } => {
                    SigmaSpec::AntiderivativeOf { path: dir.join(path) }
                }
                other => other,
            };
        }
        Ok(job)
    }

    pub fn apply(&mut self, args: &Args) {
        if let Some(o) = &args.output {
            self.output = o.clone();
        }
        if let Some(g) = args.grid {
            self.grid = g;
        }
        if let Some(t) = args.truncation {
            self.truncation = Some(t);
        }
    }

    fn validate(&self) -> CliResult<()> {
        if self.grid < 5 || self.grid.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "grid must be odd and at least 5, got {}",
                self.grid
            )));
        }
        if self.truncation == Some(0) {
            return Err(CliError::Config("truncation must be positive".into()));
        }
        if self.count == 0 {
            return Err(CliError::Config("count must be positive".into()));
        }
        Ok(())
    }
}

/// Read a two-column CSV `(x, value)` with an optional header row.
pub fn read_samples(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(io)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!("row {} does not have two columns", row + 1)));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) => {
                if xs.last().is_some_and(|&p| x <= p) {
                    return Err(bad(format!("x not strictly increasing at row {}", row + 1)));
                }
                xs.push(x);
                ys.push(y);
            }
            _ if row == 0 => continue,
            _ => return Err(bad(format!("unparsable number at row {}", row + 1))),
        }
    }
    if xs.len() < 2 {
        return Err(bad("need at least two samples".into()));
    }
    Ok((xs, ys))
}

/// Linear interpolation of scattered samples onto `grid` (constant outside).
fn resample(xs: &[f64], ys: &[f64], grid: GridSpec) -> SampledFunction {
    SampledFunction::from_fn(grid, |x| {
        let k = xs.partition_point(|&p| p <= x);
        if k == 0 {
            ys[0]
        } else if k == xs.len() {
            ys[xs.len() - 1]
        } else {
            let w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            (1.0 - w) * ys[k - 1] + w * ys[k]
        }
    })
}

fn build_primitive(spec: &SigmaSpec, grid: GridSpec) -> CliResult<Primitive> {
    Ok(match spec {
        SigmaSpec::Zero => Primitive::Zero,
        SigmaSpec::ExampleGamma { gamma } => Primitive::example_gamma(*gamma)?,
        SigmaSpec::Sampled { path } => {
            let (x, y) = read_samples(path)?;
            Primitive::sampled(resample(&x, &y, grid))
        }
        SigmaSpec::AntiderivativeOf { path } => {
            let (x, y) = read_samples(path)?;
            Primitive::antiderivative_of(resample(&x, &y, grid))?
        }
    })
}

/// Decimal notation with 12 significant digits; integral values print as integers.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".into() } else { v.to_string() };
    }
    if v.fract() == 0.0 && v.abs() < 1e12 {
        return format!("{}", v as i64);
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').trim_matches(['0', '.']).is_empty() {
        "0".into()
    } else {
        s
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    fn io(&self, name: &str) -> impl Fn(std::io::Error) -> CliError {
        let path = self.dir.join(name);
        move |source| CliError::Io {
            path: path.clone(),
            source,
        }
    }

    fn csv(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e.into(),
        })?;
        let wrap = |e: csv::Error| CliError::Io {
            path: path.clone(),
            source: e.into(),
        };
        w.write_record(header).map_err(wrap)?;
        for row in rows {
            w.write_record(row.iter().map(|v| format_number(*v)))
                .map_err(wrap)?;
        }
        w.flush().map_err(self.io(name))
    }

    fn json(&self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("cannot serialise {name}: {e}")))?;
        fs::write(self.dir.join(name), text + "\n").map_err(self.io(name))
    }

    fn function(&self, name: &str, column: &str, f: &SampledFunction) -> CliResult<()> {
        let rows: Vec<Vec<f64>> = f
            .grid()
            .nodes()
            .into_iter()
            .zip(f.values())
            .map(|(x, v)| vec![x, *v])
            .collect();
        self.csv(name, &["x", column], &rows)
    }
}

#[derive(Serialize)]
struct CheckFile<'a> {
    report: &'a MembershipReport,
    truncation: usize,
    local_certificate: Option<bool>,
    regularity: RegularityReport,
}

#[derive(Serialize)]
struct ReconstructionFile<'a> {
    h: f64,
    alpha: &'a [f64],
    diagnostics: &'a Diagnostics,
}

#[derive(Serialize)]
struct ExampleFile {
    gamma: f64,
    solvable: bool,
    alpha0: f64,
    h: Option<f64>,
}

fn reconstruct_config(job: &JobConfig, roundtrip: bool) -> ReconstructConfig {
    ReconstructConfig {
        n_points: job.grid,
        truncation: job.truncation,
        kernel: job.kernel,
        roundtrip_count: if roundtrip { job.count } else { 0 },
        ..Default::default()
    }
}

/// Execute one job, writing its files into `job.output`.
pub fn run(job: &JobConfig) -> CliResult<()> {
    job.validate()?;
    let out = Output::new(&job.output)?;
    match job.command {
        Command::Forward => {
            let grid = GridSpec::unit(job.grid)?;
            let sigma = build_primitive(&job.sigma0, grid)?;
            let sys = eigensystem(&sigma, job.boundary, job.count, &grid)?;
            let rows: Vec<Vec<f64>> = sys
                .lambdas
                .iter()
                .zip(&sys.alphas)
                .enumerate()
                .map(|(n, (l, a))| vec![n as f64, *l, *a])
                .collect();
            out.csv("eigen.csv", &["n", "lambda", "alpha"], &rows)
        }
        Command::Phi0 => {
            let half = half_grid(job.grid)?;
            let sigma0 = build_primitive(&job.sigma0, half)?;
            let (phi, _, _) = mixed_data(&sigma0, job.grid, job.kernel)?;
            out.function("phi0.csv", "phi0", &phi)
        }
        Command::Check => {
            let half = half_grid(job.grid)?;
            let sigma0 = build_primitive(&job.sigma0, half)?;
            let (phi, _, _) = mixed_data(&sigma0, job.grid, job.kernel)?;
            let m = job
                .truncation
                .unwrap_or_else(|| default_truncation(&job.spectrum));
            let report = membership_check(&phi, &job.spectrum, m)?;
            let local_certificate = sigma0
                .derivative(half)
                .filter(|(_, h0)| *h0 == 0.0)
                .map(|(q0, _)| local_existence_check(&q0, &job.spectrum));
            out.json(
                "membership.json",
                &CheckFile {
                    report: &report,
                    truncation: m,
                    local_certificate,
                    regularity: regularity_diagnostic(&report, &job.spectrum),
                },
            )?;
            if report.solvable {
                Ok(())
            } else {
                Err(Error::Unsolvable {
                    report: Box::new(report),
                    positivity_margin: None,
                }
                .into())
            }
        }
        Command::Reconstruct | Command::Roundtrip => {
            let roundtrip = job.command == Command::Roundtrip;
            let half = half_grid(job.grid)?;
            let sigma0 = build_primitive(&job.sigma0, half)?;
            let result = match reconstruct(&sigma0, &job.spectrum, &reconstruct_config(job, roundtrip))
            {
                Ok(r) => r,
                Err(Error::Unsolvable {
                    report,
                    positivity_margin,
                }) => {
                    out.json("membership.json", &report)?;
                    return Err(Error::Unsolvable {
                        report,
                        positivity_margin,
                    }
                    .into());
                }
                Err(e) => return Err(e.into()),
            };
            out.function("sigma.csv", "sigma", &result.sigma)?;
            out.json(
                "reconstruction.json",
                &ReconstructionFile {
                    h: result.h,
                    alpha: result.report.alpha.head(),
                    diagnostics: &result.diagnostics,
                },
            )?;
            if let Some(lambdas) = &result.roundtrip_lambdas {
                let rows: Vec<Vec<f64>> = lambdas
                    .iter()
                    .enumerate()
                    .map(|(n, l)| {
                        let target = job.spectrum.lambda_at(n);
                        vec![n as f64, target, *l, (l - target).abs()]
                    })
                    .collect();
                out.csv("roundtrip.csv", &["n", "target", "computed", "error"], &rows)?;
            }
            Ok(())
        }
        Command::Example => {
            let gamma = job
                .gamma
                .ok_or_else(|| CliError::Config("example needs \"gamma\"".into()))?;
            let family = oracle::GammaFamily::new(gamma)?;
            let grid = GridSpec::unit(job.grid)?;
            let rows: Vec<Vec<f64>> = grid
                .nodes()
                .into_iter()
                .filter(|x| gamma * x < 1.0)
                .map(|x| {
                    let mut row = vec![
                        x,
                        oracle::sigma_gamma(gamma, x).unwrap_or(f64::NAN),
                        oracle::kernel_k_gamma(gamma, x, 0.0),
                        oracle::kernel_l_gamma(gamma, x, x),
                    ];
                    row.extend((0..3).map(|n| oracle::eigenfunction_gamma(gamma, n, x).unwrap_or(f64::NAN)));
                    row
                })
                .collect();
            out.csv(
                "example.csv",
                &["x", "sigma", "k_diag", "l_diag", "w0", "w1", "w2"],
                &rows,
            )?;
            out.json(
                "example.json",
                &ExampleFile {
                    gamma,
                    solvable: family.solvable(),
                    alpha0: family.alpha0(),
                    h: oracle::h_gamma(gamma).ok(),
                },
            )
        }
    }
}

/// Size the worker pool from `HALFINV_THREADS` (unset or 0: automatic).
pub fn init_threads() -> CliResult<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a non-negative integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Parse-free entry point used by the binary; returns the process exit code.
pub fn main_with(args: &Args) -> i32 {
    let result = init_threads()
        .and_then(|_| JobConfig::load(&args.config))
        .and_then(|mut job| {
            job.apply(args);
            run(&job)
        });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("halfinv: {e}");
            e.exit_code()
        }
    }
}
