//! Command-line front end: configuration, orchestration and persistence.
//!
//! Every command writes its outputs into the `--out` directory together with
//! `report.json` and `manifest.json`. The manifest lists the resolved
//! configuration, the tool version, the wall time, per-check results and
//! every written file with its SHA-256 digest.
//!
//! Exit codes: 0 success or passing check, 1 usage or configuration error,
//! 2 statistical failure, 3 numerical failure.

use crate::cartan::{self, FrameState};
use crate::checks::{self, CheckParams, CheckReport};
use crate::config::{self, CommandKind, Overrides, SimConfig};
use crate::error::{Error, Result};
use crate::geometry::model_space;
use crate::io;
use crate::kbm::{self, CsvState, EuclideanState, GroupLiftState, HyperbolicPlaneState, PolarState, RadialState, Trajectory};
use crate::roughpath::{self, lift_level2};
use crate::sde::{NoiseStream, StepScheme};
use crate::stats::EnsembleSummary;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Exit code for a passing check or a completed simulation.
pub const EXIT_OK: i32 = 0;
/// Exit code for usage and configuration errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code for a failed statistical check.
pub const EXIT_STATISTICAL: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

/// Simulation and verification laboratory for kinetic Brownian motion.
#[derive(Debug, Parser)]
#[command(name = "kbm-lab", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command. Command-line values override the
/// configuration file, which overrides the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Noise parameter σ ≥ 0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Dimension d.
    #[arg(long = "dim", global = true)]
    pub dim: Option<usize>,
    /// Metric family: euclidean, hyperbolic, polynomial, subexponential or exponential.
    #[arg(long, global = true)]
    pub metric: Option<String>,
    /// Exponent β of the polynomial and subexponential families.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Rate c of the exponential family.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Horizon T.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub horizon: Option<f64>,
    /// Time step.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Number of paths.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Root seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scheme: ito_euler_project or stratonovich_heun_project.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Record every `stride`-th step.
    #[arg(long, global = true)]
    pub stride: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Initial radius.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub r0: Option<f64>,
    /// Initial radial speed.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rdot0: Option<f64>,
}

impl Options {
    fn overrides(&self) -> Overrides {
        Overrides {
            sigma: self.sigma,
            dim: self.dim,
            metric: self.metric.clone(),
            beta: self.beta,
            c: self.c,
            horizon: self.horizon,
            dt: self.dt,
            paths: self.paths,
            seed: self.seed,
            scheme: self.scheme.clone(),
            stride: self.stride,
            out: self.out.clone(),
            threads: self.threads,
            r0: self.r0,
            rdot0: self.rdot0,
        }
    }
}

/// Top-level commands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an ensemble and write one CSV per path.
    Simulate {
        #[arg(value_enum)]
        system: System,
    },
    /// Develop Euclidean drivers onto the selected metric.
    Develop {
        /// Driver CSV with columns `t, x_1, …, x_d`; simulated Euclidean
        /// kinetic Brownian motion when absent.
        #[arg(long)]
        driver: Option<PathBuf>,
    },
    /// Build level-2 lifts of rescaled Euclidean paths.
    LiftRoughpath {
        /// Path CSV with columns `t, x_1, …, x_d`; simulated rescaled
        /// Euclidean kinetic Brownian motion when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run one acceptance check.
    Verify {
        #[arg(value_enum)]
        check: VerifyCheck,
    },
}

/// Simulated systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Euclidean,
    Polar,
    Radial,
    H2,
    Lift,
}

/// Acceptance checks exposed by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyCheck {
    Interpolation,
    Geodesic,
    Ergodic,
    Density,
    ItoIdentity,
    Escape,
    Angle,
    H2,
    Chen,
    Moments,
    DevelopLaw,
    GroupLift,
    Determinism,
}

impl VerifyCheck {
    /// Name used by [`checks::run_check`].
    pub fn name(self) -> &'static str {
        match self {
            VerifyCheck::Interpolation => "interpolation",
            VerifyCheck::Geodesic => "geodesic",
            VerifyCheck::Ergodic => "ergodic",
            VerifyCheck::Density => "density",
            VerifyCheck::ItoIdentity => "ito-identity",
            VerifyCheck::Escape => "escape",
            VerifyCheck::Angle => "angle",
            VerifyCheck::H2 => "h2",
            VerifyCheck::Chen => "chen",
            VerifyCheck::Moments => "moments",
            VerifyCheck::DevelopLaw => "develop-law",
            VerifyCheck::GroupLift => "group-lift",
            VerifyCheck::Determinism => "determinism",
        }
    }
}

/// One output file with its digest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Check outcome as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestCheck {
    pub check: String,
    pub criterion: u8,
    pub pass: bool,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    pub components: Vec<checks::Component>,
}

impl From<&CheckReport> for ManifestCheck {
    fn from(r: &CheckReport) -> Self {
        ManifestCheck {
            check: r.check.clone(),
            criterion: r.criterion,
            pass: r.pass,
            n: r.n,
            dt: r.dt,
            seed: r.seed,
            components: r.components.clone(),
        }
    }
}

/// Run manifest written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub wall_time_seconds: f64,
    pub checks: Vec<ManifestCheck>,
    pub files: Vec<FileEntry>,
}

/// Result of a command: exit status and the manifest that was written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
}

/// Parses `args` (including the program name) and runs the command,
/// printing diagnostics to stderr. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(o) => {
            eprintln!("wrote {} files to {}", o.manifest.files.len(), o.out_dir.display());
            for c in &o.manifest.checks {
                eprintln!("{} (criterion {}): {}", c.check, c.criterion, if c.pass { "PASS" } else { "FAIL" });
            }
            o.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<RunOutcome> {
    let file = match &cli.options.config {
        Some(p) => config::read_file_config(p)?,
        None => Overrides::default(),
    };
    let cli_over = cli.options.overrides();
    let threads = cli_over.threads.or(file.threads);
    if threads == Some(0) {
        return Err(Error::Config("invariant `threads >= 1` violated: threads = 0".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, cli_over, file))
}

fn dispatch(command: &Command, cli: Overrides, file: Overrides) -> Result<RunOutcome> {
    let start = Instant::now();
    match command {
        Command::Verify { check } => {
            let o = cli.clone().or(file.clone());
            let params = CheckParams {
                seed: o.seed.unwrap_or(checks::DEFAULT_SEED),
                paths: o.paths,
                dt: o.dt,
                horizon: o.horizon,
                sigma: o.sigma,
                d: o.dim,
                scheme: o.scheme_kind()?,
            };
            let out = o.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let output = checks::run_check(check.name(), &params)?;
            let mut w = OutputDir::create(&out)?;
            for t in &output.tables {
                w.write(&format!("{}.csv", t.name), &t.csv_bytes()?)?;
            }
            w.write_json("report.json", &output.report)?;
            let code = if output.report.pass { EXIT_OK } else { EXIT_STATISTICAL };
            let cfg = serde_json::json!({ "check": check.name(), "params": params });
            w.finish(&format!("verify {}", check.name()), cfg, start, vec![ManifestCheck::from(&output.report)], code)
        }
        Command::Simulate { system } => {
            let kind = if *system == System::H2 { CommandKind::HyperbolicPlane } else { CommandKind::General };
            let cfg = SimConfig::resolve(cli, file, kind)?;
            simulate(*system, &cfg, start)
        }
        Command::Develop { driver } => {
            let cfg = SimConfig::resolve(cli, file, CommandKind::General)?;
            develop(&cfg, driver.as_deref(), start)
        }
        Command::LiftRoughpath { input } => {
            let cfg = SimConfig::resolve(cli, file, CommandKind::General)?;
            lift_roughpath(&cfg, input.as_deref(), start)
        }
    }
}

struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.root.join(name), bytes)?;
        self.files.push(FileEntry { path: name.to_string(), bytes: bytes.len() as u64, sha256: io::sha256_hex(bytes) });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    fn finish(self, command: &str, config: serde_json::Value, start: Instant, checks: Vec<ManifestCheck>, exit_code: i32) -> Result<RunOutcome> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            checks,
            files: self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        std::fs::write(self.root.join("manifest.json"), bytes)?;
        Ok(RunOutcome { exit_code, manifest, out_dir: self.root })
    }
}

/// Summary of terminal states written as `report.json` by `simulate` and `develop`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub command: String,
    pub paths: usize,
    pub columns: Vec<String>,
    pub terminal_mean: Vec<f64>,
    pub terminal_std_error: Vec<f64>,
    pub fingerprints: Vec<String>,
}

fn terminal_report<S: CsvState>(command: &str, trajs: &[Trajectory<S>]) -> Result<EnsembleReport> {
    let columns = trajs[0].csv_header();
    let mut summary = EnsembleSummary::new(columns.len());
    for t in trajs {
        let mut row = vec![*t.times.last().unwrap_or(&0.0)];
        t.last().values(&mut row);
        summary.push(&row)?;
    }
    Ok(EnsembleReport {
        command: command.into(),
        paths: trajs.len(),
        terminal_mean: summary.mean.clone(),
        terminal_std_error: (0..columns.len()).map(|i| summary.std_error(i)).collect(),
        columns,
        fingerprints: trajs.iter().map(|t| t.fingerprint.clone()).collect(),
    })
}

fn write_ensemble<S: CsvState + Send + Sync>(name: &str, trajs: Vec<Trajectory<S>>, cfg: &SimConfig, start: Instant) -> Result<RunOutcome> {
    let mut w = OutputDir::create(&cfg.out)?;
    let bytes: Vec<Vec<u8>> = trajs.par_iter().map(|t| t.csv_bytes()).collect::<Result<_>>()?;
    for (k, b) in bytes.iter().enumerate() {
        w.write(&format!("trajectory_{k}.csv"), b)?;
    }
    w.write_json("report.json", &terminal_report(name, &trajs)?)?;
    w.finish(name, serde_json::to_value(cfg)?, start, Vec::new(), EXIT_OK)
}

fn scheme_of(cfg: &SimConfig) -> Result<StepScheme> {
    StepScheme::new(cfg.scheme, cfg.dt)
}

fn simulate(system: System, cfg: &SimConfig, start: Instant) -> Result<RunOutcome> {
    let scheme = scheme_of(cfg)?;
    let metric = model_space(cfg.metric)?;
    let paths = cfg.paths as u64;
    let (d, sigma, horizon, stride, seed) = (cfg.d, cfg.sigma, cfg.horizon, cfg.stride, cfg.seed);
    let polar0 = PolarState::standard(d, cfg.r0, cfg.rdot0);
    match system {
        System::Euclidean => {
            let init = EuclideanState::at_origin(d);
            let trajs = (0..paths)
                .into_par_iter()
                .map(|k| kbm::simulate_euclidean(d, sigma, horizon, scheme, stride, &mut NoiseStream::new(seed, k), &init))
                .collect::<Result<Vec<_>>>()?;
            write_ensemble("simulate euclidean", trajs, cfg, start)
        }
        System::Polar => {
            let trajs = (0..paths)
                .into_par_iter()
                .map(|k| {
                    kbm::simulate_polar(&metric, d, sigma, horizon, scheme, stride, &mut NoiseStream::new(seed, k), &polar0)
                        .map(|r| r.trajectory)
                })
                .collect::<Result<Vec<_>>>()?;
            write_ensemble("simulate polar", trajs, cfg, start)
        }
        System::Radial => {
            let init = RadialState { r: cfg.r0, rdot: cfg.rdot0 };
            let trajs = (0..paths)
                .into_par_iter()
                .map(|k| {
                    kbm::simulate_radial(&metric, d, sigma, horizon, scheme, stride, &mut NoiseStream::new(seed, k), &init)
                        .map(|r| r.trajectory)
                })
                .collect::<Result<Vec<_>>>()?;
            write_ensemble("simulate radial", trajs, cfg, start)
        }
        System::H2 => {
            // Start at (0, 1) with unit hyperbolic speed; rdot0 is the
            // vertical component.
            let init = HyperbolicPlaneState::new(0.0, 1.0, (1.0 - cfg.rdot0 * cfg.rdot0).sqrt(), cfg.rdot0)?;
            let trajs = (0..paths)
                .into_par_iter()
                .map(|k| {
                    kbm::simulate_hyperbolic_plane(sigma, horizon, scheme, stride, &mut NoiseStream::new(seed, k), &init)
                        .map(|r| r.trajectory)
                })
                .collect::<Result<Vec<_>>>()?;
            write_ensemble("simulate h2", trajs, cfg, start)
        }
        System::Lift => {
            let init = GroupLiftState::from_polar(&polar0)?;
            let trajs = (0..paths)
                .into_par_iter()
                .map(|k| {
                    kbm::simulate_group_lift(&metric, d, sigma, horizon, scheme, stride, &mut NoiseStream::new(seed, k), &init)
                        .map(|r| r.trajectory)
                })
                .collect::<Result<Vec<_>>>()?;
            write_ensemble("simulate lift", trajs, cfg, start)
        }
    }
}

/// Reads a path CSV with columns `t, x_1, …, x_d`.
fn read_path(path: &Path, d: Option<usize>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (header, rows) = io::read_table(path)?;
    if header.first().map(String::as_str) != Some("t") || header.len() < 2 {
        return Err(Error::Input(format!("{}: expected columns t, x_1, …, x_d", path.display())));
    }
    if let Some(d) = d {
        if header.len() != d + 1 {
            return Err(Error::Config(format!(
                "invariant `driver dimension = d` violated: {} has {} coordinates, d = {d}",
                path.display(),
                header.len() - 1
            )));
        }
    }
    let times = rows.iter().map(|r| r[0]).collect();
    let pts = rows.into_iter().map(|r| r[1..].to_vec()).collect();
    Ok((times, pts))
}

fn develop(cfg: &SimConfig, driver: Option<&Path>, start: Instant) -> Result<RunOutcome> {
    let metric = model_space(cfg.metric)?;
    let frame0 = FrameState::from_polar(&metric, &PolarState::standard(cfg.d, cfg.r0, cfg.rdot0))?;
    let drivers: Vec<(Vec<f64>, Vec<Vec<f64>>)> = match driver {
        Some(p) => {
            let (t, mut x) = read_path(p, Some(cfg.d))?;
            let x0 = x[0].clone();
            for row in &mut x {
                for (a, b) in row.iter_mut().zip(&x0) {
                    *a -= b;
                }
            }
            vec![(t, x)]
        }
        None => {
            let scheme = scheme_of(cfg)?;
            let init = EuclideanState::at_origin(cfg.d);
            (0..cfg.paths as u64)
                .into_par_iter()
                .map(|k| {
                    let tr = kbm::simulate_euclidean(cfg.d, cfg.sigma, cfg.horizon, scheme, 1, &mut NoiseStream::new(cfg.seed, k), &init)?;
                    Ok((tr.times.clone(), tr.states.iter().map(|s| s.x.clone()).collect()))
                })
                .collect::<Result<_>>()?
        }
    };
    let devs = drivers
        .par_iter()
        .map(|(t, x)| cartan::develop(&metric, &frame0, t, x))
        .collect::<Result<Vec<_>>>()?;
    let mut w = OutputDir::create(&cfg.out)?;
    let tmp = tempdir_in(&cfg.out)?;
    let mut finals = Vec::new();
    for (k, dev) in devs.iter().enumerate() {
        let stride = cfg.stride;
        let keep: Vec<usize> = (0..dev.times.len()).filter(|i| i % stride == 0 || *i + 1 == dev.times.len()).collect();
        let sub = cartan::Development {
            times: keep.iter().map(|&i| dev.times[i]).collect(),
            states: keep.iter().map(|&i| dev.states[i].clone()).collect(),
        };
        let (b, f) = (tmp.join("base.csv"), tmp.join("frame.csv"));
        sub.write_csv(&b, &f)?;
        w.write(&format!("trajectory_{k}.csv"), &std::fs::read(&b)?)?;
        w.write(&format!("frame_{k}.csv"), &std::fs::read(&f)?)?;
        let last = dev.last();
        let mut row = vec![*dev.times.last().unwrap_or(&0.0), last.r];
        row.extend(&last.theta);
        finals.push(row);
    }
    std::fs::remove_dir_all(&tmp)?;
    let mut columns = vec!["t".to_string(), "r".to_string()];
    columns.extend((1..=cfg.d).map(|i| format!("theta_{i}")));
    let mut summary = EnsembleSummary::new(columns.len());
    for r in &finals {
        summary.push(r)?;
    }
    let report = EnsembleReport {
        command: "develop".into(),
        paths: finals.len(),
        terminal_mean: summary.mean.clone(),
        terminal_std_error: (0..columns.len()).map(|i| summary.std_error(i)).collect(),
        columns,
        fingerprints: Vec::new(),
    };
    w.write_json("report.json", &report)?;
    w.finish("develop", serde_json::to_value(cfg)?, start, Vec::new(), EXIT_OK)
}

fn tempdir_in(root: &Path) -> Result<PathBuf> {
    let p = root.join(".kbm-lab-tmp");
    std::fs::create_dir_all(&p)?;
    Ok(p)
}

/// Report written by `lift-roughpath`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftReport {
    pub paths: usize,
    pub samples: usize,
    pub gamma: f64,
    /// Largest relative Chen defect over consecutive dyadic splits.
    pub max_chen_defect: f64,
    /// Largest relative symmetric-part defect.
    pub max_symmetry_defect: f64,
    /// Terminal Lévy area `A_12` per path.
    pub terminal_levy_area_12: Vec<f64>,
}

fn lift_roughpath(cfg: &SimConfig, input: Option<&Path>, start: Instant) -> Result<RunOutcome> {
    let gamma = roughpath::DEFAULT_GAMMA;
    let paths: Vec<(Vec<f64>, Vec<Vec<f64>>)> = match input {
        Some(p) => vec![read_path(p, None)?],
        None => {
            if !(cfg.sigma > 0.0) {
                return Err(Error::Config("invariant `sigma > 0` violated: lift-roughpath rescales by σ".into()));
            }
            let scheme = scheme_of(cfg)?;
            let init = EuclideanState::at_origin(cfg.d);
            let s2 = cfg.sigma * cfg.sigma;
            (0..cfg.paths as u64)
                .into_par_iter()
                .map(|k| {
                    let tr = kbm::simulate_euclidean(cfg.d, cfg.sigma, s2, scheme, cfg.stride, &mut NoiseStream::new(cfg.seed, k), &init)?;
                    let re = kbm::rescale_interpolation(&tr, cfg.sigma)?;
                    Ok((re.times.clone(), re.states.iter().map(|s| s.x.clone()).collect()))
                })
                .collect::<Result<_>>()?
        }
    };
    let lifts = paths.par_iter().map(|(t, x)| lift_level2(t, x, gamma)).collect::<Result<Vec<_>>>()?;
    let mut w = OutputDir::create(&cfg.out)?;
    let tmp = tempdir_in(&cfg.out)?;
    let (mut chen, mut sym) = (0.0f64, 0.0f64);
    let mut areas = Vec::new();
    for (k, l) in lifts.iter().enumerate() {
        let f = tmp.join("lift.csv");
        l.write_csv(&f)?;
        w.write(&format!("roughpath_{k}.csv"), &std::fs::read(&f)?)?;
        let n = l.len() - 1;
        let mut step = n.next_power_of_two() / 2;
        while step >= 1 {
            let mut s = 0;
            while s + 2 * step <= n {
                chen = chen.max(l.chen_defect(s, s + step, s + 2 * step));
                sym = sym.max(l.symmetry_defect(s, s + 2 * step));
                s += 2 * step;
            }
            step /= 2;
        }
        areas.push(if l.dim() >= 2 { l.levy_area(n)[1] } else { 0.0 });
    }
    std::fs::remove_dir_all(&tmp)?;
    let report = LiftReport {
        paths: lifts.len(),
        samples: lifts.first().map_or(0, |l| l.len()),
        gamma,
        max_chen_defect: chen,
        max_symmetry_defect: sym,
        terminal_levy_area_12: areas,
    };
    w.write_json("report.json", &report)?;
    w.finish("lift-roughpath", serde_json::to_value(cfg)?, start, Vec::new(), EXIT_OK)
}
