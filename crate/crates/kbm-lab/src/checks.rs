//! Acceptance checks shared by the command-line `verify` commands and the
//! acceptance test target.
//!
//! Every check is a pure function of its [`CheckParams`]: ensembles are
//! simulated in parallel with one deterministic noise stream per path, so
//! reports do not depend on the number of worker threads.

use crate::cartan::{self, FrameState};
use crate::error::{Error, Result};
use crate::geometry::{model_space, ModelSpace, WarpedMetric};
use crate::io;
use crate::kbm::{
    self, EuclideanState, GroupLiftState, HyperbolicPlaneState, PolarState, RadialState,
};
use crate::roughpath::{self, lift_level2, Level2Path};
use crate::sde::{NoiseStream, SchemeKind, SdeSystem, StepScheme};
use crate::stats::{self, EnsembleSummary, EscapeModel};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

/// One pass/fail condition inside a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub name: String,
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    /// `abs`, `rel`, `le` or `ge`.
    pub comparison: &'static str,
    pub pass: bool,
}

impl Component {
    /// Passes when `|statistic − target| ≤ tolerance`.
    pub fn abs_within(name: &str, statistic: f64, target: f64, tolerance: f64) -> Self {
        let pass = (statistic - target).abs() <= tolerance;
        Component { name: name.into(), statistic, target, tolerance, comparison: "abs", pass }
    }

    /// Passes when `|statistic/target − 1| ≤ tolerance`.
    pub fn rel_within(name: &str, statistic: f64, target: f64, tolerance: f64) -> Self {
        let pass = (statistic / target - 1.0).abs() <= tolerance;
        Component { name: name.into(), statistic, target, tolerance, comparison: "rel", pass }
    }

    /// Passes when `statistic ≤ bound`.
    pub fn at_most(name: &str, statistic: f64, bound: f64) -> Self {
        Component { name: name.into(), statistic, target: bound, tolerance: 0.0, comparison: "le", pass: statistic <= bound }
    }

    /// Passes when `statistic ≥ bound`.
    pub fn at_least(name: &str, statistic: f64, bound: f64) -> Self {
        Component { name: name.into(), statistic, target: bound, tolerance: 0.0, comparison: "ge", pass: statistic >= bound }
    }
}

/// Result of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    /// Acceptance criterion number.
    pub criterion: u8,
    /// Statistic, target and tolerance of the first component.
    pub statistic: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Ensemble size (paths), or samples for single-path checks.
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    pub components: Vec<Component>,
    /// Additional diagnostics.
    pub details: serde_json::Value,
}

/// Numeric table emitted alongside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    fn new(name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        DataTable { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    /// CSV bytes of the table.
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        io::table_bytes(&self.header, self.rows.iter().cloned())
    }
}

/// Report plus plot-ready data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutput {
    pub report: CheckReport,
    pub tables: Vec<DataTable>,
}

/// Optional overrides of the default experiment parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckParams {
    pub seed: u64,
    pub paths: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub sigma: Option<f64>,
    pub d: Option<usize>,
    pub scheme: Option<SchemeKind>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { seed: DEFAULT_SEED, paths: None, dt: None, horizon: None, sigma: None, d: None, scheme: None }
    }
}

impl CheckParams {
    pub fn with_seed(seed: u64) -> Self {
        CheckParams { seed, ..Default::default() }
    }

    fn scheme(&self, dt: f64) -> Result<StepScheme> {
        StepScheme::new(self.scheme.unwrap_or(SchemeKind::ItoEulerProject), dt)
    }
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Stream offsets separating independent ensembles within one check.
const STREAM_BLOCK: u64 = 1 << 32;

fn ensemble<T: Send>(paths: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..paths as u64).into_par_iter().map(f).collect()
}

fn finish(check: &str, criterion: u8, n: usize, dt: f64, seed: u64, components: Vec<Component>, details: serde_json::Value) -> CheckReport {
    let first = components.first().cloned().expect("checks have at least one component");
    CheckReport {
        check: check.into(),
        criterion,
        statistic: first.statistic,
        target: first.target,
        tolerance: first.tolerance,
        pass: components.iter().all(|c| c.pass),
        n,
        dt,
        seed,
        components,
        details,
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Names of the checks in criterion order.
pub const CHECK_NAMES: [&str; 13] = [
    "interpolation",
    "geodesic",
    "ergodic",
    "density",
    "ito-identity",
    "escape",
    "angle",
    "h2",
    "chen",
    "moments",
    "develop-law",
    "group-lift",
    "determinism",
];

/// Runs a check by name.
pub fn run_check(name: &str, p: &CheckParams) -> Result<CheckOutput> {
    match name {
        "interpolation" => interpolation(p),
        "geodesic" => geodesic(p),
        "ergodic" => ergodic(p),
        "density" => density(p),
        "ito-identity" => ito_identity(p),
        "escape" => escape(p),
        "angle" => angle(p),
        "h2" => hyperbolic_plane(p),
        "chen" => chen(p),
        "moments" => levy_area(p),
        "develop-law" => develop_law(p),
        "group-lift" => group_lift(p),
        "determinism" => determinism(p),
        other => Err(Error::Config(format!("unknown check `{other}`; expected one of {}", CHECK_NAMES.join(", ")))),
    }
}

// ---------------------------------------------------------------------------
// 1. Brownian limit of the rescaled Euclidean process
// ---------------------------------------------------------------------------

/// Rescaled endpoints `X^σ_1` of Euclidean kinetic Brownian motion.
fn rescaled_endpoints(d: usize, sigma: f64, paths: usize, dt: f64, p: &CheckParams, offset: u64) -> Result<Vec<Vec<f64>>> {
    let scheme = p.scheme(dt)?;
    let horizon = sigma * sigma;
    let init = EuclideanState::at_origin(d);
    ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, offset + k);
        let steps = (horizon / dt).round() as usize;
        let tr = kbm::simulate_euclidean(d, sigma, horizon, scheme, steps, &mut s, &init)?;
        let re = kbm::rescale_interpolation(&tr, sigma)?;
        Ok(re.last().x.clone())
    })
}

/// Criterion 1: covariance `4/(d(d−1))·I` of the rescaled endpoint.
pub fn interpolation(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(10.0);
    let paths = p.paths.unwrap_or(4096);
    let dt = p.dt.unwrap_or(1e-3);
    let ends = rescaled_endpoints(d, sigma, paths, dt, p, 0)?;
    let rep = stats::interpolation_check(&ends, d)?;
    let mut comps: Vec<Component> = rep
        .variances
        .iter()
        .enumerate()
        .map(|(i, v)| Component::rel_within(&format!("variance_{}", i + 1), *v, rep.variance_target, 0.10))
        .collect();
    for c in &rep.off_diagonal {
        comps.push(Component::at_most(
            &format!("cov_{}{}_in_std_errors", c.i + 1, c.j + 1),
            c.covariance.abs() / c.std_error,
            3.0,
        ));
    }
    let mut header = vec!["path".to_string()];
    header.extend((1..=d).map(|i| format!("X_{i}")));
    let table = DataTable {
        name: "endpoints".into(),
        header,
        rows: ends.iter().enumerate().map(|(k, e)| std::iter::once(k as f64).chain(e.iter().copied()).collect()).collect(),
    };
    let details = serde_json::json!({ "report": rep, "sigma": sigma, "d": d, "rescaled_dt": dt / (sigma * sigma) });
    Ok(CheckOutput { report: finish("interpolation", 1, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 2. Geodesic limit for small noise
// ---------------------------------------------------------------------------

/// Criterion 2: small-noise paths stay within 0.05 of the geodesic on `[0, 1]`.
pub fn geodesic(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(0.01);
    let paths = p.paths.unwrap_or(100);
    let dt = p.dt.unwrap_or(1e-3);
    let horizon = p.horizon.unwrap_or(1.0);
    let scheme = p.scheme(dt)?;
    let init = EuclideanState::at_origin(d);
    let devs = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, k);
        let tr = kbm::simulate_euclidean(d, sigma, horizon, scheme, 1, &mut s, &init)?;
        let pts: Vec<Vec<f64>> = tr.states.iter().map(|st| st.x.clone()).collect();
        Ok(stats::geodesic_deviation(&tr.times, &pts, &init.x, &init.xdot))
    })?;
    let worst = devs.iter().copied().fold(0.0, f64::max);
    let comps = vec![Component::at_most("max_sup_deviation", worst, 0.05)];
    let table = DataTable::new("deviations", &["path", "sup_deviation"], devs.iter().enumerate().map(|(k, v)| vec![k as f64, *v]).collect());
    let details = serde_json::json!({ "median_sup_deviation": stats::median(&devs), "sigma": sigma });
    Ok(CheckOutput { report: finish("geodesic", 2, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 3. Ergodic average of the squared radial speed
// ---------------------------------------------------------------------------

/// Criterion 3: `(1/T)∫ṙ² → 1/d` on the flat metric.
pub fn ergodic(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-3);
    let horizon = p.horizon.unwrap_or(1e4);
    let m = model_space(ModelSpace::Euclidean)?;
    let stride = 10;
    let mut s = NoiseStream::new(p.seed, 0);
    let run = kbm::simulate_radial(&m, d, sigma, horizon, p.scheme(dt)?, stride, &mut s, &RadialState { r: 1.0, rdot: 0.0 })?;
    let tr = &run.trajectory;
    let avg = stats::ergodic_average(tr, |st| st.rdot * st.rdot, 0.0)?;
    let avg_c = stats::ergodic_average(tr, |st| 1.0 - st.rdot * st.rdot, 0.0)?;
    let target = 1.0 / d as f64;
    let comps = vec![
        Component::abs_within("time_average_rdot2", avg, target, 0.02),
        Component::abs_within("time_average_one_minus_rdot2", avg_c, 1.0 - target, 0.02),
    ];
    let table = DataTable::new(
        "radial",
        &["t", "r", "rdot"],
        tr.times.iter().zip(&tr.states).step_by(100).map(|(t, st)| vec![*t, st.r, st.rdot]).collect(),
    );
    let details = serde_json::json!({ "horizon": horizon, "final_r": tr.last().r });
    Ok(CheckOutput { report: finish("ergodic", 3, tr.len(), dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 4. Invariant density for constant log-derivative
// ---------------------------------------------------------------------------

/// Criterion 4: the radial speed on `f = e^r` follows `μ₁` and `r_T/T`
/// converges to its mean.
pub fn density(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-3);
    let post = p.horizon.unwrap_or(2e4);
    let burn = 0.1 * post;
    let m = model_space(ModelSpace::Exponential { c: 1.0 })?;
    let mu = stats::invariant_density_mu_ell(m.ell(), sigma, d)?;
    let mut s = NoiseStream::new(p.seed, 0);
    let run = kbm::simulate_radial(&m, d, sigma, burn + post, p.scheme(dt)?, 100, &mut s, &RadialState { r: 1.0, rdot: 0.0 })?;
    let tr = &run.trajectory;
    let samples = sorted(tr.times.iter().zip(&tr.states).filter(|(t, _)| **t >= burn).map(|(_, st)| st.rdot).collect());
    let ks = stats::ks_distance(&samples, |x| mu.cdf(x))?;
    let rate = tr.last().r / tr.horizon();
    let comps = vec![
        Component::at_most("ks_rdot_vs_mu", ks, 0.02),
        Component::abs_within("ballistic_rate", rate, mu.mean, 0.02),
    ];
    let bins = 50;
    let mut hist = vec![0usize; bins];
    for x in &samples {
        hist[(((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let rows = (0..bins)
        .map(|b| {
            let c = -1.0 + (b as f64 + 0.5) * 2.0 / bins as f64;
            vec![c, hist[b] as f64 / samples.len() as f64 * bins as f64 / 2.0, mu.density(c)]
        })
        .collect();
    let table = DataTable::new("rdot_histogram", &["x", "empirical_density", "mu_density"], rows);
    let details = serde_json::json!({ "mu_mean": mu.mean, "samples": samples.len(), "burn_in": burn });
    Ok(CheckOutput { report: finish("density", 4, samples.len(), dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 5. Pathwise exponential identity
// ---------------------------------------------------------------------------

/// Criterion 5: `f²(r)(1 − ṙ²)` against its exponential representation.
pub fn ito_identity(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-4);
    let horizon = p.horizon.unwrap_or(5.0);
    let paths = p.paths.unwrap_or(20);
    let m = model_space(ModelSpace::Hyperbolic)?;
    let scheme = p.scheme(dt)?;
    let init = PolarState::standard(d, 1.0, 0.0);
    let runs = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, k);
        let run = kbm::simulate_polar(&m, d, sigma, horizon, scheme, 10, &mut s, &init)?;
        Ok((run.identity.max_relative_error(), run.identity.terminal_relative_error(), run.min_one_minus_rdot2))
    })?;
    let max_err: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let worst = max_err.iter().copied().fold(0.0, f64::max);
    let comps = vec![Component::at_most("max_relative_error", worst, 0.01)];
    let table = DataTable::new(
        "identity_errors",
        &["path", "max_relative_error", "terminal_relative_error", "min_one_minus_rdot2"],
        runs.iter().enumerate().map(|(k, r)| vec![k as f64, r.0, r.1, r.2]).collect(),
    );
    let details = serde_json::json!({
        "median_max_relative_error": stats::median(&max_err),
        "paths_within_tolerance": max_err.iter().filter(|e| **e <= 0.01).count(),
    });
    Ok(CheckOutput { report: finish("ito-identity", 5, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 6. Escape rates
// ---------------------------------------------------------------------------

/// Radial runs from `(r, ṙ) = (1, 0)`. Paths that reach the boundary
/// `r = 0`, which is possible when `f(0) > 0`, are returned as `None`.
fn radial_runs(m: &WarpedMetric, d: usize, sigma: f64, horizon: f64, dt: f64, paths: usize, p: &CheckParams, stride: usize) -> Result<Vec<Option<kbm::Trajectory<RadialState>>>> {
    let scheme = p.scheme(dt)?;
    ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, k);
        match kbm::simulate_radial(m, d, sigma, horizon, scheme, stride, &mut s, &RadialState { r: 1.0, rdot: 0.0 }) {
            Ok(run) => Ok(Some(run.trajectory)),
            Err(Error::DomainExit { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })
}

/// Surviving runs and the number of domain exits.
fn survivors(runs: Vec<Option<kbm::Trajectory<RadialState>>>) -> (Vec<kbm::Trajectory<RadialState>>, usize) {
    let n = runs.len();
    let kept: Vec<_> = runs.into_iter().flatten().collect();
    let exits = n - kept.len();
    (kept, exits)
}

/// Exact samples of `|u₀ε₁ + √(cT)·Z|/σ̃` with `Z` standard normal in
/// `ℝ^{1+β(d−1)}`: the terminal value of a Bessel process of that dimension
/// with diffusivity `c = σ²(1 − 1/d)`, rescaled by `σ̃ = (d−1)σ²/2`.
pub fn bessel_oracle(dim: usize, u0: f64, c: f64, horizon: f64, sigma_tilde: f64, n: usize, stream: &mut NoiseStream) -> Vec<f64> {
    let sd = (c * horizon).sqrt();
    (0..n)
        .map(|_| {
            let mut s2 = 0.0;
            for i in 0..dim {
                let z = stream.standard_normal() * sd + if i == 0 { u0 } else { 0.0 };
                s2 += z * z;
            }
            s2.sqrt() / sigma_tilde
        })
        .collect()
}

/// Criterion 6: escape rates in the polynomial, subexponential and
/// exponential regimes.
pub fn escape(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-3);
    let df = d as f64;
    // (a) polynomial β = 2 against the Bessel oracle.
    let beta = 2.0;
    let (ta, na) = (400.0, p.paths.unwrap_or(400));
    let (poly, poly_exits) = survivors(radial_runs(&model_space(ModelSpace::Polynomial { beta })?, d, sigma, ta, dt, na, p, 1000)?);
    let scaled: Vec<f64> = poly.iter().map(|t| t.last().r / ta.sqrt()).collect();
    let sigma_tilde = 0.5 * (df - 1.0) * sigma * sigma;
    let bessel_dim = (1.0 + beta * (df - 1.0)).round() as usize;
    let mut os = NoiseStream::new(p.seed, 3 * STREAM_BLOCK);
    let oracle: Vec<f64> = bessel_oracle(bessel_dim, sigma_tilde, sigma * sigma * (1.0 - 1.0 / df), ta, sigma_tilde, 20_000, &mut os)
        .into_iter()
        .map(|r| r / ta.sqrt())
        .collect();
    let (med_a, med_o) = (stats::median(&scaled), stats::median(&oracle));
    // (b) subexponential β = ½: per-path power fits.
    let (tb, nb) = (2000.0, p.paths.map(|n| n / 4).unwrap_or(100).max(1));
    let (sub, sub_exits) = survivors(radial_runs(&model_space(ModelSpace::Subexponential { beta: 0.5 })?, d, sigma, tb, dt, nb, p, 100)?);
    let slopes = sub
        .iter()
        .map(|t| {
            let r: Vec<f64> = t.states.iter().map(|s| s.r).collect();
            stats::escape_fit(&t.times, &r, EscapeModel::PowerInT).map(|f| f.slope)
        })
        .collect::<Result<Vec<f64>>>()?;
    let med_b = stats::median(&slopes);
    // (c) exponential c = 1 against the mean of μ₁.
    let (tc, nc) = (1000.0, p.paths.map(|n| n / 4).unwrap_or(100).max(1));
    let expo_m = model_space(ModelSpace::Exponential { c: 1.0 })?;
    let (expo, expo_exits) = survivors(radial_runs(&expo_m, d, sigma, tc, dt, nc, p, 1000)?);
    let rates: Vec<f64> = expo.iter().map(|t| t.last().r / tc).collect();
    let mu_mean = stats::invariant_density_mu_ell(1.0, sigma, d)?.mean;
    let med_c = stats::median(&rates);
    let comps = vec![
        Component::rel_within("polynomial_median_r_over_sqrt_t_vs_bessel", med_a, med_o, 0.20),
        Component::abs_within("subexponential_power_exponent", med_b, 0.665, 0.065),
        Component::rel_within("exponential_rate_vs_mu_mean", med_c, mu_mean, 0.10),
    ];
    let n = scaled.len().max(slopes.len()).max(rates.len());
    let rows = (0..n)
        .map(|k| {
            vec![
                k as f64,
                *scaled.get(k).unwrap_or(&f64::NAN),
                *slopes.get(k).unwrap_or(&f64::NAN),
                *rates.get(k).unwrap_or(&f64::NAN),
            ]
        })
        .collect();
    let table = DataTable::new("escape", &["path", "poly_r_over_sqrt_t", "subexp_power_slope", "exp_rate"], rows);
    let details = serde_json::json!({
        "polynomial": { "beta": beta, "horizon": ta, "paths": na, "median": med_a, "bessel_dimension": bessel_dim, "oracle_median": med_o, "domain_exits": poly_exits },
        "subexponential": { "beta": 0.5, "horizon": tb, "paths": nb, "median_slope": med_b, "target": 1.0 / 1.5, "interval": [0.60, 0.73], "domain_exits": sub_exits },
        "exponential": { "horizon": tc, "paths": nc, "median_rate": med_c, "mu_mean": mu_mean, "domain_exits": expo_exits },
    });
    Ok(CheckOutput { report: finish("escape", 6, na + nb + nc, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 7. Angle dichotomy
// ---------------------------------------------------------------------------

/// Fraction of the horizon after which tail statistics are taken.
pub const TAIL_START: f64 = 0.5;

fn angle_reports(beta: f64, d: usize, sigma: f64, horizon: f64, dt: f64, paths: usize, p: &CheckParams, offset: u64) -> Result<Vec<stats::AngleReport>> {
    let m = model_space(ModelSpace::Polynomial { beta })?;
    let scheme = p.scheme(dt)?;
    let init = PolarState::standard(d, 1.0, 0.0);
    ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, offset + k);
        let run = kbm::simulate_polar(&m, d, sigma, horizon, scheme, 10, &mut s, &init)?;
        let th: Vec<Vec<f64>> = run.trajectory.states.iter().map(|st| st.theta.clone()).collect();
        stats::angle_convergence_check(&run.trajectory.times, &th, &run.clocks.c, TAIL_START)
    })
}

/// Criterion 7: convergent angle for `β = 3`, divergent clock for `β = 1.5`.
pub fn angle(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-2);
    let horizon = p.horizon.unwrap_or(200.0);
    let paths = p.paths.unwrap_or(200);
    let conv = angle_reports(3.0, d, sigma, horizon, dt, paths, p, 0)?;
    let div = angle_reports(1.5, d, sigma, horizon, dt, paths, p, STREAM_BLOCK)?;
    let med = |v: &[stats::AngleReport], f: fn(&stats::AngleReport) -> f64| stats::median(&v.iter().map(f).collect::<Vec<_>>());
    let comps = vec![
        Component::at_most("beta3_median_cauchy_sup", med(&conv, |r| r.cauchy_sup), 0.1),
        Component::at_most("beta3_median_clock_increment", med(&conv, |r| r.clock_increment), 1e-2),
        Component::at_least("beta1.5_median_clock_increment", med(&div, |r| r.clock_increment), 1.0),
    ];
    let rows = conv.iter().zip(&div).enumerate().map(|(k, (a, b))| vec![k as f64, a.cauchy_sup, a.clock_increment, b.cauchy_sup, b.clock_increment]).collect();
    let table = DataTable::new("angle", &["path", "beta3_cauchy_sup", "beta3_clock_increment", "beta1.5_cauchy_sup", "beta1.5_clock_increment"], rows);
    let details = serde_json::json!({
        "tail_start": TAIL_START,
        "beta1.5_median_cauchy_sup": med(&div, |r| r.cauchy_sup),
        "horizon": horizon,
    });
    Ok(CheckOutput { report: finish("angle", 7, 2 * paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 8. Hyperbolic half-plane
// ---------------------------------------------------------------------------

/// Criterion 8: Lyapunov exponent, convergence of `x_t` and the law of `u_t`.
pub fn hyperbolic_plane(p: &CheckParams) -> Result<CheckOutput> {
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-3);
    let horizon = p.horizon.unwrap_or(1e4);
    let init = HyperbolicPlaneState::new(0.0, 1.0, 1.0, 0.0)?;
    let mut s = NoiseStream::new(p.seed, 0);
    let run = kbm::simulate_hyperbolic_plane(sigma, horizon, p.scheme(dt)?, 100, &mut s, &init)?;
    let tr = &run.trajectory;
    let rep = stats::lyapunov_h2(tr, sigma)?;
    let dens = stats::hyperbolic_plane_density(sigma)?;
    let u = sorted(tr.times.iter().zip(&tr.states).filter(|(t, _)| **t >= 0.1 * horizon).map(|(_, st)| st.u).collect());
    let ks = stats::ks_distance(&u, |x| dens.cdf(x))?;
    let comps = vec![
        Component::abs_within("lyapunov_vs_quadrature", rep.exponent, rep.prediction, 0.05),
        Component::at_most("lyapunov_negative", rep.exponent, 0.0),
        Component::at_most("x_tail_oscillation", rep.tail_oscillation, 0.01),
        Component::at_most("ks_u_vs_density", ks, 0.02),
    ];
    let table = DataTable::new(
        "h2_path",
        &["t", "x", "log_y", "u"],
        tr.times.iter().zip(&tr.states).step_by(10).map(|(t, st)| vec![*t, st.x, st.log_y, st.u]).collect(),
    );
    let details = serde_json::json!({ "report": rep, "underflow_flags": run.underflow_flags, "samples": u.len() });
    Ok(CheckOutput { report: finish("h2", 8, u.len(), dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 9. Rough-path algebra and moment scaling
// ---------------------------------------------------------------------------

/// Lifts of rescaled Euclidean paths on a uniform grid of `intervals`
/// rescaled steps. The internal step keeps `σ²dt ≤ 0.1` and `dt ≤ 2e-3`.
fn rescaled_lifts(d: usize, sigma: f64, paths: usize, intervals: usize, p: &CheckParams, offset: u64) -> Result<(Vec<Level2Path>, f64)> {
    let s2 = sigma * sigma;
    let per = ((s2 * s2 / (0.1 * intervals as f64)).ceil() as usize).max((s2 / (2e-3 * intervals as f64)).ceil() as usize).max(1);
    let dt = s2 / (intervals * per) as f64;
    let scheme = p.scheme(dt)?;
    let init = EuclideanState::at_origin(d);
    let lifts = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, offset + k);
        let tr = kbm::simulate_euclidean(d, sigma, s2, scheme, per, &mut s, &init)?;
        let times: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
        let pts: Vec<Vec<f64>> = tr.states.iter().map(|st| st.x.clone()).collect();
        if pts.len() != intervals + 1 {
            return Err(Error::Numerical(format!("expected {} samples, recorded {}", intervals + 1, pts.len())));
        }
        lift_level2(&times, &pts, roughpath::DEFAULT_GAMMA)
    })?;
    Ok((lifts, dt))
}

/// Criterion 9: Chen and symmetry identities on random splits plus
/// first-level moment slopes for `σ ∈ {1, 2, 4, 8}`.
pub fn chen(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let paths = p.paths.unwrap_or(200);
    let (single, dt) = rescaled_lifts(d, p.sigma.unwrap_or(4.0), 1, 4096, p, 7 * STREAM_BLOCK)?;
    let path = &single[0];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p.seed ^ 0x5eed_c4e2);
    let n = path.len();
    let (mut chen_worst, mut sym_worst) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let mut idx = [rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)];
        idx.sort_unstable();
        chen_worst = chen_worst.max(path.chen_defect(idx[0], idx[1], idx[2]));
        sym_worst = sym_worst.max(path.symmetry_defect(idx[0], idx[2]));
    }
    let mut comps = vec![
        Component::at_most("chen_relative_defect", chen_worst, 1e-12),
        Component::at_most("symmetric_part_relative_defect", sym_worst, 1e-12),
    ];
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (j, sigma) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        let (lifts, _) = rescaled_lifts(d, sigma, paths, 512, p, (j as u64 + 1) * STREAM_BLOCK)?;
        let h = roughpath::holder_diagnostics(&lifts, 4, 64)?;
        comps.push(Component::at_least(&format!("first_level_slope_sigma_{sigma}"), h.first_level_fit.slope, 1.8));
        for (k, lag) in h.lags.iter().enumerate() {
            rows.push(vec![sigma, *lag, h.first_level_moments[k], h.second_level_moments[k]]);
        }
        fits.push(serde_json::json!({ "sigma": sigma, "first": h.first_level_fit, "second": h.second_level_fit, "first_seminorm": h.first_level_seminorm }));
    }
    let table = DataTable::new("moment_scaling", &["sigma", "lag", "first_level_moment", "second_level_moment"], rows);
    let details = serde_json::json!({ "fits": fits, "q": 4, "lift_samples": n });
    Ok(CheckOutput { report: finish("chen", 9, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 10. Lévy area
// ---------------------------------------------------------------------------

/// Lévy areas of lifted planar Brownian motions with covariance `c·t·I` on
/// a uniform grid of `intervals` steps over `[0, 1]`.
pub fn brownian_levy_areas(c: f64, paths: usize, intervals: usize, seed: u64, offset: u64) -> Result<Vec<f64>> {
    let h = 1.0 / intervals as f64;
    ensemble(paths, |k| {
        let mut s = NoiseStream::new(seed, offset + k);
        let times: Vec<f64> = (0..=intervals).map(|i| i as f64 * h).collect();
        let mut pts = Vec::with_capacity(intervals + 1);
        let mut x = [0.0, 0.0];
        pts.push(x.to_vec());
        let mut dz = [0.0; 2];
        for _ in 0..intervals {
            s.fill_increments(&mut dz, c * h);
            x[0] += dz[0];
            x[1] += dz[1];
            pts.push(x.to_vec());
        }
        let lift = lift_level2(&times, &pts, 0.5)?;
        Ok(lift.levy_area(intervals)[1])
    })
}

/// Criterion 10: planar Lévy area of rescaled kinetic Brownian motion
/// against the lifted Brownian oracle at speed `4/(d(d−1))`.
pub fn levy_area(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(8.0);
    let paths = p.paths.unwrap_or(4096);
    let intervals = 1024;
    let (lifts, dt) = rescaled_lifts(d, sigma, paths, intervals, p, 0)?;
    let areas: Vec<f64> = lifts
        .iter()
        .map(|l| l.project(&[0, 1]).map(|q| q.levy_area(intervals)[1]))
        .collect::<Result<_>>()?;
    drop(lifts);
    let c = 4.0 / (d as f64 * (d as f64 - 1.0));
    let oracle = brownian_levy_areas(c, paths, intervals, p.seed, 5 * STREAM_BLOCK)?;
    let (m, v) = (stats::mean(&areas), stats::variance(&areas));
    let se = (v / paths as f64).sqrt();
    let vo = stats::variance(&oracle);
    let comps = vec![
        Component::at_most("mean_in_std_errors", m.abs() / se, 2.0),
        Component::rel_within("variance_vs_oracle", v, vo, 0.15),
    ];
    let table = DataTable::new("levy_area", &["path", "kbm_area", "oracle_area"], areas.iter().zip(&oracle).enumerate().map(|(k, (a, b))| vec![k as f64, *a, *b]).collect());
    let details = serde_json::json!({ "mean": m, "std_error": se, "variance": v, "oracle_variance": vo, "analytic_oracle_variance": c * c / 4.0, "speed": c });
    Ok(CheckOutput { report: finish("moments", 10, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 11. Development
// ---------------------------------------------------------------------------

/// Smooth spiral driver `(½t cos 3t, ½t sin 3t, t/5)` on `[0, horizon]`.
pub fn spiral_driver(horizon: f64, dt: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = (horizon / dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let pts = times.iter().map(|t| vec![0.5 * t * (3.0 * t).cos(), 0.5 * t * (3.0 * t).sin(), 0.2 * t]).collect();
    (times, pts)
}

/// Criterion 11: developed Euclidean paths have the law of the direct
/// simulation, and rough development matches classical development.
pub fn develop_law(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-3);
    let horizon = p.horizon.unwrap_or(5.0);
    let paths = p.paths.unwrap_or(2000);
    let m = model_space(ModelSpace::Hyperbolic)?;
    let scheme = p.scheme(dt)?;
    let polar0 = PolarState::standard(d, 1.0, 0.0);
    let frame0 = FrameState::from_polar(&m, &polar0)?;
    let euclid0 = EuclideanState::at_origin(d);
    let developed = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, k);
        let tr = kbm::simulate_euclidean(d, sigma, horizon, scheme, 1, &mut s, &euclid0)?;
        let pts: Vec<Vec<f64>> = tr.states.iter().map(|st| st.x.clone()).collect();
        Ok(cartan::develop_terminal(&m, &frame0, &tr.times, &pts)?.r)
    })?;
    let direct = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, STREAM_BLOCK + k);
        Ok(kbm::simulate_polar(&m, d, sigma, horizon, scheme, 1000, &mut s, &polar0)?.trajectory.last().r)
    })?;
    let ks = stats::ks_two_sample(&developed, &direct)?;
    let (times, pts) = spiral_driver(2.0, 1e-3);
    let spiral0 = FrameState::radial(&m, 1.0, {
        let mut t = vec![0.0; d];
        t[0] = 1.0;
        t
    })?;
    let classical = cartan::develop(&m, &spiral0, &times, &pts)?;
    let rough = cartan::develop_rough(&m, &spiral0, &lift_level2(&times, &pts, 0.5)?)?;
    let spiral_err = classical
        .states
        .iter()
        .zip(&rough.states)
        .map(|(a, b)| {
            let dth: f64 = a.theta.iter().zip(&b.theta).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            (a.r - b.r).abs().max(dth)
        })
        .fold(0.0, f64::max);
    let comps = vec![
        Component::at_most("ks_developed_vs_direct_r_T", ks, 0.05),
        Component::at_most("spiral_rough_vs_classical", spiral_err, 1e-3),
    ];
    let table = DataTable::new("terminal_radius", &["path", "developed_r_T", "direct_r_T"], developed.iter().zip(&direct).enumerate().map(|(k, (a, b))| vec![k as f64, *a, *b]).collect());
    let details = serde_json::json!({
        "median_developed": stats::median(&developed),
        "median_direct": stats::median(&direct),
        "ks_critical_1pct": 1.628 * (2.0 / paths as f64).sqrt(),
    });
    Ok(CheckOutput { report: finish("develop-law", 11, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 12. Group lift
// ---------------------------------------------------------------------------

/// Criterion 12: orthogonality, law of `g_Tε₁` against `θ_T`, and tail
/// convergence of `g_tε₁` on an integrable metric.
pub fn group_lift(p: &CheckParams) -> Result<CheckOutput> {
    let d = p.d.unwrap_or(3);
    let sigma = p.sigma.unwrap_or(1.0);
    let dt = p.dt.unwrap_or(1e-2);
    let horizon = p.horizon.unwrap_or(20.0);
    let paths = p.paths.unwrap_or(2000);
    let m = model_space(ModelSpace::Polynomial { beta: 3.0 })?;
    let scheme = p.scheme(dt)?;
    let polar0 = PolarState::standard(d, 1.0, 0.0);
    let lift0 = GroupLiftState::from_polar(&polar0)?;
    let lifted = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, k);
        let run = kbm::simulate_group_lift(&m, d, sigma, horizon, scheme, 10, &mut s, &lift0)?;
        let th: Vec<Vec<f64>> = run.trajectory.states.iter().map(|st| st.theta()).collect();
        let osc = stats::cauchy_sup(&run.trajectory.times, &th, TAIL_START);
        Ok((th.last().cloned().unwrap_or_default(), run.max_orthogonality_drift, osc))
    })?;
    let direct = ensemble(paths, |k| {
        let mut s = NoiseStream::new(p.seed, STREAM_BLOCK + k);
        Ok(kbm::simulate_polar(&m, d, sigma, horizon, scheme, 1000, &mut s, &polar0)?.trajectory.last().theta.clone())
    })?;
    let drift = lifted.iter().map(|l| l.1).fold(0.0, f64::max);
    let mut comps = vec![Component::at_most("max_orthogonality_drift", drift, kbm::ORTHOGONALITY_DRIFT_LIMIT)];
    for i in 0..d {
        let a: Vec<f64> = lifted.iter().map(|l| l.0[i]).collect();
        let b: Vec<f64> = direct.iter().map(|t| t[i]).collect();
        comps.push(Component::at_most(&format!("ks_coordinate_{}", i + 1), stats::ks_two_sample(&a, &b)?, 0.05));
    }
    let osc: Vec<f64> = lifted.iter().map(|l| l.2).collect();
    comps.push(Component::at_most("median_tail_oscillation", stats::median(&osc), 0.1));
    let integrability = m.integrability_report(d, 1e3)?;
    let rows = lifted.iter().zip(&direct).enumerate().map(|(k, (l, t))| {
        let mut r = vec![k as f64];
        r.extend(&l.0);
        r.extend(t);
        r.push(l.2);
        r
    }).collect();
    let mut header = vec!["path".to_string()];
    header.extend((1..=d).map(|i| format!("g_e1_{i}")));
    header.extend((1..=d).map(|i| format!("theta_{i}")));
    header.push("tail_oscillation".into());
    let table = DataTable { name: "group_lift".into(), header, rows };
    let details = serde_json::json!({ "integrability": integrability, "tail_start": TAIL_START });
    Ok(CheckOutput { report: finish("group-lift", 12, paths, dt, p.seed, comps, details), tables: vec![table] })
}

// ---------------------------------------------------------------------------
// 13. Determinism, merging and projection
// ---------------------------------------------------------------------------

/// Criterion 13: byte-identical reruns and thread-count independence,
/// associativity of summary merges, and idempotence of the state projection.
pub fn determinism(p: &CheckParams) -> Result<CheckOutput> {
    let m = model_space(ModelSpace::Hyperbolic)?;
    let scheme = p.scheme(p.dt.unwrap_or(1e-3))?;
    let init = PolarState::standard(3, 1.0, 0.2);
    let run_bytes = |k: u64| -> Result<Vec<u8>> {
        let mut s = NoiseStream::new(p.seed, k);
        kbm::simulate_polar(&m, 3, 1.0, 1.0, scheme, 7, &mut s, &init)?.trajectory.csv_bytes()
    };
    let a = run_bytes(0)?;
    let b = run_bytes(0)?;
    let mut mismatches = usize::from(a != b);
    let pooled = |threads: usize| -> Result<Vec<Vec<u8>>> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::State(e.to_string()))?;
        pool.install(|| ensemble(8, run_bytes))
    };
    let (one, three) = (pooled(1)?, pooled(3)?);
    mismatches += one.iter().zip(&three).filter(|(x, y)| x != y).count();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p.seed ^ 0x3e26_e000);
    let chunk = |rng: &mut rand_chacha::ChaCha8Rng, n: usize, shift: f64| -> Result<(EnsembleSummary, Vec<[f64; 2]>)> {
        let mut s = EnsembleSummary::new(2);
        let mut raw = Vec::new();
        for _ in 0..n {
            let x = [shift + rng.random::<f64>() * 10.0, (rng.random::<f64>() - 0.5).powi(3) * 1e3];
            s.push(&x)?;
            raw.push(x);
        }
        Ok((s, raw))
    };
    let (sa, ra) = chunk(&mut rng, 1000, 0.0)?;
    let (sb, rb) = chunk(&mut rng, 37, 1e3)?;
    let (sc, rc) = chunk(&mut rng, 500, -5.0)?;
    let mut left = sa.clone();
    left.merge(&sb)?;
    left.merge(&sc)?;
    let mut bc = sb.clone();
    bc.merge(&sc)?;
    let mut right = sa.clone();
    right.merge(&bc)?;
    let mut all = EnsembleSummary::new(2);
    for x in ra.iter().chain(&rb).chain(&rc) {
        all.push(x)?;
    }
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1e-300);
    let mut merge_err = 0.0f64;
    for i in 0..2 {
        for other in [&right, &all] {
            merge_err = merge_err.max(rel(left.mean[i], other.mean[i])).max(rel(left.variance(i), other.variance(i)));
        }
    }

    let sys = kbm::PolarSystem { metric: &m, d: 3, sigma: 1.0 };
    let mut idem = 0.0f64;
    for _ in 0..1000 {
        let mut x: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        x[0] = 1.0 + 4.0 * x[0].abs();
        x[1] *= 0.99;
        sys.project(&mut x);
        let once = x.clone();
        sys.project(&mut x);
        idem = idem.max(once.iter().zip(&x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max));
    }
    let comps = vec![
        Component::at_most("rerun_and_thread_mismatches", mismatches as f64, 0.0),
        Component::at_most("merge_relative_error", merge_err, 1e-10),
        Component::at_most("projection_idempotence", idem, 1e-15),
    ];
    let details = serde_json::json!({ "csv_sha256": io::sha256_hex(&a), "compared_paths": 8 });
    Ok(CheckOutput { report: finish("determinism", 13, 8, scheme.dt, p.seed, comps, details), tables: vec![] })
}
