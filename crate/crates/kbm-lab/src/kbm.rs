//! Simulators for kinetic Brownian motion and its derived processes.
//!
//! * Euclidean kinetic Brownian motion `(x, ẋ)` in `ℝ^d`.
//! * The polar system `(r, ṙ, θ, v)` on a warped product, with the clocks
//!   `C_t = ∫√(1−ṙ²)/f(r) ds` and `D_t = σ²∫(1−ṙ²) ds`.
//! * The autonomous radial pair `(r, ṙ)`.
//! * The hyperbolic half-plane system `(x, y, ẋ, ẏ)`.
//! * The `SO(d−1) × SO(d)` lift `(r, ṙ, b, g)`.
//!
//! Every simulator is a pure function of its parameters and its
//! [`NoiseStream`], records every `stride`-th step, and stops with an error
//! rather than returning a truncated trajectory.

use crate::error::{Error, Result};
use crate::geometry::{clamp_rdot, WarpedMetric, RDOT_CLAMP};
use crate::io;
use crate::numerics::{self, dot, normalize, orthogonalize_against};
use crate::sde::{self, NoiseStream, SchemeKind, SdeSystem, StepScheme, StepWorkspace};
use nalgebra::DMatrix;
use serde::Serialize;

/// Tolerance for unit-vector and orthogonality invariants.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Position and unit velocity of Euclidean kinetic Brownian motion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclideanState {
    pub x: Vec<f64>,
    pub xdot: Vec<f64>,
}

impl EuclideanState {
    /// Start at the origin with velocity `ε₁`.
    pub fn at_origin(d: usize) -> Self {
        let mut xdot = vec![0.0; d];
        xdot[0] = 1.0;
        EuclideanState { x: vec![0.0; d], xdot }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.xdot.len() {
            return Err(Error::State("position and velocity dimensions differ".into()));
        }
        let n = numerics::norm(&self.xdot);
        if (n - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::State(format!("|xdot| = {n} is not 1")));
        }
        Ok(())
    }
}

/// State of the polar system: radius, radial speed and the unit vectors `θ`
/// and `v = θ̇/|θ̇|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarState {
    pub r: f64,
    pub rdot: f64,
    pub theta: Vec<f64>,
    pub v: Vec<f64>,
}

impl PolarState {
    /// State with `θ = ε₁`, `v = ε₂`.
    pub fn standard(d: usize, r: f64, rdot: f64) -> Self {
        let mut theta = vec![0.0; d];
        let mut v = vec![0.0; d];
        theta[0] = 1.0;
        v[1] = 1.0;
        PolarState { r, rdot, theta, v }
    }

    pub fn validate(&self, metric: &WarpedMetric) -> Result<()> {
        if self.theta.len() != self.v.len() || self.theta.len() < 2 {
            return Err(Error::State("theta and v must share a dimension ≥ 2".into()));
        }
        if !(self.r > 0.0) {
            return Err(Error::State(format!("radius {} must be positive", self.r)));
        }
        clamp_rdot(self.rdot)?;
        let nt = numerics::norm(&self.theta);
        let nv = numerics::norm(&self.v);
        let ip = dot(&self.theta, &self.v);
        if (nt - 1.0).abs() > STATE_TOLERANCE || (nv - 1.0).abs() > STATE_TOLERANCE || ip.abs() > STATE_TOLERANCE {
            return Err(Error::State(format!("|theta| = {nt}, |v| = {nv}, <theta, v> = {ip}")));
        }
        let speed = (1.0 - self.rdot * self.rdot).max(0.0).sqrt() / metric.f(self.r)?;
        if !speed.is_finite() {
            return Err(Error::State("angular speed is not finite".into()));
        }
        Ok(())
    }

    /// `|θ̇| = √(1 − ṙ²)/f(r)`.
    pub fn angular_speed(&self, metric: &WarpedMetric) -> Result<f64> {
        Ok((1.0 - self.rdot * self.rdot).max(0.0).sqrt() / metric.f(self.r)?)
    }
}

/// The radial pair `(r, ṙ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialState {
    pub r: f64,
    pub rdot: f64,
}

/// Half-plane state stored as `(x, ln y, ẋ/y, ẏ/y)`.
///
/// Heights decay exponentially, so the logarithm is stored; `y`, `ẋ` and `ẏ`
/// are available through accessors. The unit-speed constraint reads
/// `a² + u² = 1` with `a = ẋ/y`, `u = ẏ/y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicPlaneState {
    pub x: f64,
    pub log_y: f64,
    pub a: f64,
    pub u: f64,
}

impl HyperbolicPlaneState {
    /// State at `(x, y)` with Euclidean velocity `(ẋ, ẏ)`; the velocity must
    /// have hyperbolic length one.
    pub fn new(x: f64, y: f64, xdot: f64, ydot: f64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::State(format!("height y = {y} must be positive")));
        }
        let s = HyperbolicPlaneState { x, log_y: y.ln(), a: xdot / y, u: ydot / y };
        s.validate()?;
        Ok(s)
    }

    pub fn y(&self) -> f64 {
        self.log_y.exp()
    }

    pub fn xdot(&self) -> f64 {
        self.a * self.y()
    }

    pub fn ydot(&self) -> f64 {
        self.u * self.y()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.a * self.a + self.u * self.u;
        if (s - 1.0).abs() > STATE_TOLERANCE || !self.x.is_finite() || !self.log_y.is_finite() {
            return Err(Error::State(format!("(xdot² + ydot²)/y² = {s}")));
        }
        Ok(())
    }
}

/// State of the group lift: radial pair plus `b ∈ SO(d−1)` (fixing `ε₁`)
/// and `g ∈ SO(d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLiftState {
    pub r: f64,
    pub rdot: f64,
    pub b: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

impl GroupLiftState {
    /// Lift of a polar state: `b = I` and `g` with `gε₁ = θ`, `gε₂ = v`.
    pub fn from_polar(p: &PolarState) -> Result<Self> {
        let d = p.theta.len();
        let mut cols: Vec<Vec<f64>> = vec![p.theta.clone(), p.v.clone()];
        for k in 0..d {
            if cols.len() == d {
                break;
            }
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            for c in &cols {
                orthogonalize_against(&mut e, c);
            }
            for c in &cols {
                orthogonalize_against(&mut e, c);
            }
            if numerics::norm(&e) > 1e-6 {
                normalize(&mut e);
                cols.push(e);
            }
        }
        let mut g = DMatrix::from_fn(d, d, |i, j| cols[j][i]);
        if g.determinant() < 0.0 {
            let last = d - 1;
            for i in 0..d {
                g[(i, last)] = -g[(i, last)];
            }
        }
        let s = GroupLiftState { r: p.r, rdot: p.rdot, b: DMatrix::identity(d, d), g };
        s.validate(1e-8)?;
        Ok(s)
    }

    /// `θ = gε₁`.
    pub fn theta(&self) -> Vec<f64> {
        self.g.column(0).iter().copied().collect()
    }

    /// Frame `e = g·b`.
    pub fn frame(&self) -> DMatrix<f64> {
        &self.g * &self.b
    }

    /// `v = g·b·ε₂`.
    pub fn v(&self) -> Vec<f64> {
        self.frame().column(1).iter().copied().collect()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let (db, dg) = (numerics::orthogonality_defect(&self.b), numerics::orthogonality_defect(&self.g));
        let (detb, detg) = (self.b.determinant(), self.g.determinant());
        if db > tol || dg > tol || (detb - 1.0).abs() > tol || (detg - 1.0).abs() > tol {
            return Err(Error::State(format!(
                "group matrices off SO(d): |bᵀb−I| = {db:e}, |gᵀg−I| = {dg:e}, det b = {detb}, det g = {detg}"
            )));
        }
        let d = self.b.nrows();
        for i in 0..d {
            let target = if i == 0 { 1.0 } else { 0.0 };
            if self.b[(i, 0)] != target || self.b[(0, i)] != target {
                return Err(Error::State("b must fix ε₁".into()));
            }
        }
        Ok(())
    }
}

/// Access to the radial pair of any polar-type state.
pub trait RadialView {
    fn r(&self) -> f64;
    fn rdot(&self) -> f64;
}

impl RadialView for PolarState {
    fn r(&self) -> f64 {
        self.r
    }
    fn rdot(&self) -> f64 {
        self.rdot
    }
}

impl RadialView for RadialState {
    fn r(&self) -> f64 {
        self.r
    }
    fn rdot(&self) -> f64 {
        self.rdot
    }
}

impl RadialView for GroupLiftState {
    fn r(&self) -> f64 {
        self.r
    }
    fn rdot(&self) -> f64 {
        self.rdot
    }
}

/// Clock values on the recording grid, plus optional time-changed series.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClockRecord {
    pub times: Vec<f64>,
    /// `C_t = ∫√(1−ṙ²)/f(r) ds`.
    pub c: Vec<f64>,
    /// `D_t = σ²∫(1−ṙ²) ds`.
    pub d: Vec<f64>,
    /// Uniform grid of the new clock `D`.
    pub rho_times: Vec<f64>,
    /// `ρ_t = r_{D⁻¹(t)}`.
    pub rho: Vec<f64>,
    /// `ρ̇_t = ṙ_{D⁻¹(t)}`.
    pub rhodot: Vec<f64>,
    /// `u_t = σ̃ρ_t + ρ̇_t` with `σ̃ = (d−1)σ²/2`.
    pub u: Vec<f64>,
}

/// A recorded path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub dt: f64,
    pub stride: usize,
    pub seed: u64,
    pub path_index: u64,
    /// SHA-256 of the simulation parameters.
    pub fingerprint: String,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectories hold at least one sample")
    }

    /// Final recorded time.
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Checks that timestamps increase strictly.
    pub fn check_times(&self) -> Result<()> {
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("timestamps must increase strictly".into()));
        }
        Ok(())
    }
}

/// CSV layout of a state type.
pub trait CsvState {
    /// Column names after `t`.
    fn header(&self) -> Vec<String>;
    /// Values in header order.
    fn values(&self, out: &mut Vec<f64>);
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

fn indexed2(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).flat_map(move |i| (1..=n).map(move |j| format!("{prefix}_{i}{j}")))
}

impl CsvState for EuclideanState {
    fn header(&self) -> Vec<String> {
        let d = self.x.len();
        indexed("x", d).chain(indexed("xdot", d)).collect()
    }
    fn values(&self, out: &mut Vec<f64>) {
        out.extend(&self.x);
        out.extend(&self.xdot);
    }
}

impl CsvState for PolarState {
    fn header(&self) -> Vec<String> {
        let d = self.theta.len();
        ["r".to_string(), "rdot".to_string()].into_iter().chain(indexed("theta", d)).chain(indexed("v", d)).collect()
    }
    fn values(&self, out: &mut Vec<f64>) {
        out.push(self.r);
        out.push(self.rdot);
        out.extend(&self.theta);
        out.extend(&self.v);
    }
}

impl CsvState for RadialState {
    fn header(&self) -> Vec<String> {
        vec!["r".into(), "rdot".into()]
    }
    fn values(&self, out: &mut Vec<f64>) {
        out.push(self.r);
        out.push(self.rdot);
    }
}

impl CsvState for HyperbolicPlaneState {
    fn header(&self) -> Vec<String> {
        ["x", "y", "xdot", "ydot", "log_y", "u"].iter().map(|s| s.to_string()).collect()
    }
    fn values(&self, out: &mut Vec<f64>) {
        out.extend([self.x, self.y(), self.xdot(), self.ydot(), self.log_y, self.u]);
    }
}

impl CsvState for GroupLiftState {
    fn header(&self) -> Vec<String> {
        let d = self.b.nrows();
        ["r".to_string(), "rdot".to_string()].into_iter().chain(indexed2("b", d)).chain(indexed2("g", d)).collect()
    }
    fn values(&self, out: &mut Vec<f64>) {
        out.push(self.r);
        out.push(self.rdot);
        let d = self.b.nrows();
        for m in [&self.b, &self.g] {
            for i in 0..d {
                for j in 0..d {
                    out.push(m[(i, j)]);
                }
            }
        }
    }
}

impl<S: CsvState> Trajectory<S> {
    /// Header row `t, …` of the CSV representation.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        if let Some(s) = self.states.first() {
            h.extend(s.header());
        }
        h
    }

    fn csv_rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.times.iter().zip(&self.states).map(|(t, s)| {
            let mut row = vec![*t];
            s.values(&mut row);
            row
        })
    }

    /// CSV representation as bytes.
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        io::table_bytes(&self.csv_header(), self.csv_rows())
    }

    /// Writes the trajectory as CSV.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        io::write_table(path, &self.csv_header(), self.csv_rows())
    }
}

#[derive(Serialize)]
struct Fingerprint<'a> {
    simulator: &'a str,
    metric: Option<String>,
    d: usize,
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    seed: u64,
    path_index: u64,
}

struct Grid {
    steps: u64,
    stride: usize,
}

impl Grid {
    fn new(horizon: f64, scheme: StepScheme, stride: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::ParameterDomain { name: "horizon", value: horizon, reason: "must be positive" });
        }
        if stride == 0 {
            return Err(Error::ParameterDomain { name: "stride", value: 0.0, reason: "must be at least 1" });
        }
        let steps = (horizon / scheme.dt).round().max(1.0) as u64;
        Ok(Grid { steps, stride })
    }

    fn records(&self, k: u64) -> bool {
        k % self.stride as u64 == 0 || k == self.steps
    }

    fn capacity(&self) -> usize {
        (self.steps / self.stride as u64) as usize + 2
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::ParameterDomain { name: "sigma", value: sigma, reason: "must be non-negative" });
    }
    Ok(())
}

fn check_polar_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::ParameterDomain {
            name: "d",
            value: d as f64,
            reason: "polar, radial and lift simulators need d ≥ 3; d = 2 is served by the half-plane simulator",
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Euclidean kinetic Brownian motion
// ---------------------------------------------------------------------------

/// `dẋ = −σ²(d−1)/2·ẋ dt + σ(I − ẋẋᵀ)dW`, `dx = ẋ dt` on the flat state `[x, ẋ]`.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanSystem {
    pub d: usize,
    pub sigma: f64,
}

impl SdeSystem for EuclideanSystem {
    fn state_dim(&self) -> usize {
        2 * self.d
    }
    fn noise_dim(&self) -> usize {
        self.d
    }
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let d = self.d;
        let c = -0.5 * self.sigma * self.sigma * (d as f64 - 1.0);
        for i in 0..d {
            out[i] = s[d + i];
            out[d + i] = c * s[d + i];
        }
    }
    fn diffusion(&self, s: &[f64], out: &mut [f64]) {
        let d = self.d;
        for (i, o) in out[..d * d].iter_mut().enumerate() {
            let _ = i;
            *o = 0.0;
        }
        let v = &s[d..];
        for i in 0..d {
            for j in 0..d {
                let delta = if i == j { 1.0 } else { 0.0 };
                out[(d + i) * d + j] = self.sigma * (delta - v[i] * v[j]);
            }
        }
    }
    fn stratonovich_drift(&self, s: &[f64], out: &mut [f64]) {
        let d = self.d;
        for i in 0..d {
            out[i] = s[d + i];
            out[d + i] = 0.0;
        }
    }
    fn project(&self, s: &mut [f64]) {
        normalize(&mut s[self.d..]);
    }
}

/// Simulates Euclidean kinetic Brownian motion on `[0, T]`.
pub fn simulate_euclidean(
    d: usize,
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    stream: &mut NoiseStream,
    initial: &EuclideanState,
) -> Result<Trajectory<EuclideanState>> {
    check_sigma(sigma)?;
    if d < 2 || initial.x.len() != d {
        return Err(Error::ParameterDomain { name: "d", value: d as f64, reason: "dimension must be ≥ 2 and match the state" });
    }
    initial.validate()?;
    let grid = Grid::new(horizon, scheme, stride)?;
    let sys = EuclideanSystem { d, sigma };
    let mut ws = StepWorkspace::for_system(&sys);
    let mut x: Vec<f64> = initial.x.iter().chain(&initial.xdot).copied().collect();
    let mut dz = vec![0.0; d];
    let fingerprint = io::fingerprint(&Fingerprint {
        simulator: "euclidean",
        metric: None,
        d,
        sigma,
        horizon,
        scheme,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
    });
    let mut traj = Trajectory {
        times: Vec::with_capacity(grid.capacity()),
        states: Vec::with_capacity(grid.capacity()),
        dt: scheme.dt,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
        fingerprint,
    };
    let snap = |x: &[f64]| EuclideanState { x: x[..d].to_vec(), xdot: x[d..].to_vec() };
    traj.times.push(0.0);
    traj.states.push(snap(&x));
    for k in 1..=grid.steps {
        stream.fill_increments(&mut dz, scheme.dt);
        sde::step(&sys, scheme, &mut x, &dz, k, &mut ws)?;
        if grid.records(k) {
            traj.times.push(k as f64 * scheme.dt);
            traj.states.push(snap(&x));
        }
    }
    Ok(traj)
}

/// Rescaled path `X^σ_t = x_{σ²t}` on `t ∈ [0, 1]` by index re-mapping.
///
/// Recorded times are divided by `σ²` and samples beyond rescaled time 1 are
/// dropped, so no interpolation error is introduced.
pub fn rescale_interpolation(traj: &Trajectory<EuclideanState>, sigma: f64) -> Result<Trajectory<EuclideanState>> {
    if !(sigma > 0.0) {
        return Err(Error::ParameterDomain { name: "sigma", value: sigma, reason: "rescaling needs σ > 0" });
    }
    let s2 = sigma * sigma;
    let tol = 1e-9 * s2.max(1.0);
    if traj.horizon() + tol < s2 {
        return Err(Error::Range(format!("horizon {} is shorter than σ² = {s2}", traj.horizon())));
    }
    let mut out = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        dt: traj.dt / s2,
        stride: traj.stride,
        seed: traj.seed,
        path_index: traj.path_index,
        fingerprint: traj.fingerprint.clone(),
    };
    for (t, s) in traj.times.iter().zip(&traj.states) {
        if *t <= s2 + tol {
            out.times.push((t / s2).min(1.0));
            out.states.push(s.clone());
        }
    }
    Ok(out)
}

/// Rescaled path sampled on the uniform grid `k/n`, `k = 0..=n`, by linear
/// interpolation between recorded samples. Velocities are taken from the
/// preceding sample.
pub fn rescale_on_grid(traj: &Trajectory<EuclideanState>, sigma: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    let r = rescale_interpolation(traj, sigma)?;
    if n == 0 {
        return Err(Error::Input("grid must have at least one interval".into()));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut j = 0;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        while j + 1 < r.times.len() && r.times[j + 1] < t {
            j += 1;
        }
        if j + 1 >= r.times.len() {
            out.push(r.states[j].x.clone());
            continue;
        }
        let (t0, t1) = (r.times[j], r.times[j + 1]);
        let w = if t1 > t0 { ((t - t0) / (t1 - t0)).clamp(0.0, 1.0) } else { 0.0 };
        let p: Vec<f64> = r.states[j].x.iter().zip(&r.states[j + 1].x).map(|(a, b)| a + w * (b - a)).collect();
        out.push(p);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Polar and radial systems
// ---------------------------------------------------------------------------

/// The polar system on the flat state `[r, ṙ, θ, v]` driven by `[B, W]`.
#[derive(Debug, Clone, Copy)]
pub struct PolarSystem<'a> {
    pub metric: &'a WarpedMetric,
    pub d: usize,
    pub sigma: f64,
}

impl PolarSystem<'_> {
    #[inline]
    fn parts(&self, s: &[f64]) -> (f64, f64, f64, f64, f64) {
        let (r, rd) = (s[0], s[1].clamp(-1.0 + RDOT_CLAMP, 1.0 - RDOT_CLAMP));
        let jet = self.metric.log_jet_unchecked(r);
        let om = 1.0 - rd * rd;
        let alpha = om.sqrt() * (-jet.ln_f).exp();
        (rd, om, jet.log_derivative, alpha, s[1])
    }
}

impl SdeSystem for PolarSystem<'_> {
    fn state_dim(&self) -> usize {
        2 + 2 * self.d
    }
    fn noise_dim(&self) -> usize {
        1 + self.d
    }
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let d = self.d;
        let s2 = self.sigma * self.sigma;
        let (rd, om, l, alpha, raw) = self.parts(s);
        out[0] = raw;
        out[1] = -0.5 * s2 * (d as f64 - 1.0) * rd + l * om;
        let damping = 0.5 * s2 * (d as f64 - 2.0) / om;
        let (th, v) = (&s[2..2 + d], &s[2 + d..2 + 2 * d]);
        for i in 0..d {
            out[2 + i] = alpha * v[i];
            out[2 + d + i] = -alpha * th[i] - damping * v[i];
        }
    }
    fn diffusion(&self, s: &[f64], out: &mut [f64]) {
        let d = self.d;
        let m = 1 + d;
        out.iter_mut().for_each(|o| *o = 0.0);
        let (_, om, _, _, _) = self.parts(s);
        out[m] = self.sigma * om.sqrt();
        let scale = self.sigma / om.sqrt();
        let (th, v) = (&s[2..2 + d], &s[2 + d..2 + 2 * d]);
        for i in 0..d {
            for j in 0..d {
                let delta = if i == j { 1.0 } else { 0.0 };
                out[(2 + d + i) * m + 1 + j] = scale * (delta - th[i] * th[j] - v[i] * v[j]);
            }
        }
    }
    fn project(&self, s: &mut [f64]) {
        let d = self.d;
        s[1] = s[1].clamp(-1.0 + RDOT_CLAMP, 1.0 - RDOT_CLAMP);
        let (head, v) = s.split_at_mut(2 + d);
        let th = &mut head[2..];
        normalize(th);
        for _ in 0..3 {
            orthogonalize_against(v, th);
            normalize(v);
        }
    }
}

/// The radial pair `[r, ṙ]` driven by the scalar `B`.
#[derive(Debug, Clone, Copy)]
pub struct RadialSystem<'a> {
    pub metric: &'a WarpedMetric,
    pub d: usize,
    pub sigma: f64,
}

impl SdeSystem for RadialSystem<'_> {
    fn state_dim(&self) -> usize {
        2
    }
    fn noise_dim(&self) -> usize {
        1
    }
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let rd = s[1].clamp(-1.0, 1.0);
        let l = self.metric.log_jet_unchecked(s[0]).log_derivative;
        out[0] = s[1];
        out[1] = -0.5 * self.sigma * self.sigma * (self.d as f64 - 1.0) * rd + l * (1.0 - rd * rd);
    }
    fn diffusion(&self, s: &[f64], out: &mut [f64]) {
        let rd = s[1].clamp(-1.0, 1.0);
        out[0] = 0.0;
        out[1] = self.sigma * (1.0 - rd * rd).sqrt();
    }
    fn stratonovich_drift(&self, s: &[f64], out: &mut [f64]) {
        self.drift(s, out);
        let rd = s[1].clamp(-1.0, 1.0);
        out[1] += 0.5 * self.sigma * self.sigma * rd;
    }
    fn project(&self, s: &mut [f64]) {
        s[1] = s[1].clamp(-1.0 + RDOT_CLAMP, 1.0 - RDOT_CLAMP);
    }
}

/// Logarithms of both sides of the exponential identity for `f²(r)(1 − ṙ²)`
/// along a polar run.
///
/// The right-hand side is
/// `ln f²(r₀)(1−ṙ₀²) − σ²t + (d−3)σ²∫ṙ²/(1−ṙ²)ds − 2σ∫ṙ/√(1−ṙ²)dB`,
/// with the stochastic integral taken as a left-point sum over the steps
/// and the time integral by the trapezoid rule.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IdentityTrace {
    pub times: Vec<f64>,
    pub log_lhs: Vec<f64>,
    pub log_rhs: Vec<f64>,
}

impl IdentityTrace {
    /// Largest `|exp(lhs − rhs) − 1|` over the recorded times.
    pub fn max_relative_error(&self) -> f64 {
        self.log_lhs.iter().zip(&self.log_rhs).map(|(a, b)| ((a - b).exp() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Relative error at the final time.
    pub fn terminal_relative_error(&self) -> f64 {
        match (self.log_lhs.last(), self.log_rhs.last()) {
            (Some(a), Some(b)) => ((a - b).exp() - 1.0).abs(),
            _ => 0.0,
        }
    }
}

/// Output of [`simulate_polar`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarRun {
    pub trajectory: Trajectory<PolarState>,
    pub clocks: ClockRecord,
    pub identity: IdentityTrace,
    /// Smallest `1 − ṙ²` over all steps.
    pub min_one_minus_rdot2: f64,
}

/// Output of [`simulate_radial`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialRun {
    pub trajectory: Trajectory<RadialState>,
    pub clocks: ClockRecord,
}

struct ClockAccumulator {
    c: f64,
    d: f64,
    prev_c_rate: f64,
    prev_d_rate: f64,
    sigma2: f64,
}

impl ClockAccumulator {
    fn rates(metric: &WarpedMetric, sigma2: f64, r: f64, rdot: f64) -> (f64, f64) {
        let om = (1.0 - rdot * rdot).max(0.0);
        (om.sqrt() * (-metric.log_jet_unchecked(r).ln_f).exp(), sigma2 * om)
    }

    fn new(metric: &WarpedMetric, sigma: f64, r: f64, rdot: f64) -> Self {
        let s2 = sigma * sigma;
        let (a, b) = Self::rates(metric, s2, r, rdot);
        ClockAccumulator { c: 0.0, d: 0.0, prev_c_rate: a, prev_d_rate: b, sigma2: s2 }
    }

    fn advance(&mut self, metric: &WarpedMetric, r: f64, rdot: f64, dt: f64) {
        let (a, b) = Self::rates(metric, self.sigma2, r, rdot);
        self.c += 0.5 * dt * (a + self.prev_c_rate);
        self.d += 0.5 * dt * (b + self.prev_d_rate);
        self.prev_c_rate = a;
        self.prev_d_rate = b;
    }
}

fn check_radius(metric: &WarpedMetric, r: f64, t: f64) -> Result<()> {
    if !(r > metric.domain_min()) {
        return Err(Error::DomainExit { time: t, r });
    }
    Ok(())
}

/// Largest step, as a fraction of the current radius, taken near the pole.
///
/// Since `|ṙ| ≤ 1`, a step of length `h ≤ POLE_STEP_FRACTION·r` shrinks the
/// radius by at most that fraction, so discretized paths cannot jump across
/// the origin.
pub const POLE_STEP_FRACTION: f64 = 0.1;

/// Upper bound on the number of substeps of one grid step.
pub const MAX_POLE_SUBSTEPS: usize = 1 << 20;

/// Number of equal substeps of the grid step at radius `r` and the scheme
/// for one substep. Substeps draw their own Gaussian increments.
fn pole_substeps(r: f64, scheme: StepScheme) -> (usize, StepScheme) {
    let m = pole_substep_count(scheme.dt, r);
    if m == 1 {
        return (1, scheme);
    }
    (m, StepScheme { kind: scheme.kind, dt: scheme.dt / m as f64 })
}

/// Number of equal pieces of a step of length `h` at radius `r` such that
/// each piece moves at most `POLE_STEP_FRACTION·r`.
pub fn pole_substep_count(h: f64, r: f64) -> usize {
    let limit = POLE_STEP_FRACTION * r;
    if h <= limit {
        1
    } else {
        ((h / limit).ceil() as usize).clamp(1, MAX_POLE_SUBSTEPS)
    }
}

fn substep_time(k: u64, j: usize, m: usize, dt: f64) -> f64 {
    (k - 1) as f64 * dt + (j + 1) as f64 * dt / m as f64
}

/// Simulates the polar system with clocks and the identity trace.
pub fn simulate_polar(
    metric: &WarpedMetric,
    d: usize,
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    stream: &mut NoiseStream,
    initial: &PolarState,
) -> Result<PolarRun> {
    check_sigma(sigma)?;
    check_polar_dim(d)?;
    if initial.theta.len() != d {
        return Err(Error::State(format!("initial state has dimension {} instead of {d}", initial.theta.len())));
    }
    initial.validate(metric)?;
    let grid = Grid::new(horizon, scheme, stride)?;
    let sys = PolarSystem { metric, d, sigma };
    let mut ws = StepWorkspace::for_system(&sys);
    let mut x: Vec<f64> = [initial.r, initial.rdot].into_iter().chain(initial.theta.iter().copied()).chain(initial.v.iter().copied()).collect();
    sys.project(&mut x);
    let mut dz = vec![0.0; 1 + d];
    let fingerprint = io::fingerprint(&Fingerprint {
        simulator: "polar",
        metric: Some(metric.tag()),
        d,
        sigma,
        horizon,
        scheme,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
    });
    let cap = grid.capacity();
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        dt: scheme.dt,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
        fingerprint,
    };
    let mut clocks = ClockRecord::default();
    let mut identity = IdentityTrace::default();
    let snap = |x: &[f64]| PolarState { r: x[0], rdot: x[1], theta: x[2..2 + d].to_vec(), v: x[2 + d..].to_vec() };
    let s2 = sigma * sigma;
    let log_y = |x: &[f64]| 2.0 * metric.log_jet_unchecked(x[0]).ln_f + (1.0 - x[1] * x[1]).ln();
    let log_y0 = log_y(&x);
    let mut acc = ClockAccumulator::new(metric, sigma, x[0], x[1]);
    let mut int_sq = 0.0;
    let mut int_db = 0.0;
    let ratio = |rd: f64| rd * rd / (1.0 - rd * rd);
    let mut prev_ratio = ratio(x[1]);
    let mut min_om = 1.0 - x[1] * x[1];
    let mut push = |t: f64, x: &[f64], acc: &ClockAccumulator, int_sq: f64, int_db: f64, traj: &mut Trajectory<PolarState>| {
        traj.times.push(t);
        traj.states.push(snap(x));
        clocks.times.push(t);
        clocks.c.push(acc.c);
        clocks.d.push(acc.d);
        identity.times.push(t);
        identity.log_lhs.push(log_y(x));
        identity.log_rhs.push(log_y0 - s2 * t + (d as f64 - 3.0) * s2 * int_sq - 2.0 * sigma * int_db);
    };
    push(0.0, &x, &acc, int_sq, int_db, &mut traj);
    for k in 1..=grid.steps {
        let (m, sub) = pole_substeps(x[0], scheme);
        for j in 0..m {
            stream.fill_increments(&mut dz, sub.dt);
            let rd = x[1];
            int_db += rd / (1.0 - rd * rd).sqrt() * dz[0];
            sde::step(&sys, sub, &mut x, &dz, k, &mut ws)?;
            check_radius(metric, x[0], substep_time(k, j, m, scheme.dt))?;
            acc.advance(metric, x[0], x[1], sub.dt);
            let q = ratio(x[1]);
            int_sq += 0.5 * sub.dt * (q + prev_ratio);
            prev_ratio = q;
            min_om = min_om.min(1.0 - x[1] * x[1]);
        }
        let t = k as f64 * scheme.dt;
        if grid.records(k) {
            push(t, &x, &acc, int_sq, int_db, &mut traj);
        }
    }
    Ok(PolarRun { trajectory: traj, clocks, identity, min_one_minus_rdot2: min_om })
}

/// Simulates the autonomous radial pair `(r, ṙ)`.
pub fn simulate_radial(
    metric: &WarpedMetric,
    d: usize,
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    stream: &mut NoiseStream,
    initial: &RadialState,
) -> Result<RadialRun> {
    check_sigma(sigma)?;
    check_polar_dim(d)?;
    if !(initial.r > metric.domain_min()) {
        return Err(Error::State(format!("initial radius {} is outside the domain", initial.r)));
    }
    clamp_rdot(initial.rdot)?;
    let grid = Grid::new(horizon, scheme, stride)?;
    let sys = RadialSystem { metric, d, sigma };
    let mut ws = StepWorkspace::for_system(&sys);
    let mut x = vec![initial.r, initial.rdot];
    sys.project(&mut x);
    let mut dz = [0.0];
    let fingerprint = io::fingerprint(&Fingerprint {
        simulator: "radial",
        metric: Some(metric.tag()),
        d,
        sigma,
        horizon,
        scheme,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
    });
    let cap = grid.capacity();
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        dt: scheme.dt,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
        fingerprint,
    };
    let mut clocks = ClockRecord::default();
    let mut acc = ClockAccumulator::new(metric, sigma, x[0], x[1]);
    let mut push = |t: f64, x: &[f64], acc: &ClockAccumulator, traj: &mut Trajectory<RadialState>| {
        traj.times.push(t);
        traj.states.push(RadialState { r: x[0], rdot: x[1] });
        clocks.times.push(t);
        clocks.c.push(acc.c);
        clocks.d.push(acc.d);
    };
    push(0.0, &x, &acc, &mut traj);
    for k in 1..=grid.steps {
        let (m, sub) = pole_substeps(x[0], scheme);
        for j in 0..m {
            stream.fill_increments(&mut dz, sub.dt);
            sde::step(&sys, sub, &mut x, &dz, k, &mut ws)?;
            check_radius(metric, x[0], substep_time(k, j, m, scheme.dt))?;
            acc.advance(metric, x[0], x[1], sub.dt);
        }
        let t = k as f64 * scheme.dt;
        if grid.records(k) {
            push(t, &x, &acc, &mut traj);
        }
    }
    Ok(RadialRun { trajectory: traj, clocks })
}

/// Clocks recomputed from recorded samples by the trapezoid rule, with the
/// time-changed series `ρ`, `ρ̇` and `u` on a uniform grid of `n_grid`
/// intervals of the new clock `D`.
pub fn compute_clocks<S: RadialView>(
    traj: &Trajectory<S>,
    metric: &WarpedMetric,
    sigma: f64,
    d: usize,
    n_grid: usize,
) -> ClockRecord {
    let s2 = sigma * sigma;
    let mut rec = ClockRecord { times: traj.times.clone(), ..Default::default() };
    let rates = |s: &S| ClockAccumulator::rates(metric, s2, s.r(), s.rdot());
    let (mut c, mut dd) = (0.0, 0.0);
    let mut prev = rates(&traj.states[0]);
    rec.c.push(0.0);
    rec.d.push(0.0);
    for k in 1..traj.len() {
        let h = traj.times[k] - traj.times[k - 1];
        let cur = rates(&traj.states[k]);
        c += 0.5 * h * (cur.0 + prev.0);
        dd += 0.5 * h * (cur.1 + prev.1);
        rec.c.push(c);
        rec.d.push(dd);
        prev = cur;
    }
    let tilde = 0.5 * (d as f64 - 1.0) * s2;
    if n_grid > 0 && dd > 0.0 {
        let mut j = 0;
        for k in 0..=n_grid {
            let target = dd * k as f64 / n_grid as f64;
            while j + 1 < rec.d.len() && rec.d[j + 1] < target {
                j += 1;
            }
            let (r, rdot) = if j + 1 < rec.d.len() {
                let (d0, d1) = (rec.d[j], rec.d[j + 1]);
                let w = if d1 > d0 { ((target - d0) / (d1 - d0)).clamp(0.0, 1.0) } else { 0.0 };
                let (a, b) = (&traj.states[j], &traj.states[j + 1]);
                (a.r() + w * (b.r() - a.r()), a.rdot() + w * (b.rdot() - a.rdot()))
            } else {
                let a = traj.last();
                (a.r(), a.rdot())
            };
            rec.rho_times.push(target);
            rec.rho.push(r);
            rec.rhodot.push(rdot);
            rec.u.push(tilde * r + rdot);
        }
    }
    rec
}

// ---------------------------------------------------------------------------
// Hyperbolic half-plane
// ---------------------------------------------------------------------------

/// Half-plane system on `[x, ln y, a, u]` driven by one Brownian motion.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicPlaneSystem {
    pub sigma: f64,
}

impl SdeSystem for HyperbolicPlaneSystem {
    fn state_dim(&self) -> usize {
        4
    }
    fn noise_dim(&self) -> usize {
        1
    }
    fn drift(&self, s: &[f64], out: &mut [f64]) {
        let h = 0.5 * self.sigma * self.sigma;
        let (a, u) = (s[2], s[3]);
        out[0] = a * s[1].exp();
        out[1] = u;
        out[2] = a * u - h * a;
        out[3] = -a * a - h * u;
    }
    fn diffusion(&self, s: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = self.sigma * s[3];
        out[3] = -self.sigma * s[2];
    }
    fn stratonovich_drift(&self, s: &[f64], out: &mut [f64]) {
        let (a, u) = (s[2], s[3]);
        out[0] = a * s[1].exp();
        out[1] = u;
        out[2] = a * u;
        out[3] = -a * a;
    }
    fn project(&self, s: &mut [f64]) {
        normalize(&mut s[2..4]);
    }
}

/// Output of [`simulate_hyperbolic_plane`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicPlaneRun {
    pub trajectory: Trajectory<HyperbolicPlaneState>,
    /// Number of recorded samples whose height underflows to zero in `f64`.
    pub underflow_flags: usize,
}

/// Simulates the half-plane system; `u_t = ẏ/y` is the last state component.
pub fn simulate_hyperbolic_plane(
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    stream: &mut NoiseStream,
    initial: &HyperbolicPlaneState,
) -> Result<HyperbolicPlaneRun> {
    check_sigma(sigma)?;
    initial.validate()?;
    let grid = Grid::new(horizon, scheme, stride)?;
    let sys = HyperbolicPlaneSystem { sigma };
    let mut ws = StepWorkspace::for_system(&sys);
    let mut x = [initial.x, initial.log_y, initial.a, initial.u];
    let mut dz = [0.0];
    let fingerprint = io::fingerprint(&Fingerprint {
        simulator: "hyperbolic_plane",
        metric: Some("hyperbolic".into()),
        d: 2,
        sigma,
        horizon,
        scheme,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
    });
    let cap = grid.capacity();
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        dt: scheme.dt,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
        fingerprint,
    };
    let mut flags = 0;
    let snap = |x: &[f64; 4]| HyperbolicPlaneState { x: x[0], log_y: x[1], a: x[2], u: x[3] };
    traj.times.push(0.0);
    traj.states.push(snap(&x));
    for k in 1..=grid.steps {
        stream.fill_increments(&mut dz, scheme.dt);
        sde::step(&sys, scheme, &mut x, &dz, k, &mut ws)?;
        if grid.records(k) {
            if x[1].exp() == 0.0 {
                flags += 1;
            }
            traj.times.push(k as f64 * scheme.dt);
            traj.states.push(snap(&x));
        }
    }
    Ok(HyperbolicPlaneRun { trajectory: traj, underflow_flags: flags })
}

// ---------------------------------------------------------------------------
// SO(d−1) × SO(d) lift
// ---------------------------------------------------------------------------

/// `H₀ = ε₂⊗ε₁ − ε₁⊗ε₂`, so that `H₀ε₁ = ε₂` and `H₀ε₂ = −ε₁`.
pub fn generator_h0(d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    m[(1, 0)] = 1.0;
    m[(0, 1)] = -1.0;
    m
}

/// `V_j = ε₂⊗ε_j − ε_j⊗ε₂` for `j ≥ 3` (1-based), rotating the `(ε₂, ε_j)` plane.
pub fn generator_v(d: usize, j: usize) -> DMatrix<f64> {
    assert!((3..=d).contains(&j), "V_j needs 3 ≤ j ≤ d");
    let mut m = DMatrix::zeros(d, d);
    m[(1, j - 1)] = 1.0;
    m[(j - 1, 1)] = -1.0;
    m
}

/// Output of [`simulate_group_lift`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLiftRun {
    pub trajectory: Trajectory<GroupLiftState>,
    /// Largest orthogonality defect of `b` or `g` observed before reprojection.
    pub max_orthogonality_drift: f64,
    /// Largest orthogonality defect of recorded matrices.
    pub max_recorded_defect: f64,
}

/// Threshold on the pre-reprojection orthogonality defect.
pub const ORTHOGONALITY_DRIFT_LIMIT: f64 = 1e-6;

/// Simulates the lift `(r, ṙ, b, g)`.
///
/// The radial pair follows the radial system under `scheme`. The matrix
/// factors advance by Cayley transforms of their Lie-algebra increments,
/// evaluated at the start of each step:
/// `b ← b·cay(σ√β(ṙ) Σ_j V_j ΔB^j)` with `β = 1/(1 − ṙ²)`, and
/// `g ← g·cay(α·b H₀ bᵀ·dt)` with `α = √(1 − ṙ²)/f(r)`. The Cayley map agrees
/// with the exponential to second order, which makes the `b` update
/// consistent with the Stratonovich equation. Both factors are then
/// reprojected by polar decomposition.
pub fn simulate_group_lift(
    metric: &WarpedMetric,
    d: usize,
    sigma: f64,
    horizon: f64,
    scheme: StepScheme,
    stride: usize,
    stream: &mut NoiseStream,
    initial: &GroupLiftState,
) -> Result<GroupLiftRun> {
    check_sigma(sigma)?;
    check_polar_dim(d)?;
    if initial.b.nrows() != d || initial.g.nrows() != d {
        return Err(Error::State("group matrices must be d × d".into()));
    }
    initial.validate(1e-8)?;
    clamp_rdot(initial.rdot)?;
    let grid = Grid::new(horizon, scheme, stride)?;
    let radial = RadialSystem { metric, d, sigma };
    let mut ws = StepWorkspace::for_system(&radial);
    let mut rs = vec![initial.r, initial.rdot];
    radial.project(&mut rs);
    let mut b = initial.b.clone();
    let mut g = initial.g.clone();
    let h0 = generator_h0(d);
    let vs: Vec<DMatrix<f64>> = (3..=d).map(|j| generator_v(d, j)).collect();
    let mut dz = vec![0.0; d - 1];
    let fingerprint = io::fingerprint(&Fingerprint {
        simulator: "group_lift",
        metric: Some(metric.tag()),
        d,
        sigma,
        horizon,
        scheme,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
    });
    let cap = grid.capacity();
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        dt: scheme.dt,
        stride,
        seed: stream.seed(),
        path_index: stream.path_index(),
        fingerprint,
    };
    traj.times.push(0.0);
    traj.states.push(GroupLiftState { r: rs[0], rdot: rs[1], b: b.clone(), g: g.clone() });
    let mut max_drift: f64 = 0.0;
    let mut max_rec = numerics::orthogonality_defect(&b).max(numerics::orthogonality_defect(&g));
    let mut omega = DMatrix::zeros(d, d);
    for k in 1..=grid.steps {
        let (m, sub) = pole_substeps(rs[0], scheme);
        let dt = sub.dt;
        for j in 0..m {
            stream.fill_increments(&mut dz, dt);
            let (r, rd) = (rs[0], rs[1]);
            let om = 1.0 - rd * rd;
            let alpha = om.sqrt() * (-metric.log_jet_unchecked(r).ln_f).exp();
            let noise_scale = sigma / om.sqrt();
            omega.fill(0.0);
            for (vj, dbj) in vs.iter().zip(&dz[1..]) {
                omega += vj * (noise_scale * dbj);
            }
            let rot_g = &b * &h0 * b.transpose() * (alpha * dt);
            let mut b_new = &b * numerics::cayley(&omega)?;
            let mut g_new = &g * numerics::cayley(&rot_g)?;
            let drift = numerics::orthogonality_defect(&b_new).max(numerics::orthogonality_defect(&g_new));
            if !drift.is_finite() || drift > ORTHOGONALITY_DRIFT_LIMIT {
                return Err(Error::Numerical(format!("orthogonality drift {drift:e} before reprojection at step {k}")));
            }
            max_drift = max_drift.max(drift);
            numerics::reproject_orthogonal(&mut b_new)?;
            numerics::reproject_orthogonal(&mut g_new)?;
            // b fixes ε₁ exactly.
            for i in 0..d {
                let target = if i == 0 { 1.0 } else { 0.0 };
                b_new[(i, 0)] = target;
                b_new[(0, i)] = target;
            }
            b = b_new;
            g = g_new;
            sde::step(&radial, sub, &mut rs, &dz[..1], k, &mut ws)?;
            check_radius(metric, rs[0], substep_time(k, j, m, scheme.dt))?;
        }
        let t = k as f64 * scheme.dt;
        if grid.records(k) {
            max_rec = max_rec.max(numerics::orthogonality_defect(&b)).max(numerics::orthogonality_defect(&g));
            traj.times.push(t);
            traj.states.push(GroupLiftState { r: rs[0], rdot: rs[1], b: b.clone(), g: g.clone() });
        }
    }
    Ok(GroupLiftRun { trajectory: traj, max_orthogonality_drift: max_drift, max_recorded_defect: max_rec })
}

/// Scheme kind used by the simulators when the caller does not choose one.
pub const DEFAULT_SCHEME: SchemeKind = SchemeKind::ItoEulerProject;
