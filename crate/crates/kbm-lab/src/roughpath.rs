//! Level-2 rough paths: the canonical lift of sampled paths, Chen
//! concatenation, Hölder moment diagnostics and a step-2 Euler solver for
//! rough differential equations.
//!
//! A [`Level2Path`] stores, for every grid time `t`, the increment
//! `X_{t,0} = x_t − x_0` and the iterated integral `𝕏_{t,0} = ∫₀ᵗ X_{s,0} ⊗ dX_s`
//! of the piecewise-linear interpolant. Increments between arbitrary grid
//! times follow from Chen's relation.

use crate::error::{Error, Result};
use crate::io;
use crate::stats::{fit_line, FitReport};
use serde::Serialize;
use std::path::Path;

/// A level-2 rough path sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level2Path {
    times: Vec<f64>,
    d: usize,
    x: Vec<Vec<f64>>,
    xx: Vec<Vec<f64>>,
    gamma: f64,
}

/// Nominal Hölder exponent used when none is given.
pub const DEFAULT_GAMMA: f64 = 0.45;

fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Input("time grid contains non-finite values".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("time grid must increase strictly".into()));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0 / 3.0 && gamma <= 0.5) {
        return Err(Error::ParameterDomain { name: "gamma", value: gamma, reason: "Hölder exponent must lie in (1/3, 1/2]" });
    }
    Ok(())
}

/// Adds `scale·a⊗b` to the row-major `d×d` tensor `out`.
#[inline]
fn add_outer(out: &mut [f64], a: &[f64], b: &[f64], scale: f64) {
    let d = a.len();
    for i in 0..d {
        let ai = scale * a[i];
        if ai != 0.0 {
            for j in 0..d {
                out[i * d + j] += ai * b[j];
            }
        }
    }
}

/// Exact level-2 lift of the piecewise-linear interpolant of `samples`.
///
/// Each interval contributes `X_prev ⊗ ΔX + ½ ΔX ⊗ ΔX` to `𝕏`.
pub fn lift_level2(times: &[f64], samples: &[Vec<f64>], gamma: f64) -> Result<Level2Path> {
    if samples.len() < 2 || times.len() != samples.len() {
        return Err(Error::Input(format!(
            "a lift needs at least 2 samples with matching times, got {} samples and {} times",
            samples.len(),
            times.len()
        )));
    }
    check_grid(times)?;
    check_gamma(gamma)?;
    let d = samples[0].len();
    if d == 0 || samples.iter().any(|s| s.len() != d) {
        return Err(Error::Input("all samples must share a positive dimension".into()));
    }
    let n = samples.len();
    let mut x = Vec::with_capacity(n);
    let mut xx = Vec::with_capacity(n);
    x.push(vec![0.0; d]);
    xx.push(vec![0.0; d * d]);
    let mut delta = vec![0.0; d];
    for k in 1..n {
        let prev_x: &Vec<f64> = &x[k - 1];
        for i in 0..d {
            delta[i] = samples[k][i] - samples[k - 1][i];
        }
        let cur_x: Vec<f64> = prev_x.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let mut cur = xx[k - 1].clone();
        add_outer(&mut cur, prev_x, &delta, 1.0);
        add_outer(&mut cur, &delta, &delta, 0.5);
        x.push(cur_x);
        xx.push(cur);
    }
    Ok(Level2Path { times: times.to_vec(), d, x, xx, gamma })
}

/// Concatenates lifts over `[s, u]` and `[u, t]` by Chen's relation:
/// `X = X_a + X_b` and `𝕏 = 𝕏_a + 𝕏_b + X_a ⊗ X_b`.
pub fn chen_combine(a: &Level2Path, b: &Level2Path) -> Result<Level2Path> {
    if a.d != b.d {
        return Err(Error::Input("cannot combine rough paths of different dimension".into()));
    }
    let (ua, ub) = (a.end_time(), b.start_time());
    if (ua - ub).abs() > 1e-12 * ua.abs().max(1.0) {
        return Err(Error::Input(format!("segments do not meet: first ends at {ua}, second starts at {ub}")));
    }
    let d = a.d;
    let xa = a.x.last().expect("non-empty");
    let xxa = a.xx.last().expect("non-empty");
    let mut out = a.clone();
    for k in 1..b.times.len() {
        out.times.push(b.times[k]);
        out.x.push(xa.iter().zip(&b.x[k]).map(|(p, q)| p + q).collect());
        let mut m: Vec<f64> = xxa.iter().zip(&b.xx[k]).map(|(p, q)| p + q).collect();
        add_outer(&mut m, xa, &b.x[k], 1.0);
        out.xx.push(m);
    }
    debug_assert_eq!(out.x[0].len(), d);
    Ok(out)
}

impl Level2Path {
    /// Lift of a constant path on the single time `t`.
    pub fn trivial(t: f64, d: usize, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Level2Path { times: vec![t], d, x: vec![vec![0.0; d]], xx: vec![vec![0.0; d * d]], gamma })
    }

    /// Rebuilds a path from stored values; the Chen and symmetry invariants
    /// are checked to `tol`.
    pub fn from_parts(times: Vec<f64>, x: Vec<Vec<f64>>, xx: Vec<Vec<f64>>, gamma: f64, tol: f64) -> Result<Self> {
        check_grid(&times)?;
        check_gamma(gamma)?;
        if times.is_empty() || x.len() != times.len() || xx.len() != times.len() {
            return Err(Error::Input("times, X and XX must have equal non-zero length".into()));
        }
        let d = x[0].len();
        if x.iter().any(|v| v.len() != d) || xx.iter().any(|m| m.len() != d * d) {
            return Err(Error::Input("inconsistent rough-path dimensions".into()));
        }
        let p = Level2Path { times, d, x, xx, gamma };
        for k in 0..p.len() {
            let e = p.symmetry_defect(0, k);
            if e > tol {
                return Err(Error::Input(format!("symmetric part violates Sym(𝕏) = ½X⊗X by {e:e} at sample {k}")));
            }
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// `X_{t_k, t_0}`.
    pub fn x(&self, k: usize) -> &[f64] {
        &self.x[k]
    }

    /// `𝕏_{t_k, t_0}` in row-major order.
    pub fn xx(&self, k: usize) -> &[f64] {
        &self.xx[k]
    }

    /// Increments `(X_{ts}, 𝕏_{ts})` between grid indices `s ≤ t`, using
    /// `𝕏_{ts} = 𝕏_{t0} − 𝕏_{s0} − X_{s0} ⊗ X_{ts}`.
    pub fn increment(&self, s: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
        let xts: Vec<f64> = self.x[t].iter().zip(&self.x[s]).map(|(a, b)| a - b).collect();
        let mut m: Vec<f64> = self.xx[t].iter().zip(&self.xx[s]).map(|(a, b)| a - b).collect();
        add_outer(&mut m, &self.x[s], &xts, -1.0);
        (xts, m)
    }

    /// Restriction to grid indices `s..=t`, re-based to start at zero.
    pub fn segment(&self, s: usize, t: usize) -> Result<Level2Path> {
        if s > t || t >= self.len() {
            return Err(Error::Range(format!("segment {s}..={t} outside 0..{}", self.len())));
        }
        let mut out = Level2Path {
            times: self.times[s..=t].to_vec(),
            d: self.d,
            x: Vec::with_capacity(t - s + 1),
            xx: Vec::with_capacity(t - s + 1),
            gamma: self.gamma,
        };
        for k in s..=t {
            let (a, b) = self.increment(s, k);
            out.x.push(a);
            out.xx.push(b);
        }
        Ok(out)
    }

    /// Antisymmetric part `½(𝕏 − 𝕏ᵀ)` of `𝕏_{t_k, t_0}`, row-major.
    pub fn levy_area(&self, k: usize) -> Vec<f64> {
        let d = self.d;
        let m = &self.xx[k];
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = 0.5 * (m[i * d + j] - m[j * d + i]);
            }
        }
        a
    }

    /// Projection onto the listed coordinates. The lift of a projected path
    /// is the projection of the lift, so this is exact.
    pub fn project(&self, coords: &[usize]) -> Result<Level2Path> {
        if coords.is_empty() || coords.iter().any(|&c| c >= self.d) {
            return Err(Error::Input(format!("projection coordinates {coords:?} outside 0..{}", self.d)));
        }
        let d = self.d;
        let e = coords.len();
        let x = self.x.iter().map(|v| coords.iter().map(|&c| v[c]).collect()).collect();
        let xx = self
            .xx
            .iter()
            .map(|m| {
                let mut o = Vec::with_capacity(e * e);
                for &i in coords {
                    for &j in coords {
                        o.push(m[i * d + j]);
                    }
                }
                o
            })
            .collect();
        Ok(Level2Path { times: self.times.clone(), d: e, x, xx, gamma: self.gamma })
    }

    /// Relative defect of Chen's relation on the grid triple `s ≤ u ≤ t`.
    ///
    /// Defects are measured against the largest term entering the
    /// evaluation, including the cumulative values the increments are formed
    /// from, so cancelling paths are not judged against a vanishing scale.
    pub fn chen_defect(&self, s: usize, u: usize, t: usize) -> f64 {
        let (xus, mus) = self.increment(s, u);
        let (xtu, mtu) = self.increment(u, t);
        let (_, mts) = self.increment(s, t);
        let mut rhs: Vec<f64> = mus.iter().zip(&mtu).map(|(a, b)| a + b).collect();
        add_outer(&mut rhs, &xus, &xtu, 1.0);
        let scale = mts.iter().chain(&mus).chain(&mtu).fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = scale.max(self.operand_scale(s, u)).max(self.operand_scale(u, t)).max(self.operand_scale(s, t)).max(1e-300);
        mts.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale
    }

    /// Largest term in the evaluation of the second-level increment over
    /// `[s, t]` from the stored cumulative values, which bounds its rounding.
    fn operand_scale(&self, s: usize, t: usize) -> f64 {
        let big = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let x_s = big(&self.x[s]);
        let x_ts = self.x[t].iter().zip(&self.x[s]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        big(&self.xx[t]).max(big(&self.xx[s])).max(x_s * x_ts)
    }

    /// Relative defect of `Sym(𝕏_{ts}) = ½ X_{ts} ⊗ X_{ts}`.
    pub fn symmetry_defect(&self, s: usize, t: usize) -> f64 {
        let d = self.d;
        let (x, m) = self.increment(s, t);
        let mut worst = 0.0f64;
        let mut scale = 1e-300f64;
        for i in 0..d {
            for j in 0..d {
                let sym = 0.5 * (m[i * d + j] + m[j * d + i]);
                let target = 0.5 * x[i] * x[j];
                worst = worst.max((sym - target).abs());
                scale = scale.max(target.abs()).max(m[i * d + j].abs());
            }
        }
        worst / scale.max(self.operand_scale(s, t))
    }

    /// CSV header `t, X_1..X_d, XX_11..XX_dd`.
    pub fn csv_header(&self) -> Vec<String> {
        let d = self.d;
        let mut h = vec!["t".to_string()];
        h.extend((1..=d).map(|i| format!("X_{i}")));
        h.extend((1..=d).flat_map(|i| (1..=d).map(move |j| format!("XX_{i}{j}"))));
        h
    }

    /// Writes the path as CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = (0..self.len()).map(|k| {
            let mut r = Vec::with_capacity(1 + self.d + self.d * self.d);
            r.push(self.times[k]);
            r.extend(&self.x[k]);
            r.extend(&self.xx[k]);
            r
        });
        io::write_table(path, &self.csv_header(), rows)
    }

    /// Reads a path written by [`Level2Path::write_csv`].
    pub fn read_csv(path: &Path, gamma: f64) -> Result<Self> {
        let (header, rows) = io::read_table(path)?;
        let n = header.len();
        let d = (1..=n).find(|d| 1 + d + d * d == n).ok_or_else(|| Error::Input(format!("{n} columns do not form a level-2 path")))?;
        let times = rows.iter().map(|r| r[0]).collect();
        let x = rows.iter().map(|r| r[1..1 + d].to_vec()).collect();
        let xx = rows.iter().map(|r| r[1 + d..].to_vec()).collect();
        Level2Path::from_parts(times, x, xx, gamma, 1e-9)
    }
}

/// Moment-scaling and Hölder seminorm estimates over an ensemble of lifts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderDiagnostics {
    /// Moment order `q`.
    pub q: u32,
    /// Dyadic lags `|t − s|`, finest last.
    pub lags: Vec<f64>,
    /// Number of `(path, pair)` samples behind each lag.
    pub samples_per_lag: Vec<usize>,
    /// `E|X_{ts}|^q` per lag.
    pub first_level_moments: Vec<f64>,
    /// `E|𝕏_{ts}|^q` per lag (Frobenius norm).
    pub second_level_moments: Vec<f64>,
    /// Log-log fit of the first-level moments against the lag.
    pub first_level_fit: FitReport,
    /// Log-log fit of the second-level moments against the lag.
    pub second_level_fit: FitReport,
    /// Ensemble mean of `max |X_{ts}|/|t−s|^γ` over the dyadic pairs.
    pub first_level_seminorm: f64,
    /// Ensemble mean of `max |𝕏_{ts}|/|t−s|^{2γ}` over the dyadic pairs.
    pub second_level_seminorm: f64,
    /// Nominal exponent `γ`.
    pub gamma: f64,
}

/// Minimum ensemble size for [`holder_diagnostics`].
pub const MIN_HOLDER_ENSEMBLE: usize = 100;

/// Estimates `E|X_{ts}|^q` and `E|𝕏_{ts}|^q` on dyadic pairs and fits the
/// log-log slopes.
///
/// Level `j` uses the lag of `⌊n/2^j⌋` grid steps with consecutive
/// non-overlapping pairs, at most `pair_budget` per path and level. Levels
/// whose lag would drop below one grid step are skipped.
pub fn holder_diagnostics(ensemble: &[Level2Path], q: u32, pair_budget: usize) -> Result<HolderDiagnostics> {
    if ![2, 4, 6].contains(&q) {
        return Err(Error::ParameterDomain { name: "q", value: q as f64, reason: "moment order must be 2, 4 or 6" });
    }
    if ensemble.len() < MIN_HOLDER_ENSEMBLE {
        return Err(Error::Statistics(format!(
            "Hölder diagnostics need at least {MIN_HOLDER_ENSEMBLE} paths, got {}",
            ensemble.len()
        )));
    }
    if pair_budget == 0 {
        return Err(Error::ParameterDomain { name: "pair_budget", value: 0.0, reason: "must be at least 1" });
    }
    let n = ensemble[0].len() - 1;
    if ensemble.iter().any(|p| p.len() != n + 1) || n < 4 {
        return Err(Error::Input("ensemble paths must share a grid with at least 4 intervals".into()));
    }
    let gamma = ensemble[0].gamma;
    let times = &ensemble[0].times;
    let mut lags_steps = Vec::new();
    let mut j = 1;
    while n >> j >= 1 && j <= 30 {
        lags_steps.push(n >> j);
        j += 1;
    }
    lags_steps.dedup();
    let qf = q as f64;
    let mut lags = Vec::new();
    let mut counts = Vec::new();
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let mut semi1 = vec![0.0f64; ensemble.len()];
    let mut semi2 = vec![0.0f64; ensemble.len()];
    for &h in &lags_steps {
        let pairs = (n / h).min(pair_budget);
        let (mut s1, mut s2, mut cnt) = (0.0, 0.0, 0usize);
        let mut lag_time = 0.0;
        for (p_idx, path) in ensemble.iter().enumerate() {
            for k in 0..pairs {
                let (s, t) = (k * h, (k + 1) * h);
                let (x, m) = path.increment(s, t);
                let dtime = times[t] - times[s];
                lag_time += dtime;
                let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let nm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
                s1 += nx.powf(qf);
                s2 += nm.powf(qf);
                semi1[p_idx] = semi1[p_idx].max(nx / dtime.powf(gamma));
                semi2[p_idx] = semi2[p_idx].max(nm / dtime.powf(2.0 * gamma));
                cnt += 1;
            }
        }
        lags.push(lag_time / cnt as f64);
        counts.push(cnt);
        m1.push(s1 / cnt as f64);
        m2.push(s2 / cnt as f64);
    }
    let log = |v: &[f64]| v.iter().map(|x| x.max(1e-300).ln()).collect::<Vec<_>>();
    let ll = log(&lags);
    let first_level_fit = fit_line(&ll, &log(&m1))?;
    let second_level_fit = fit_line(&ll, &log(&m2))?;
    let k = ensemble.len() as f64;
    Ok(HolderDiagnostics {
        q,
        lags,
        samples_per_lag: counts,
        first_level_moments: m1,
        second_level_moments: m2,
        first_level_fit,
        second_level_fit,
        first_level_seminorm: semi1.iter().sum::<f64>() / k,
        second_level_seminorm: semi2.iter().sum::<f64>() / k,
        gamma,
    })
}

/// Vector fields `A_1, …, A_ℓ` on `ℝ^n` driving `dy = A_k(y) dX^k`.
pub trait VectorFields {
    /// Dimension `n` of the state.
    fn state_dim(&self) -> usize;
    /// Number `ℓ` of driving coordinates.
    fn driver_dim(&self) -> usize;
    /// Writes `A_k(y)` into `out[k·n..(k+1)·n]` for every `k`.
    fn fields(&self, y: &[f64], out: &mut [f64]);
    /// Directional derivative `DA_k(y)[w]`.
    ///
    /// The default is a central finite difference with step `1e-6·max(1, |y|)/|w|`.
    fn field_derivative(&self, y: &[f64], k: usize, w: &[f64], out: &mut [f64]) {
        let n = self.state_dim();
        let l = self.driver_dim();
        let wn = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if wn == 0.0 {
            out[..n].iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let yn = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = FD_STEP * yn.max(1.0) / wn;
        let mut plus = vec![0.0; n * l];
        let mut minus = vec![0.0; n * l];
        let yp: Vec<f64> = y.iter().zip(w).map(|(a, b)| a + h * b).collect();
        let ym: Vec<f64> = y.iter().zip(w).map(|(a, b)| a - h * b).collect();
        self.fields(&yp, &mut plus);
        self.fields(&ym, &mut minus);
        for i in 0..n {
            out[i] = (plus[k * n + i] - minus[k * n + i]) / (2.0 * h);
        }
    }
    /// Optional projection applied after every step.
    fn project(&self, _y: &mut [f64]) {}
    /// Number of equal pieces into which a driver increment of Euclidean
    /// norm `size` is split at state `y`. The default is one.
    fn substeps(&self, _y: &[f64], _size: f64) -> usize {
        1
    }
}

/// Finite-difference step of the default field derivative.
pub const FD_STEP: f64 = 1e-6;

/// States of an RDE solution on the solver grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Step-2 Euler scheme
/// `y ← y + A_k(y) X^k_{ts} + DA_k(y)[A_j(y)] 𝕏^{jk}_{ts}`.
///
/// Each solver step spans `substep` consecutive driver intervals (the last
/// step may be shorter) and uses the Chen increment over that span.
pub fn solve_rde_step2<V: VectorFields + ?Sized>(
    fields: &V,
    driver: &Level2Path,
    y0: &[f64],
    substep: usize,
) -> Result<RdeSolution> {
    let n = fields.state_dim();
    let l = fields.driver_dim();
    if y0.len() != n {
        return Err(Error::Input(format!("initial state has length {} instead of {n}", y0.len())));
    }
    if driver.dim() != l {
        return Err(Error::Input(format!("driver has dimension {} but the fields expect {l}", driver.dim())));
    }
    if substep == 0 {
        return Err(Error::ParameterDomain { name: "substep", value: 0.0, reason: "must be at least 1" });
    }
    let mut y = y0.to_vec();
    fields.project(&mut y);
    let mut sol = RdeSolution { times: vec![driver.start_time()], states: vec![y.clone()] };
    let mut a = vec![0.0; n * l];
    let mut da = vec![0.0; n];
    let mut upd = vec![0.0; n];
    let last = driver.len() - 1;
    let mut s = 0;
    let mut step = 0u64;
    while s < last {
        let t = (s + substep).min(last);
        let (mut x, mut m) = driver.increment(s, t);
        let pieces = fields.substeps(&y, x.iter().map(|v| v * v).sum::<f64>().sqrt());
        if pieces > 1 {
            // Chen-consistent split: `pieces` copies of
            // `(X/p, ½(X/p)⊗(X/p) + Anti(𝕏)/p)` multiply back to `(X, 𝕏)`.
            let p = pieces as f64;
            let anti: Vec<f64> = (0..l * l).map(|jk| 0.5 * (m[jk] - m[(jk % l) * l + jk / l])).collect();
            x.iter_mut().for_each(|v| *v /= p);
            for j in 0..l {
                for k in 0..l {
                    m[j * l + k] = 0.5 * x[j] * x[k] + anti[j * l + k] / p;
                }
            }
        }
        for _ in 0..pieces {
            fields.fields(&y, &mut a);
            upd.iter_mut().for_each(|u| *u = 0.0);
            for k in 0..l {
                if x[k] != 0.0 {
                    for i in 0..n {
                        upd[i] += a[k * n + i] * x[k];
                    }
                }
            }
            for j in 0..l {
                for k in 0..l {
                    let c = m[j * l + k];
                    if c != 0.0 {
                        fields.field_derivative(&y, k, &a[j * n..(j + 1) * n], &mut da);
                        for i in 0..n {
                            upd[i] += da[i] * c;
                        }
                    }
                }
            }
            for i in 0..n {
                y[i] += upd[i];
            }
            step += 1;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalBlowUp { step, detail: "RDE step produced a non-finite state".into() });
            }
            fields.project(&mut y);
        }
        sol.times.push(driver.times[t]);
        sol.states.push(y.clone());
        s = t;
    }
    Ok(sol)
}

/// Linear vector fields `A_k(y) = M_k y` with exact derivatives.
#[derive(Debug, Clone)]
pub struct LinearFields {
    /// Row-major `n×n` matrices.
    pub matrices: Vec<Vec<f64>>,
    pub n: usize,
}

impl VectorFields for LinearFields {
    fn state_dim(&self) -> usize {
        self.n
    }
    fn driver_dim(&self) -> usize {
        self.matrices.len()
    }
    fn fields(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (k, m) in self.matrices.iter().enumerate() {
            for i in 0..n {
                out[k * n + i] = (0..n).map(|j| m[i * n + j] * y[j]).sum();
            }
        }
    }
    fn field_derivative(&self, _y: &[f64], k: usize, w: &[f64], out: &mut [f64]) {
        let n = self.n;
        let m = &self.matrices[k];
        for i in 0..n {
            out[i] = (0..n).map(|j| m[i * n + j] * w[j]).sum();
        }
    }
}
