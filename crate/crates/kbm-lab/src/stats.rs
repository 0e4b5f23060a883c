//! Estimators turning limit statements into numerical pass/fail checks:
//! mergeable ensemble summaries, least-squares fits, Kolmogorov–Smirnov
//! distances, invariant densities of the radial speed, and the
//! trajectory-level diagnostics built on them.

use crate::error::{Error, Result};
use crate::kbm::{HyperbolicPlaneState, Trajectory};
use crate::numerics::{self, integrate};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

// ---------------------------------------------------------------------------
// Basic sample statistics
// ---------------------------------------------------------------------------

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance; `NaN` for fewer than two values.
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Median by sorting a copy; `NaN` for an empty slice.
pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

/// Linear-interpolation quantile of order `p ∈ [0, 1]`.
pub fn quantile(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}

// ---------------------------------------------------------------------------
// Ensemble summaries
// ---------------------------------------------------------------------------

/// Fixed-edge histogram shared by every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// `counts[i][b]` for coordinate `i` and bin `b`.
    pub counts: Vec<Vec<u64>>,
    pub underflow: Vec<u64>,
    pub overflow: Vec<u64>,
}

/// Mergeable per-coordinate moment accumulators with cross-covariances,
/// an optional histogram and range trackers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub count: u64,
    pub mean: Vec<f64>,
    /// Central moment sums `Σ(x − mean)^k` for `k = 2, 3, 4`.
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
    pub m4: Vec<f64>,
    /// Co-moment sums `Σ(x_i − mean_i)(x_j − mean_j)`, row-major.
    pub comoment: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// Largest `|x|` per coordinate.
    pub max_abs: Vec<f64>,
    pub histogram: Option<Histogram>,
    /// Number of merges folded into this summary.
    pub merges: u64,
}

impl EnsembleSummary {
    /// Empty summary over `dims` coordinates.
    pub fn new(dims: usize) -> Self {
        EnsembleSummary {
            count: 0,
            mean: vec![0.0; dims],
            m2: vec![0.0; dims],
            m3: vec![0.0; dims],
            m4: vec![0.0; dims],
            comoment: vec![0.0; dims * dims],
            min: vec![f64::INFINITY; dims],
            max: vec![f64::NEG_INFINITY; dims],
            max_abs: vec![0.0; dims],
            histogram: None,
            merges: 0,
        }
    }

    /// Empty summary with a `bins`-bin histogram on `[lo, hi)`.
    pub fn with_histogram(dims: usize, lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(hi > lo) || bins == 0 {
            return Err(Error::Input(format!("histogram needs lo < hi and bins ≥ 1, got [{lo}, {hi}) with {bins}")));
        }
        let mut s = Self::new(dims);
        s.histogram = Some(Histogram {
            lo,
            hi,
            counts: vec![vec![0; bins]; dims],
            underflow: vec![0; dims],
            overflow: vec![0; dims],
        });
        Ok(s)
    }

    pub fn dims(&self) -> usize {
        self.mean.len()
    }

    /// Adds one observation.
    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::Input(format!("observation has {} coordinates, expected {}", x.len(), self.dims())));
        }
        let mut single = EnsembleSummary { histogram: self.histogram.as_ref().map(empty_like), ..Self::new(self.dims()) };
        single.count = 1;
        single.mean.copy_from_slice(x);
        for (i, &v) in x.iter().enumerate() {
            single.min[i] = v;
            single.max[i] = v;
            single.max_abs[i] = v.abs();
            if let Some(h) = single.histogram.as_mut() {
                let bins = h.counts[i].len();
                if v < h.lo {
                    h.underflow[i] += 1;
                } else if v >= h.hi {
                    h.overflow[i] += 1;
                } else {
                    let b = (((v - h.lo) / (h.hi - h.lo)) * bins as f64) as usize;
                    h.counts[i][b.min(bins - 1)] += 1;
                }
            }
        }
        let merges = self.merges;
        self.merge(&single)?;
        self.merges = merges;
        Ok(())
    }

    /// Folds `other` into `self` using the pairwise update formulas for
    /// central moments.
    pub fn merge(&mut self, other: &EnsembleSummary) -> Result<()> {
        let d = self.dims();
        if other.dims() != d {
            return Err(Error::Input("cannot merge summaries of different dimension".into()));
        }
        match (&mut self.histogram, &other.histogram) {
            (Some(a), Some(b)) => {
                if a.lo != b.lo || a.hi != b.hi || a.counts[0].len() != b.counts[0].len() {
                    return Err(Error::Input("cannot merge histograms with different edges".into()));
                }
                for i in 0..d {
                    for (x, y) in a.counts[i].iter_mut().zip(&b.counts[i]) {
                        *x += y;
                    }
                    a.underflow[i] += b.underflow[i];
                    a.overflow[i] += b.overflow[i];
                }
            }
            (None, None) => {}
            _ => return Err(Error::Input("cannot merge a summary with a histogram into one without".into())),
        }
        if other.count == 0 {
            self.merges += 1 + other.merges;
            return Ok(());
        }
        if self.count == 0 {
            let h = self.histogram.take();
            let merges = self.merges;
            *self = other.clone();
            self.histogram = h;
            self.merges = merges + 1 + other.merges;
            return Ok(());
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta: Vec<f64> = (0..d).map(|i| other.mean[i] - self.mean[i]).collect();
        for i in 0..d {
            for j in 0..d {
                self.comoment[i * d + j] += other.comoment[i * d + j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for i in 0..d {
            let dl = delta[i];
            let (a2, a3, a4) = (self.m2[i], self.m3[i], self.m4[i]);
            let (b2, b3, b4) = (other.m2[i], other.m3[i], other.m4[i]);
            let m2 = a2 + b2 + dl * dl * na * nb / n;
            let m3 = a3 + b3 + dl.powi(3) * na * nb * (na - nb) / (n * n) + 3.0 * dl * (na * b2 - nb * a2) / n;
            let m4 = a4
                + b4
                + dl.powi(4) * na * nb * (na * na - na * nb + nb * nb) / n.powi(3)
                + 6.0 * dl * dl * (na * na * b2 + nb * nb * a2) / (n * n)
                + 4.0 * dl * (na * b3 - nb * a3) / n;
            self.mean[i] += dl * nb / n;
            self.m2[i] = m2;
            self.m3[i] = m3;
            self.m4[i] = m4;
            self.min[i] = self.min[i].min(other.min[i]);
            self.max[i] = self.max[i].max(other.max[i]);
            self.max_abs[i] = self.max_abs[i].max(other.max_abs[i]);
        }
        self.count += other.count;
        self.merges += 1 + other.merges;
        Ok(())
    }

    /// Unbiased variance of coordinate `i`.
    pub fn variance(&self, i: usize) -> f64 {
        self.m2[i] / (self.count as f64 - 1.0)
    }

    /// Unbiased covariance of coordinates `i` and `j`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.comoment[i * self.dims() + j] / (self.count as f64 - 1.0)
    }

    /// Standard error of the mean of coordinate `i`.
    pub fn std_error(&self, i: usize) -> f64 {
        (self.variance(i) / self.count as f64).sqrt()
    }

    /// Sample kurtosis `n·m4/m2²` of coordinate `i`.
    pub fn kurtosis(&self, i: usize) -> f64 {
        self.count as f64 * self.m4[i] / (self.m2[i] * self.m2[i])
    }

    /// Sample skewness `√n·m3/m2^{3/2}` of coordinate `i`.
    pub fn skewness(&self, i: usize) -> f64 {
        (self.count as f64).sqrt() * self.m3[i] / self.m2[i].powf(1.5)
    }

    /// Standard error of the sample variance of coordinate `i`, from the
    /// fourth central moment.
    pub fn variance_std_error(&self, i: usize) -> f64 {
        let n = self.count as f64;
        let s2 = self.m2[i] / n;
        let m4 = self.m4[i] / n;
        ((m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

fn empty_like(h: &Histogram) -> Histogram {
    let d = h.counts.len();
    Histogram { lo: h.lo, hi: h.hi, counts: vec![vec![0; h.counts[0].len()]; d], underflow: vec![0; d], overflow: vec![0; d] }
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Half-width of the 95% confidence interval for the slope; infinite
    /// when only two points are available.
    pub slope_half_width: f64,
    pub n: usize,
}

/// Fits `y ≈ intercept + slope·x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<FitReport> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::Statistics(format!("a line fit needs ≥ 2 matched points, got {n} and {}", y.len())));
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Statistics("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let residual_rms = (ss / n as f64).sqrt();
    let slope_half_width = if n > 2 {
        let dof = (n - 2) as f64;
        let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::Statistics(e.to_string()))?.inverse_cdf(0.975);
        t * (ss / dof / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    if !slope.is_finite() {
        return Err(Error::Statistics("line fit produced a non-finite slope".into()));
    }
    Ok(FitReport { slope, intercept, residual_rms, slope_half_width, n })
}

// ---------------------------------------------------------------------------
// Kolmogorov–Smirnov
// ---------------------------------------------------------------------------

/// Minimum sample count accepted by [`ks_distance`].
pub const MIN_KS_SAMPLES: usize = 50;

/// One-sample KS statistic `sup_x |F_n(x) − F(x)|` for sorted samples.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let n = sorted.len();
    if n < MIN_KS_SAMPLES {
        return Err(Error::Statistics(format!("KS distance needs ≥ {MIN_KS_SAMPLES} samples, got {n}")));
    }
    if sorted.iter().any(|x| x.is_nan()) {
        return Err(Error::Input("KS samples contain NaN".into()));
    }
    if sorted.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("KS samples must be sorted".into()));
    }
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    Ok(d.min(1.0))
}

/// Two-sample KS statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < MIN_KS_SAMPLES || b.len() < MIN_KS_SAMPLES {
        return Err(Error::Statistics(format!(
            "two-sample KS needs ≥ {MIN_KS_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Input("KS samples contain NaN".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic one-sample KS critical value `c(α)/√n` for `α ∈ {0.01, 0.05, 0.10}`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = if alpha <= 0.01 {
        1.628
    } else if alpha <= 0.05 {
        1.358
    } else {
        1.224
    };
    c / (n as f64).sqrt()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64, sd: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / (sd * std::f64::consts::SQRT_2))
}

// ---------------------------------------------------------------------------
// Invariant densities on (−1, 1)
// ---------------------------------------------------------------------------

/// Number of points of the tabulated CDF.
pub const DENSITY_GRID: usize = 10_000;

/// Normalized density `∝ (1 − x²)^{(k−3)/2} e^{κx}` on `(−1, 1)`.
///
/// With `x = sin φ` the weight becomes the smooth function
/// `cos^{k−2}φ · e^{κ sin φ}` on `[−π/2, π/2]`, so normalization and the
/// CDF table are computed in `φ`.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantDensity {
    /// Exponent parameter `k` (the dimension for the radial-speed law).
    pub k: f64,
    /// `κ = 2ℓ/σ²`.
    pub kappa: f64,
    /// Normalizing constant `Z` in the `x` variable.
    pub z: f64,
    /// `∫ x μ(dx)`.
    pub mean: f64,
    /// Uniform grid in `φ`.
    phi: Vec<f64>,
    cdf_table: Vec<f64>,
}

fn phi_weight(k: f64, kappa: f64, phi: f64) -> f64 {
    let c = phi.cos().max(0.0);
    let w = if k == 2.0 { 1.0 } else { c.powf(k - 2.0) };
    w * (kappa * phi.sin()).exp()
}

impl InvariantDensity {
    fn build(k: f64, kappa: f64) -> Result<Self> {
        use std::f64::consts::FRAC_PI_2;
        let tol = 1e-13;
        let z = integrate(|p| phi_weight(k, kappa, p), -FRAC_PI_2, FRAC_PI_2, 0.0, tol, 2000)?.value;
        let first = integrate(|p| p.sin() * phi_weight(k, kappa, p), -FRAC_PI_2, FRAC_PI_2, 1e-15 * z, tol, 2000)?.value;
        let n = DENSITY_GRID;
        let h = 2.0 * FRAC_PI_2 / (n - 1) as f64;
        let phi: Vec<f64> = (0..n).map(|i| -FRAC_PI_2 + i as f64 * h).collect();
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..n {
            acc += integrate(|p| phi_weight(k, kappa, p), phi[i - 1], phi[i], 0.0, tol, 50)?.value;
            cdf.push(acc / z);
        }
        let last = *cdf.last().unwrap_or(&1.0);
        for c in cdf.iter_mut() {
            *c /= last;
        }
        Ok(InvariantDensity { k, kappa, z, mean: first / z, phi, cdf_table: cdf })
    }

    /// Density value at `x ∈ (−1, 1)`; zero outside.
    pub fn density(&self, x: f64) -> f64 {
        if !(x > -1.0 && x < 1.0) {
            return 0.0;
        }
        (1.0 - x * x).powf((self.k - 3.0) / 2.0) * (self.kappa * x).exp() / self.z
    }

    /// CDF at `x`, linearly interpolated in `φ = asin x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let p = x.asin();
        let h = self.phi[1] - self.phi[0];
        let pos = (p - self.phi[0]) / h;
        let i = (pos.floor() as usize).min(self.phi.len() - 2);
        let w = pos - i as f64;
        self.cdf_table[i] + w * (self.cdf_table[i + 1] - self.cdf_table[i])
    }

    /// `∫ g(x) μ(dx)` by adaptive quadrature in `φ`.
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        use std::f64::consts::FRAC_PI_2;
        let v = integrate(|p| g(p.sin()) * phi_weight(self.k, self.kappa, p), -FRAC_PI_2, FRAC_PI_2, 1e-14, 1e-12, 2000)?;
        Ok(v.value / self.z)
    }
}

/// Stationary law `μ_ℓ ∝ (1 − x²)^{(d−3)/2} e^{2ℓx/σ²}` of the radial speed
/// when the log-derivative of the warping function is the constant `ℓ`.
pub fn invariant_density_mu_ell(ell: f64, sigma: f64, d: usize) -> Result<InvariantDensity> {
    if d < 3 {
        return Err(Error::ParameterDomain { name: "d", value: d as f64, reason: "the radial-speed law needs d ≥ 3" });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::ParameterDomain { name: "sigma", value: sigma, reason: "must be positive" });
    }
    if !ell.is_finite() {
        return Err(Error::ParameterDomain { name: "ell", value: ell, reason: "must be finite" });
    }
    InvariantDensity::build(d as f64, 2.0 * ell / (sigma * sigma))
}

/// Stationary law `∝ e^{−2x/σ²}/√(1 − x²)` of `u = ẏ/y` for kinetic Brownian
/// motion in the hyperbolic half-plane.
pub fn hyperbolic_plane_density(sigma: f64) -> Result<InvariantDensity> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::ParameterDomain { name: "sigma", value: sigma, reason: "must be positive" });
    }
    InvariantDensity::build(2.0, -2.0 / (sigma * sigma))
}

// ---------------------------------------------------------------------------
// Trajectory diagnostics
// ---------------------------------------------------------------------------

/// Minimum number of post-burn-in samples for [`ergodic_average`].
pub const MIN_ERGODIC_SAMPLES: usize = 10;

/// Mean of `observable` over recorded samples with `t ≥ burn_in·T`.
pub fn ergodic_average<S>(traj: &Trajectory<S>, observable: impl Fn(&S) -> f64, burn_in: f64) -> Result<f64> {
    if !(0.0..=0.9).contains(&burn_in) {
        return Err(Error::ParameterDomain { name: "burn_in", value: burn_in, reason: "must lie in [0, 0.9]" });
    }
    let t0 = burn_in * traj.horizon();
    let vals: Vec<f64> = traj.times.iter().zip(&traj.states).filter(|(t, _)| **t >= t0).map(|(_, s)| observable(s)).collect();
    if vals.len() < MIN_ERGODIC_SAMPLES {
        return Err(Error::Statistics(format!("only {} samples after burn-in", vals.len())));
    }
    Ok(mean(&vals))
}

/// Regression model of an escape-rate fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeModel {
    /// `log r` against `log t`.
    PowerInT,
    /// `r` against `t`.
    LinearInT,
    /// `r` against `log t`.
    Log,
}

/// Fraction of the time range discarded before escape fits.
pub const ESCAPE_FIT_SKIP: f64 = 0.2;

/// Least-squares escape fit on the last 80% of the time range.
pub fn escape_fit(times: &[f64], r: &[f64], model: EscapeModel) -> Result<FitReport> {
    if times.len() != r.len() || r.len() < 3 {
        return Err(Error::Input("escape fit needs matched series of at least 3 samples".into()));
    }
    let (r0, rt) = (r[0], r[r.len() - 1]);
    if !(rt > 10.0 * r0) {
        return Err(Error::State(format!("trajectory is not transient: final radius {rt} ≤ 10 × initial {r0}")));
    }
    let t0 = ESCAPE_FIT_SKIP * times[times.len() - 1];
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (t, v) in times.iter().zip(r) {
        if *t >= t0 && *t > 0.0 {
            let (x, y) = match model {
                EscapeModel::PowerInT => (t.ln(), v.ln()),
                EscapeModel::LinearInT => (*t, *v),
                EscapeModel::Log => (t.ln(), *v),
            };
            xs.push(x);
            ys.push(y);
        }
    }
    fit_line(&xs, &ys)
}

/// Angle-convergence statistics on the tail of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleReport {
    /// `max_{t ≥ t₀} dist(θ_t, θ_{t₀})` with `dist` the great-circle distance.
    pub cauchy_sup: f64,
    /// `C_T − C_{t₀}`.
    pub clock_increment: f64,
}

/// Great-circle distance between unit vectors.
pub fn sphere_distance(a: &[f64], b: &[f64]) -> f64 {
    let chord: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    2.0 * (0.5 * chord).min(1.0).asin()
}

/// Tail Cauchy oscillation of a unit-vector series from `tail_start·T` on.
pub fn cauchy_sup(times: &[f64], thetas: &[Vec<f64>], tail_start: f64) -> f64 {
    let t0 = tail_start * times.last().copied().unwrap_or(0.0);
    let k0 = times.iter().position(|t| *t >= t0).unwrap_or(times.len().saturating_sub(1));
    thetas[k0..].iter().map(|th| sphere_distance(th, &thetas[k0])).fold(0.0, f64::max)
}

/// Cauchy tail and clock increment from `tail_start·T` to `T`.
pub fn angle_convergence_check(times: &[f64], thetas: &[Vec<f64>], clock: &[f64], tail_start: f64) -> Result<AngleReport> {
    if times.is_empty() || thetas.len() != times.len() || clock.len() != times.len() {
        return Err(Error::Input("times, angles and clock must be non-empty and of equal length".into()));
    }
    if !(0.0..1.0).contains(&tail_start) {
        return Err(Error::ParameterDomain { name: "tail_start", value: tail_start, reason: "must lie in [0, 1)" });
    }
    let t0 = tail_start * times[times.len() - 1];
    let k0 = times.iter().position(|t| *t >= t0).unwrap_or(times.len() - 1);
    Ok(AngleReport { cauchy_sup: cauchy_sup(times, thetas, tail_start), clock_increment: clock[clock.len() - 1] - clock[k0] })
}

/// Off-diagonal covariance estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceEntry {
    pub i: usize,
    pub j: usize,
    pub covariance: f64,
    pub std_error: f64,
}

/// Distribution-level comparison of rescaled endpoints with the Brownian
/// limit of covariance `4/(d(d−1))·I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolationReport {
    pub n: usize,
    pub variances: Vec<f64>,
    pub variance_target: f64,
    pub off_diagonal: Vec<CovarianceEntry>,
    /// KS distance of the first coordinate against `N(0, variance_target)`.
    pub ks_marginal: f64,
}

/// Minimum ensemble size for [`interpolation_check`].
pub const MIN_INTERPOLATION_ENSEMBLE: usize = 1000;

/// Variances, cross-covariances and a marginal KS test of endpoints `X^σ_1`.
pub fn interpolation_check(endpoints: &[Vec<f64>], d: usize) -> Result<InterpolationReport> {
    let n = endpoints.len();
    if n < MIN_INTERPOLATION_ENSEMBLE {
        return Err(Error::Statistics(format!("interpolation check needs ≥ {MIN_INTERPOLATION_ENSEMBLE} paths, got {n}")));
    }
    if d < 2 {
        return Err(Error::ParameterDomain { name: "d", value: d as f64, reason: "needs d ≥ 2" });
    }
    let mut s = EnsembleSummary::new(d);
    for e in endpoints {
        s.push(e)?;
    }
    let target = 4.0 / (d as f64 * (d as f64 - 1.0));
    let mut off = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let prods: Vec<f64> = endpoints.iter().map(|e| (e[i] - s.mean[i]) * (e[j] - s.mean[j])).collect();
            off.push(CovarianceEntry { i, j, covariance: s.covariance(i, j), std_error: (variance(&prods) / n as f64).sqrt() });
        }
    }
    let mut first: Vec<f64> = endpoints.iter().map(|e| e[0]).collect();
    first.sort_by(f64::total_cmp);
    let sd = target.sqrt();
    let ks = ks_distance(&first, |x| normal_cdf(x, sd))?;
    Ok(InterpolationReport { n, variances: (0..d).map(|i| s.variance(i)).collect(), variance_target: target, off_diagonal: off, ks_marginal: ks })
}

/// Long-time statistics of half-plane kinetic Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovReport {
    /// `(1/T) log(y_T/y₀)`.
    pub exponent: f64,
    /// `∫ x μ(dx)` for `μ ∝ e^{−2x/σ²}/√(1 − x²)`.
    pub prediction: f64,
    /// `max |x_t − x_T|` over `t ∈ [T/10, T]`.
    pub tail_oscillation: f64,
}

/// Minimum horizon for [`lyapunov_h2`].
pub const MIN_LYAPUNOV_HORIZON: f64 = 1e3;

/// Empirical height exponent, its quadrature prediction and the tail
/// oscillation of the horizontal coordinate over the last decade of time.
pub fn lyapunov_h2(traj: &Trajectory<HyperbolicPlaneState>, sigma: f64) -> Result<LyapunovReport> {
    let t = traj.horizon();
    if t < MIN_LYAPUNOV_HORIZON {
        return Err(Error::Range(format!("Lyapunov estimate needs T ≥ {MIN_LYAPUNOV_HORIZON}, got {t}")));
    }
    let first = &traj.states[0];
    let last = traj.last();
    let exponent = (last.log_y - first.log_y) / t;
    let prediction = hyperbolic_plane_density(sigma)?.mean;
    let tail_oscillation = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(s, _)| **s >= 0.1 * t)
        .map(|(_, st)| (st.x - last.x).abs())
        .fold(0.0, f64::max);
    Ok(LyapunovReport { exponent, prediction, tail_oscillation })
}

/// Maximum over a path of `|x_t − (x₀ + t ẋ₀)|`.
pub fn geodesic_deviation(times: &[f64], points: &[Vec<f64>], x0: &[f64], v0: &[f64]) -> f64 {
    times
        .iter()
        .zip(points)
        .map(|(t, p)| {
            let diff: Vec<f64> = p.iter().zip(x0.iter().zip(v0)).map(|(a, (b, c))| a - b - t * c).collect();
            numerics::norm(&diff)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_matches_direct_moments() {
        let data: Vec<[f64; 2]> = (0..200).map(|i| [(i as f64 * 0.37).sin() * 3.0, (i as f64).sqrt()]).collect();
        let mut s = EnsembleSummary::new(2);
        for x in &data {
            s.push(x).unwrap();
        }
        let col: Vec<f64> = data.iter().map(|x| x[0]).collect();
        let m = mean(&col);
        let m4: f64 = col.iter().map(|x| (x - m).powi(4)).sum();
        assert!((s.mean[0] - m).abs() < 1e-12);
        assert!((s.variance(0) - variance(&col)).abs() < 1e-12);
        assert!((s.m4[0] - m4).abs() < 1e-9 * m4);
        let c1: Vec<f64> = data.iter().map(|x| x[1]).collect();
        let m1 = mean(&c1);
        let cov = col.iter().zip(&c1).map(|(a, b)| (a - m) * (b - m1)).sum::<f64>() / 199.0;
        assert!((s.covariance(0, 1) - cov).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts() {
        let mut s = EnsembleSummary::with_histogram(1, 0.0, 1.0, 4).unwrap();
        for x in [-0.1, 0.0, 0.3, 0.5, 0.99, 1.0] {
            s.push(&[x]).unwrap();
        }
        let h = s.histogram.unwrap();
        assert_eq!(h.counts[0], vec![1, 1, 1, 1]);
        assert_eq!((h.underflow[0], h.overflow[0]), (1, 1));
    }

    #[test]
    fn line_fit_exact() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.residual_rms < 1e-14);
    }

    #[test]
    fn ks_degenerate_and_unsorted() {
        let same = vec![0.3; 60];
        let d = ks_distance(&same, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d >= 0.7 - 1e-12);
        let mut bad: Vec<f64> = (0..60).map(|i| i as f64).collect();
        bad.swap(3, 4);
        assert!(matches!(ks_distance(&bad, |x| x), Err(Error::Input(_))));
        assert!(matches!(ks_distance(&[0.0; 10], |x| x), Err(Error::Statistics(_))));
    }

    #[test]
    fn ks_uniform_quantile_grid() {
        let mu0 = invariant_density_mu_ell(0.0, 1.0, 3).unwrap();
        let n = 1000;
        let grid: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&grid, |x| mu0.cdf(x)).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-6, "{d}");
    }

    #[test]
    fn two_sample_ks_identical_is_zero() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn invariant_density_examples() {
        let u = invariant_density_mu_ell(0.0, 1.0, 3).unwrap();
        assert!((u.density(0.2) - 0.5).abs() < 1e-12);
        assert!(u.mean.abs() < 1e-14);
        let m = invariant_density_mu_ell(1.0, 1.0, 3).unwrap();
        let oracle = 1.0 / 2.0f64.tanh() - 0.5;
        assert!((m.mean - oracle).abs() < 1e-12);
        for (l, s, d) in [(0.3, 0.7, 5), (-2.0, 1.0, 3), (1.0, 2.0, 4)] {
            let mu = invariant_density_mu_ell(l, s, d).unwrap();
            assert!((mu.expectation(|_| 1.0).unwrap() - 1.0).abs() < 1e-10);
            assert!((mu.cdf(1.0 - 1e-15) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn mean_increases_with_ell() {
        let means: Vec<f64> = [0.0, 0.5, 1.0, 2.0].iter().map(|l| invariant_density_mu_ell(*l, 1.0, 3).unwrap().mean).collect();
        assert!(means.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn hyperbolic_plane_density_mean() {
        // Oracle: ratio of modified Bessel functions, −I₁(2)/I₀(2), by series.
        let bessel = |nu: i32, x: f64| {
            let mut s = 0.0;
            let mut term_fact = 1.0;
            for k in 0..40 {
                if k > 0 {
                    term_fact *= k as f64;
                }
                let fact_nu: f64 = (1..=(k + nu)).map(|v| v as f64).product();
                s += (x / 2.0).powi(2 * k + nu) / (term_fact * fact_nu);
            }
            s
        };
        let oracle = -bessel(1, 2.0) / bessel(0, 2.0);
        let h = hyperbolic_plane_density(1.0).unwrap();
        assert!((h.mean - oracle).abs() < 1e-10, "{} vs {oracle}", h.mean);
    }

    #[test]
    fn angle_report_geodesic() {
        let times = vec![0.0, 1.0, 2.0];
        let th = vec![vec![1.0, 0.0, 0.0]; 3];
        let r = angle_convergence_check(&times, &th, &[0.0, 0.0, 0.0], 0.5).unwrap();
        assert_eq!(r.cauchy_sup, 0.0);
        assert_eq!(r.clock_increment, 0.0);
    }
}
