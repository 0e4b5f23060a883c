//! Deterministic noise streams and constraint-preserving SDE steppers.
//!
//! A [`NoiseStream`] is keyed by `(seed, path_index)`: the ChaCha8 key comes
//! from the seed and the stream selector from the path index, so each path
//! reads its own reproducible block sequence independently of scheduling.
//!
//! Systems implement [`SdeSystem`] by supplying an Itô drift, a dense
//! diffusion matrix and a projection onto their constraint manifold. The two
//! steppers are projected Euler–Maruyama (Itô) and projected Heun
//! (Stratonovich).

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Reproducible source of Gaussian increments for one path.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    seed: u64,
    path_index: u64,
    counter: u64,
    sign: f64,
    rng: ChaCha8Rng,
}

impl NoiseStream {
    /// Stream for path `path_index` under master seed `seed`.
    pub fn new(seed: u64, path_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path_index);
        NoiseStream { seed, path_index, counter: 0, sign: 1.0, rng }
    }

    /// The same stream with every sample negated (mirrored noise).
    pub fn mirrored(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// Number of Gaussian samples drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Rewinds the stream to its first sample.
    pub fn reset(&mut self) {
        let sign = self.sign;
        *self = NoiseStream::new(self.seed, self.path_index);
        self.sign = sign;
    }

    /// One standard normal sample.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.counter += 1;
        let z: f64 = self.rng.sample(StandardNormal);
        self.sign * z
    }

    /// Fills `out` with independent `N(0, dt)` samples.
    #[inline]
    pub fn fill_increments(&mut self, out: &mut [f64], dt: f64) {
        let s = dt.sqrt();
        for x in out.iter_mut() {
            *x = s * self.standard_normal();
        }
    }

    /// `count` independent `N(0, dt)` samples.
    pub fn gaussian_increments(&mut self, count: usize, dt: f64) -> Vec<f64> {
        let mut v = vec![0.0; count];
        self.fill_increments(&mut v, dt);
        v
    }
}

/// Integration scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Euler–Maruyama on the Itô form followed by projection.
    ItoEulerProject,
    /// Heun predictor-corrector on the Stratonovich form followed by projection.
    StratonovichHeunProject,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ito_euler_project" | "euler" | "ito" => Ok(SchemeKind::ItoEulerProject),
            "stratonovich_heun_project" | "stratonovich_heun" | "heun" => Ok(SchemeKind::StratonovichHeunProject),
            other => Err(Error::Config(format!(
                "unknown scheme `{other}` (expected ito_euler_project or stratonovich_heun_project)"
            ))),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::ItoEulerProject => "ito_euler_project",
            SchemeKind::StratonovichHeunProject => "stratonovich_heun_project",
        })
    }
}

/// Scheme together with its time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepScheme {
    pub kind: SchemeKind,
    pub dt: f64,
}

impl StepScheme {
    /// Validated scheme; `dt` must be positive and finite.
    pub fn new(kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::ParameterDomain { name: "dt", value: dt, reason: "time step must be positive" });
        }
        Ok(StepScheme { kind, dt })
    }

    /// Projected Euler–Maruyama with step `dt`.
    pub fn euler(dt: f64) -> Result<Self> {
        Self::new(SchemeKind::ItoEulerProject, dt)
    }

    /// Projected Heun with step `dt`.
    pub fn heun(dt: f64) -> Result<Self> {
        Self::new(SchemeKind::StratonovichHeunProject, dt)
    }
}

/// A stochastic system `dx = b(x)dt + σ(x)dZ` on a constraint manifold.
pub trait SdeSystem {
    /// Length of the flat state vector.
    fn state_dim(&self) -> usize;
    /// Number of driving Brownian motions.
    fn noise_dim(&self) -> usize;
    /// Itô drift `b(x)`.
    fn drift(&self, x: &[f64], out: &mut [f64]);
    /// Diffusion matrix, row-major `state_dim × noise_dim`.
    fn diffusion(&self, x: &[f64], out: &mut [f64]);
    /// Stratonovich drift `b − ½ Σ_k (∂σ_k)σ_k`.
    ///
    /// The default evaluates the correction with central differences of the
    /// diffusion matrix (step `1e-6`); systems with a closed form override it.
    fn stratonovich_drift(&self, x: &[f64], out: &mut [f64]) {
        let n = self.state_dim();
        let m = self.noise_dim();
        self.drift(x, out);
        let mut sig = vec![0.0; n * m];
        self.diffusion(x, &mut sig);
        let mut xp = x.to_vec();
        let mut sp = vec![0.0; n * m];
        let mut sm = vec![0.0; n * m];
        let h = 1e-6;
        for j in 0..n {
            let has_weight = (0..m).any(|k| sig[j * m + k] != 0.0);
            if !has_weight {
                continue;
            }
            xp[j] = x[j] + h;
            self.diffusion(&xp, &mut sp);
            xp[j] = x[j] - h;
            self.diffusion(&xp, &mut sm);
            xp[j] = x[j];
            for i in 0..n {
                let mut c = 0.0;
                for k in 0..m {
                    c += sig[j * m + k] * (sp[i * m + k] - sm[i * m + k]) / (2.0 * h);
                }
                out[i] -= 0.5 * c;
            }
        }
    }
    /// Projects the state onto the constraint manifold. Must be idempotent.
    fn project(&self, _x: &mut [f64]) {}
}

/// Reusable scratch buffers for the steppers.
#[derive(Debug, Clone)]
pub struct StepWorkspace {
    drift: Vec<f64>,
    diff: Vec<f64>,
    pred: Vec<f64>,
    drift2: Vec<f64>,
    diff2: Vec<f64>,
}

impl StepWorkspace {
    pub fn new(state_dim: usize, noise_dim: usize) -> Self {
        StepWorkspace {
            drift: vec![0.0; state_dim],
            diff: vec![0.0; state_dim * noise_dim],
            pred: vec![0.0; state_dim],
            drift2: vec![0.0; state_dim],
            diff2: vec![0.0; state_dim * noise_dim],
        }
    }

    /// Workspace sized for `sys`.
    pub fn for_system<S: SdeSystem + ?Sized>(sys: &S) -> Self {
        Self::new(sys.state_dim(), sys.noise_dim())
    }
}

fn check_finite(x: &[f64], step: u64) -> Result<()> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NumericalBlowUp { step, detail: format!("state component {i} is {}", x[i]) });
    }
    Ok(())
}

#[inline]
fn apply_increment(x: &mut [f64], drift: &[f64], diff: &[f64], dz: &[f64], dt: f64) {
    let m = dz.len();
    for (i, xi) in x.iter_mut().enumerate() {
        let row = &diff[i * m..(i + 1) * m];
        let mut s = drift[i] * dt;
        for (a, b) in row.iter().zip(dz) {
            s += a * b;
        }
        *xi += s;
    }
}

/// One projected Euler–Maruyama step `x ← Π(x + b(x)dt + σ(x)dZ)`.
pub fn ito_euler_project_step<S: SdeSystem + ?Sized>(
    sys: &S,
    x: &mut [f64],
    dz: &[f64],
    dt: f64,
    step: u64,
    ws: &mut StepWorkspace,
) -> Result<()> {
    sys.drift(x, &mut ws.drift);
    sys.diffusion(x, &mut ws.diff);
    apply_increment(x, &ws.drift, &ws.diff, dz, dt);
    check_finite(x, step)?;
    sys.project(x);
    check_finite(x, step)
}

/// One projected Heun step on the Stratonovich form.
///
/// The predictor is a projected Euler step with the Stratonovich drift; the
/// corrector averages drift and diffusion between the start and predicted
/// points, then projects.
pub fn stratonovich_heun_step<S: SdeSystem + ?Sized>(
    sys: &S,
    x: &mut [f64],
    dz: &[f64],
    dt: f64,
    step: u64,
    ws: &mut StepWorkspace,
) -> Result<()> {
    sys.stratonovich_drift(x, &mut ws.drift);
    sys.diffusion(x, &mut ws.diff);
    ws.pred.copy_from_slice(x);
    apply_increment(&mut ws.pred, &ws.drift, &ws.diff, dz, dt);
    check_finite(&ws.pred, step)?;
    sys.project(&mut ws.pred);
    sys.stratonovich_drift(&ws.pred, &mut ws.drift2);
    sys.diffusion(&ws.pred, &mut ws.diff2);
    for (a, b) in ws.drift.iter_mut().zip(&ws.drift2) {
        *a = 0.5 * (*a + b);
    }
    for (a, b) in ws.diff.iter_mut().zip(&ws.diff2) {
        *a = 0.5 * (*a + b);
    }
    apply_increment(x, &ws.drift, &ws.diff, dz, dt);
    check_finite(x, step)?;
    sys.project(x);
    check_finite(x, step)
}

/// Dispatches one step according to `scheme`.
pub fn step<S: SdeSystem + ?Sized>(
    sys: &S,
    scheme: StepScheme,
    x: &mut [f64],
    dz: &[f64],
    step_index: u64,
    ws: &mut StepWorkspace,
) -> Result<()> {
    match scheme.kind {
        SchemeKind::ItoEulerProject => ito_euler_project_step(sys, x, dz, scheme.dt, step_index, ws),
        SchemeKind::StratonovichHeunProject => stratonovich_heun_step(sys, x, dz, scheme.dt, step_index, ws),
    }
}

/// Scalar Ornstein–Uhlenbeck test system `dy = −θy dt + s dB`.
#[derive(Debug, Clone, Copy)]
pub struct OrnsteinUhlenbeck {
    pub rate: f64,
    pub noise: f64,
}

impl SdeSystem for OrnsteinUhlenbeck {
    fn state_dim(&self) -> usize {
        1
    }
    fn noise_dim(&self) -> usize {
        1
    }
    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -self.rate * x[0];
    }
    fn diffusion(&self, _x: &[f64], out: &mut [f64]) {
        out[0] = self.noise;
    }
}

/// Brownian motion on the unit sphere of `ℝ^n`, `dx = (I − xxᵀ)∘dW`.
#[derive(Debug, Clone, Copy)]
pub struct SphereBrownianMotion {
    pub n: usize,
}

impl SdeSystem for SphereBrownianMotion {
    fn state_dim(&self) -> usize {
        self.n
    }
    fn noise_dim(&self) -> usize {
        self.n
    }
    fn drift(&self, x: &[f64], out: &mut [f64]) {
        let c = -0.5 * (self.n as f64 - 1.0);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = c * xi;
        }
    }
    fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = if i == j { 1.0 } else { 0.0 } - x[i] * x[j];
            }
        }
    }
    fn stratonovich_drift(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn project(&self, x: &mut [f64]) {
        crate::numerics::normalize(x);
    }
}

/// Unit circle rotated by one noise, `dx = J x ∘ dB` with `J` the quarter turn.
#[derive(Debug, Clone, Copy)]
pub struct CircleRotation;

impl SdeSystem for CircleRotation {
    fn state_dim(&self) -> usize {
        2
    }
    fn noise_dim(&self) -> usize {
        1
    }
    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -0.5 * x[0];
        out[1] = -0.5 * x[1];
    }
    fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        out[0] = -x[1];
        out[1] = x[0];
    }
    fn project(&self, x: &mut [f64]) {
        crate::numerics::normalize(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism_with_reset() {
        let mut s = NoiseStream::new(0, 0);
        let a = s.gaussian_increments(2, 1.0);
        assert_eq!(s.counter(), 2);
        s.reset();
        let b = s.gaussian_increments(2, 1.0);
        assert_eq!(a, b);
        let mut t = NoiseStream::new(0, 0);
        assert_eq!(t.gaussian_increments(2, 1.0), a);
    }

    #[test]
    fn increment_variance() {
        let mut s = NoiseStream::new(7, 3);
        let n = 1_000_000;
        let v = s.gaussian_increments(n, 0.5);
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((var - 0.5).abs() <= 0.005, "variance {var}");
    }

    #[test]
    fn streams_are_uncorrelated() {
        let n = 100_000;
        let a = NoiseStream::new(0, 0).gaussian_increments(n, 1.0);
        let b = NoiseStream::new(0, 1).gaussian_increments(n, 1.0);
        let rho = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64;
        assert!(rho.abs() <= 0.01, "correlation {rho}");
    }

    #[test]
    fn zero_coefficients_leave_state_unchanged() {
        let sys = OrnsteinUhlenbeck { rate: 0.0, noise: 0.0 };
        let mut ws = StepWorkspace::for_system(&sys);
        let mut x = [1.25];
        ito_euler_project_step(&sys, &mut x, &[0.3], 0.1, 0, &mut ws).unwrap();
        assert_eq!(x, [1.25]);
        stratonovich_heun_step(&sys, &mut x, &[0.3], 0.1, 0, &mut ws).unwrap();
        assert_eq!(x, [1.25]);
    }

    #[test]
    fn sphere_step_is_unit() {
        let sys = SphereBrownianMotion { n: 3 };
        let mut ws = StepWorkspace::for_system(&sys);
        let mut x = [0.0, 0.0, 1.0];
        let mut s = NoiseStream::new(1, 0);
        for k in 0..1000 {
            let dz = s.gaussian_increments(3, 1e-2);
            ito_euler_project_step(&sys, &mut x, &dz, 1e-2, k, &mut ws).unwrap();
            let n2 = crate::numerics::dot(&x, &x);
            assert!((n2 - 1.0).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn circle_heun_stays_on_circle() {
        let mut ws = StepWorkspace::for_system(&CircleRotation);
        let mut x = [1.0, 0.0];
        let mut s = NoiseStream::new(2, 0);
        for k in 0..1000 {
            let dz = s.gaussian_increments(1, 1e-3);
            stratonovich_heun_step(&CircleRotation, &mut x, &dz, 1e-3, k, &mut ws).unwrap();
            assert!((crate::numerics::norm(&x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_field_heun_matches_midpoint() {
        // dx = −x dt with no noise: Heun equals the explicit trapezoid rule.
        let sys = OrnsteinUhlenbeck { rate: 1.0, noise: 0.0 };
        let mut ws = StepWorkspace::for_system(&sys);
        let mut x = [2.0];
        let dt = 0.1;
        stratonovich_heun_step(&sys, &mut x, &[0.0], dt, 0, &mut ws).unwrap();
        let pred = 2.0 - 2.0 * dt;
        let expected = 2.0 + 0.5 * dt * (-2.0 - pred);
        assert!((x[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn blow_up_reports_step() {
        let sys = OrnsteinUhlenbeck { rate: -1e308, noise: 0.0 };
        let mut ws = StepWorkspace::for_system(&sys);
        let mut x = [1e308];
        let err = ito_euler_project_step(&sys, &mut x, &[0.0], 10.0, 42, &mut ws).unwrap_err();
        assert!(matches!(err, Error::NumericalBlowUp { step: 42, .. }));
    }

    #[test]
    fn ou_stationary_variance() {
        let sys = OrnsteinUhlenbeck { rate: 1.0, noise: 1.0 };
        let mut ws = StepWorkspace::for_system(&sys);
        let dt = 1e-3;
        let steps = 10_000;
        let paths = 10_000;
        let mut finals = Vec::with_capacity(paths);
        for p in 0..paths {
            let mut s = NoiseStream::new(11, p as u64);
            let mut x = [0.0];
            let mut dz = [0.0];
            for k in 0..steps {
                s.fill_increments(&mut dz, dt);
                ito_euler_project_step(&sys, &mut x, &dz, dt, k, &mut ws).unwrap();
            }
            finals.push(x[0]);
        }
        let var = finals.iter().map(|x| x * x).sum::<f64>() / paths as f64;
        assert!((var - 0.5).abs() <= 0.02, "variance {var}");
    }

    #[test]
    fn ou_weak_order_one() {
        // The Euler mean of a linear system follows the noiseless recursion.
        let sys = OrnsteinUhlenbeck { rate: 1.0, noise: 1.0 };
        let mut ws = StepWorkspace::for_system(&sys);
        let t_end = 1.0;
        let mut pts = Vec::new();
        for dt in [1e-2, 5e-3, 2.5e-3] {
            let mut x = [1.0];
            let n = (t_end / dt) as u64;
            for k in 0..n {
                ito_euler_project_step(&sys, &mut x, &[0.0], dt, k, &mut ws).unwrap();
            }
            pts.push((dt.ln(), (x[0] - (-t_end).exp()).abs().ln()));
        }
        let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
        assert!((slope - 1.0).abs() <= 0.2, "slope {slope}");
    }

    #[test]
    fn finite_difference_stratonovich_drift_matches_closed_form() {
        struct Numeric(SphereBrownianMotion);
        impl SdeSystem for Numeric {
            fn state_dim(&self) -> usize {
                self.0.state_dim()
            }
            fn noise_dim(&self) -> usize {
                self.0.noise_dim()
            }
            fn drift(&self, x: &[f64], out: &mut [f64]) {
                self.0.drift(x, out)
            }
            fn diffusion(&self, x: &[f64], out: &mut [f64]) {
                self.0.diffusion(x, out)
            }
        }
        let sys = Numeric(SphereBrownianMotion { n: 3 });
        let x = [0.6, 0.0, 0.8];
        let mut out = [0.0; 3];
        sys.stratonovich_drift(&x, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-8), "{out:?}");
    }
}
