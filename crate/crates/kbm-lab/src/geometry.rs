//! Rotationally invariant metrics `g = dr² + f(r)² dθ²` on `(0, ∞) × S^{d−1}`.
//!
//! A [`WarpedMetric`] wraps one of the model warping functions and evaluates
//! `f`, `f′`, `f″`, the radial curvature `K = −f″/f` and the log-derivative
//! `f′/f`. The polynomial and subexponential families equal their asymptotic
//! form `r^β` or `exp(r^β)` exactly on `r ≥ 1`. Below `r = 1` the scale
//! exponent `g = r·f′/f` is blended in the variable `s = ln r`:
//!
//! ```text
//! g(s) = 1                                 s < s₀
//! g(s) = 1 + E·S′(x)/W,     x = (s − s₀)/W  s₀ ≤ s < s₁
//! g(s) = 1 + (A(s) − 1)·S(x), x = (s − s₁)/w  s₁ ≤ s ≤ 0
//! ```
//!
//! with the quintic smoothstep `S(x) = 6x⁵ − 15x⁴ + 10x³` and the asymptotic
//! exponent `A(s) = β` or `βe^{βs}`. The bump area `E` is fixed so that
//! `∫_{−∞}^0 (g − 1) ds = ln f(1)`, which makes `f` match the asymptotic form
//! at `r = 1` with continuous first and second derivatives. Hence `f(r) = r`
//! near the origin, `f(0) = 0` and `f′(0) = 1`. The ramp width `w` and bump
//! width `W` are chosen so that `g_s ≤ g`, which is log-concavity of `f`, for
//! every polynomial exponent and for subexponential exponents `β < 1`.

use crate::error::{Error, Result};
use crate::numerics::{self, dot};
use serde::{Deserialize, Serialize};

/// Default lower bound on admissible radii.
pub const DEFAULT_DOMAIN_MIN: f64 = 1e-8;

/// Model warping functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpace {
    /// `f(r) = r`: flat space.
    Euclidean,
    /// `f(r) = sinh r`: constant curvature −1.
    Hyperbolic,
    /// `f(r) ∝ r^β` for `r ≥ 1`.
    Polynomial { beta: f64 },
    /// `f(r) ∝ exp(r^β)` for `r ≥ 1`.
    Subexponential { beta: f64 },
    /// `f(r) = exp(c·r)`.
    Exponential { c: f64 },
}

/// Asymptotic growth regime of a warping function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Polynomial,
    Subexponential,
    Exponential,
    Superexponential,
}

/// A warped-product metric with its warping function and derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedMetric {
    family: ModelSpace,
    domain_min: f64,
    blend: Blend,
}

/// Parameters of the blend on `r < 1` in the variable `s = ln r`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct Blend {
    /// Start of the bump.
    s0: f64,
    /// End of the bump and start of the ramp.
    s1: f64,
    /// Bump signed area.
    area: f64,
}

/// Values of `ln f`, `f′/f` and `f″/f` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogJet {
    pub ln_f: f64,
    pub log_derivative: f64,
    pub second_ratio: f64,
}

/// Curvature and log-derivative at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub r: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub log_derivative: f64,
}

/// Either a finite integral value or a divergence flag carrying the
/// truncated value on `[1, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralValue {
    Finite { value: f64 },
    Infinite { truncated: f64 },
}

impl IntegralValue {
    /// True when the integral converges.
    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralValue::Finite { .. })
    }

    /// The finite value, or `+∞`.
    pub fn value(&self) -> f64 {
        match self {
            IntegralValue::Finite { value } => *value,
            IntegralValue::Infinite { .. } => f64::INFINITY,
        }
    }
}

/// Asymptotic classification of `f` from the growth of `r·f′/f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailClass {
    /// `r·f′/f → λ`: `f` grows like `r^λ`.
    PowerLaw { order: f64 },
    /// `r·f′/f → ∞`: `f` grows faster than every power.
    Superpolynomial,
}

/// Transience and angle-convergence integrals together with their verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// `∫₁^∞ f^{1−d}`.
    pub transience_integral: IntegralValue,
    /// `I_d(f) = ∫₁^∞ f^{d−2}(r) ∫_r^∞ f^{1−d}(ρ) dρ dr`.
    pub angle_integral: IntegralValue,
    pub d: usize,
    pub r_max: f64,
    pub tail: TailClass,
    /// Radial process transient.
    pub radial_transient: bool,
    /// Angular clock converges.
    pub angle_converges: bool,
}

/// Drift and diffusion coefficients of the polar system at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCoefficients {
    /// `dr/dt = ṙ`.
    pub r_drift: f64,
    /// `−(σ²/2)(d−1)ṙ + (f′/f)(1 − ṙ²)`.
    pub rdot_drift: f64,
    /// `σ√(1 − ṙ²)`, coefficient of the radial Brownian motion.
    pub rdot_noise: f64,
    /// `√(1 − ṙ²)/f(r)`, the angular speed.
    pub alpha: f64,
    /// `α·v`.
    pub theta_drift: Vec<f64>,
    /// `−α·θ − (σ²/2)(d − 2)·v/(1 − ṙ²)`.
    pub v_drift: Vec<f64>,
    /// `σ/√(1 − ṙ²)`, the scale multiplying the projected angular increment.
    pub angular_noise_scale: f64,
    /// Unit vectors at which the projection is taken.
    theta: Vec<f64>,
    v: Vec<f64>,
}

impl PolarCoefficients {
    /// Angular noise `σ·dN = σ(dW − θ⟨θ,dW⟩ − v⟨v,dW⟩)/√(1 − ṙ²)` for a
    /// `d`-dimensional Euclidean increment `dW`.
    pub fn angular_noise(&self, dw: &[f64]) -> Vec<f64> {
        let pt = dot(&self.theta, dw);
        let pv = dot(&self.v, dw);
        dw.iter()
            .zip(self.theta.iter().zip(&self.v))
            .map(|(w, (t, v))| self.angular_noise_scale * (w - pt * t - pv * v))
            .collect()
    }
}

/// Constructs a model metric with the default domain minimum.
pub fn model_space(name: ModelSpace) -> Result<WarpedMetric> {
    WarpedMetric::new(name, DEFAULT_DOMAIN_MIN)
}

/// Curvature report at `r`.
pub fn curvature(metric: &WarpedMetric, r: f64) -> Result<CurvatureReport> {
    metric.curvature(r)
}

fn smoothstep(x: f64) -> [f64; 3] {
    // S, S′, S″.
    let x2 = x * x;
    [x2 * x * (10.0 + x * (-15.0 + 6.0 * x)), 30.0 * x2 * (1.0 - x) * (1.0 - x), 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)]
}

/// Integral of `S` from 0 to `x`.
fn smoothstep_integral(x: f64) -> f64 {
    x.powi(4) * (2.5 + x * (-3.0 + x))
}

/// Composite Kronrod panels per unit of `β·s` for the subexponential ramp.
const RAMP_PANELS_PER_UNIT: f64 = 4.0;

impl WarpedMetric {
    /// Validates the family parameters and builds the metric.
    pub fn new(family: ModelSpace, domain_min: f64) -> Result<Self> {
        if !(domain_min > 0.0 && domain_min.is_finite()) {
            return Err(Error::ParameterDomain {
                name: "domain_min",
                value: domain_min,
                reason: "must be a positive finite radius",
            });
        }
        match family {
            ModelSpace::Polynomial { beta } | ModelSpace::Subexponential { beta } => {
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(Error::ParameterDomain { name: "beta", value: beta, reason: "must be positive" });
                }
            }
            ModelSpace::Exponential { c } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::ParameterDomain { name: "c", value: c, reason: "must be positive" });
                }
            }
            ModelSpace::Euclidean | ModelSpace::Hyperbolic => {}
        }
        let mut m = WarpedMetric { family, domain_min, blend: Blend::default() };
        if let ModelSpace::Polynomial { beta } | ModelSpace::Subexponential { beta } = family {
            let width = 1.875 * (beta - 1.0).max(0.0);
            m.blend.s1 = -width.max(1.0);
            let target = if matches!(family, ModelSpace::Subexponential { .. }) { 1.0 } else { 0.0 };
            m.blend.area = target - m.ramp_integral(0.0);
            m.blend.s0 = m.blend.s1 - (4.5 * m.blend.area.abs()).max(4.0);
        }
        Ok(m)
    }

    /// The model family.
    pub fn family(&self) -> ModelSpace {
        self.family
    }

    /// Smallest admissible radius.
    pub fn domain_min(&self) -> f64 {
        self.domain_min
    }

    /// Human-readable family tag such as `polynomial(beta=3)`.
    pub fn tag(&self) -> String {
        match self.family {
            ModelSpace::Euclidean => "euclidean".into(),
            ModelSpace::Hyperbolic => "hyperbolic".into(),
            ModelSpace::Polynomial { beta } => format!("polynomial(beta={beta})"),
            ModelSpace::Subexponential { beta } => format!("subexponential(beta={beta})"),
            ModelSpace::Exponential { c } => format!("exponential(c={c})"),
        }
    }

    /// Asymptotic growth regime. Subexponential families with `β ≥ 1` are
    /// accepted and labelled exponential (`β = 1`) or superexponential.
    pub fn regime(&self) -> Regime {
        match self.family {
            ModelSpace::Euclidean | ModelSpace::Polynomial { .. } => Regime::Polynomial,
            ModelSpace::Hyperbolic | ModelSpace::Exponential { .. } => Regime::Exponential,
            ModelSpace::Subexponential { beta } if beta < 1.0 => Regime::Subexponential,
            ModelSpace::Subexponential { beta } if beta == 1.0 => Regime::Exponential,
            ModelSpace::Subexponential { .. } => Regime::Superexponential,
        }
    }

    /// Asymptotic value `ℓ = lim f′/f(r)` as `r → ∞` (possibly `+∞`).
    pub fn ell(&self) -> f64 {
        match self.family {
            ModelSpace::Euclidean | ModelSpace::Polynomial { .. } => 0.0,
            ModelSpace::Hyperbolic => 1.0,
            ModelSpace::Exponential { c } => c,
            ModelSpace::Subexponential { beta } if beta < 1.0 => 0.0,
            ModelSpace::Subexponential { beta } if beta == 1.0 => 1.0,
            ModelSpace::Subexponential { .. } => f64::INFINITY,
        }
    }

    /// Asymptotic scale exponent `A(s)` and `A′(s)`.
    fn asymptotic_exponent(&self, s: f64) -> (f64, f64) {
        match self.family {
            ModelSpace::Polynomial { beta } => (beta, 0.0),
            ModelSpace::Subexponential { beta } => {
                let a = beta * (beta * s).exp();
                (a, beta * a)
            }
            _ => (1.0, 0.0),
        }
    }

    /// `∫_{s₁}^{s} (A(σ) − 1)·S(x(σ)) dσ` for `s` in the ramp.
    fn ramp_integral(&self, s: f64) -> f64 {
        let s1 = self.blend.s1;
        let w = -s1;
        match self.family {
            ModelSpace::Polynomial { beta } => (beta - 1.0) * w * smoothstep_integral((s - s1) / w),
            ModelSpace::Subexponential { beta } => {
                let mut f = |u: f64| (self.asymptotic_exponent(u).0 - 1.0) * smoothstep((u - s1) / w)[0];
                let panels = ((s - s1) * beta.max(1.0) * RAMP_PANELS_PER_UNIT).ceil().max(1.0) as usize;
                let h = (s - s1) / panels as f64;
                (0..panels).map(|k| numerics::kronrod15(&mut f, s1 + k as f64 * h, s1 + (k + 1) as f64 * h).0).sum()
            }
            _ => 0.0,
        }
    }

    /// Blend jet `(Ψ, g, g_s)` at `s = ln r < 0`, where `ln f = s + Ψ`.
    fn blend_jet(&self, s: f64) -> (f64, f64, f64) {
        let Blend { s0, s1, area } = self.blend;
        if s < s0 {
            (0.0, 1.0, 0.0)
        } else if s < s1 {
            let w = s1 - s0;
            let [p, p1, p2] = smoothstep((s - s0) / w);
            (area * p, 1.0 + area * p1 / w, area * p2 / (w * w))
        } else {
            let w = -s1;
            let [p, p1, _] = smoothstep((s - s1) / w);
            let (a, a1) = self.asymptotic_exponent(s);
            (area + self.ramp_integral(s), 1.0 + (a - 1.0) * p, a1 * p + (a - 1.0) * p1 / w)
        }
    }

    /// `ln f`, `f′/f` and `f″/f` without a domain check.
    pub fn log_jet_unchecked(&self, r: f64) -> LogJet {
        match self.family {
            ModelSpace::Euclidean => LogJet { ln_f: r.ln(), log_derivative: 1.0 / r, second_ratio: 0.0 },
            ModelSpace::Hyperbolic => {
                let ln_f = if r > 20.0 { r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p() } else { r.sinh().ln() };
                LogJet { ln_f, log_derivative: 1.0 / r.tanh(), second_ratio: 1.0 }
            }
            ModelSpace::Exponential { c } => LogJet { ln_f: c * r, log_derivative: c, second_ratio: c * c },
            ModelSpace::Polynomial { beta } => {
                if r >= 1.0 {
                    LogJet {
                        ln_f: beta * r.ln(),
                        log_derivative: beta / r,
                        second_ratio: beta * (beta - 1.0) / (r * r),
                    }
                } else {
                    self.blended_jet(r)
                }
            }
            ModelSpace::Subexponential { beta } => {
                if r >= 1.0 {
                    let l = beta * r.powf(beta - 1.0);
                    LogJet {
                        ln_f: r.powf(beta),
                        log_derivative: l,
                        second_ratio: beta * (beta - 1.0) * r.powf(beta - 2.0) + l * l,
                    }
                } else {
                    self.blended_jet(r)
                }
            }
        }
    }

    fn blended_jet(&self, r: f64) -> LogJet {
        // ln f = s + Ψ(s), f′/f = g/r, f″/f = (g_s − g + g²)/r².
        let s = r.ln();
        let (psi, g, gs) = self.blend_jet(s);
        LogJet { ln_f: s + psi, log_derivative: g / r, second_ratio: (gs - g + g * g) / (r * r) }
    }

    fn check(&self, r: f64) -> Result<()> {
        if r >= self.domain_min && r.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { r, domain_min: self.domain_min })
        }
    }

    /// `ln f`, `f′/f` and `f″/f` at `r`.
    pub fn log_jet(&self, r: f64) -> Result<LogJet> {
        self.check(r)?;
        Ok(self.log_jet_unchecked(r))
    }

    /// Warping function `f(r)`.
    pub fn f(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.f_unchecked(r))
    }

    /// `f(r)` without a domain check.
    pub fn f_unchecked(&self, r: f64) -> f64 {
        match self.family {
            ModelSpace::Euclidean => r,
            ModelSpace::Hyperbolic => r.sinh(),
            ModelSpace::Exponential { c } => (c * r).exp(),
            ModelSpace::Polynomial { beta } if r >= 1.0 => r.powf(beta),
            _ => self.log_jet_unchecked(r).ln_f.exp(),
        }
    }

    /// First derivative `f′(r)`.
    pub fn f_prime(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.family {
            ModelSpace::Euclidean => 1.0,
            ModelSpace::Hyperbolic => r.cosh(),
            ModelSpace::Exponential { c } => c * (c * r).exp(),
            _ => {
                let j = self.log_jet_unchecked(r);
                j.ln_f.exp() * j.log_derivative
            }
        })
    }

    /// Second derivative `f″(r)`.
    pub fn f_second(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.family {
            ModelSpace::Euclidean => 0.0,
            ModelSpace::Hyperbolic => r.sinh(),
            ModelSpace::Exponential { c } => c * c * (c * r).exp(),
            _ => {
                let j = self.log_jet_unchecked(r);
                j.ln_f.exp() * j.second_ratio
            }
        })
    }

    /// Log-derivative `f′/f` at `r`.
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        Ok(self.log_jet(r)?.log_derivative)
    }

    /// Radial curvature `K = −f″/f` and log-derivative at `r`.
    pub fn curvature(&self, r: f64) -> Result<CurvatureReport> {
        self.check(r)?;
        let k = match self.family {
            ModelSpace::Euclidean => 0.0,
            ModelSpace::Hyperbolic => -1.0,
            _ => -self.log_jet_unchecked(r).second_ratio,
        };
        Ok(CurvatureReport { r, k, log_derivative: self.log_jet_unchecked(r).log_derivative })
    }

    /// Asymptotic classification from `r·f′/f` sampled at `r_max·10^k`.
    pub fn tail_class(&self, r_max: f64) -> TailClass {
        let e0 = r_max * self.log_jet_unchecked(r_max).log_derivative;
        let far = r_max * 1e6;
        let e1 = far * self.log_jet_unchecked(far).log_derivative;
        if e1 > e0 * (1.0 + 1e-6) && e1 > 1e-300 {
            TailClass::Superpolynomial
        } else {
            TailClass::PowerLaw { order: e1 }
        }
    }

    /// Transience and angle-convergence integrals on `[1, r_max]` plus
    /// asymptotic tails; verdicts come from the tail classification.
    pub fn integrability_report(&self, d: usize, r_max: f64) -> Result<IntegrabilityReport> {
        if d < 3 {
            return Err(Error::ParameterDomain { name: "d", value: d as f64, reason: "integrability criteria need d ≥ 3" });
        }
        if !(r_max >= 10.0 && r_max.is_finite()) {
            return Err(Error::ParameterDomain { name: "r_max", value: r_max, reason: "must be at least 10" });
        }
        let dm = d as f64;
        let tail = self.tail_class(r_max);
        const MARGIN: f64 = 1e-9;
        let (transient, angle) = match tail {
            TailClass::Superpolynomial => (true, true),
            TailClass::PowerLaw { order } => (order * (dm - 1.0) > 1.0 + MARGIN, order > 2.0 + MARGIN),
        };
        let jet_max = self.log_jet_unchecked(r_max);
        // ∫_{r_max}^∞ f^{1−d} from the asymptotic form of f.
        let transience_tail = match tail {
            TailClass::PowerLaw { order } if transient => {
                ((1.0 - dm) * jet_max.ln_f).exp() * r_max / (order * (dm - 1.0) - 1.0)
            }
            TailClass::Superpolynomial => ((1.0 - dm) * jet_max.ln_f).exp() / ((dm - 1.0) * jet_max.log_derivative),
            _ => 0.0,
        };
        let lnf = |x: f64| self.log_jet_unchecked(x).ln_f;
        let q = numerics::integrate_dyadic(|x| ((1.0 - dm) * lnf(x)).exp(), 1.0, r_max, 1e-15, 1e-11, 4000)?;
        let transience_integral = if transient {
            IntegralValue::Finite { value: q.value + transience_tail }
        } else {
            IntegralValue::Infinite { truncated: q.value }
        };

        // Inner integral G(r) = ∫_r^{r_max} f^{1−d} + tail, scaled by f^{d−2}(r)
        // inside the exponent to avoid overflow.
        let mut inner_err: Option<Error> = None;
        let outer = numerics::integrate_dyadic(
            |x| {
                let lx = (dm - 2.0) * lnf(x);
                let head = numerics::integrate_dyadic(|y| (lx + (1.0 - dm) * lnf(y)).exp(), x, r_max, 1e-300, 1e-11, 4000);
                match head {
                    Ok(h) => {
                        let t = if transient { (lx + transience_tail.ln()).exp() } else { 0.0 };
                        h.value + t
                    }
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        0.0
                    }
                }
            },
            1.0,
            r_max,
            1e-15,
            1e-9,
            4000,
        );
        if let Some(e) = inner_err {
            return Err(e);
        }
        let outer = outer?;
        let angle_integral = if angle {
            let outer_tail = match tail {
                TailClass::PowerLaw { order } => {
                    r_max * r_max * (-jet_max.ln_f).exp() / ((order * (dm - 1.0) - 1.0) * (order - 2.0))
                }
                TailClass::Superpolynomial => {
                    (-jet_max.ln_f).exp() / ((dm - 1.0) * jet_max.log_derivative * jet_max.log_derivative)
                }
            };
            IntegralValue::Finite { value: outer.value + outer_tail }
        } else {
            IntegralValue::Infinite { truncated: outer.value }
        };
        Ok(IntegrabilityReport {
            transience_integral,
            angle_integral,
            d,
            r_max,
            tail,
            radial_transient: transient,
            angle_converges: angle,
        })
    }
}

/// Integrability report for `metric` in dimension `d` with cutoff `r_max`.
pub fn integrability_report(metric: &WarpedMetric, d: usize, r_max: f64) -> Result<IntegrabilityReport> {
    metric.integrability_report(d, r_max)
}

/// Tolerance on `|ṙ| − 1` accepted before a state is rejected.
pub const RDOT_TOLERANCE: f64 = 1e-9;
/// Distance from ±1 at which `ṙ` is clamped.
pub const RDOT_CLAMP: f64 = 1e-12;

/// Clamps `ṙ` into `[−1 + ε̂, 1 − ε̂]`, rejecting values beyond `1 + 1e-9`.
pub fn clamp_rdot(rdot: f64) -> Result<f64> {
    if !rdot.is_finite() || rdot.abs() > 1.0 + RDOT_TOLERANCE {
        return Err(Error::State(format!("|rdot| = {} exceeds 1", rdot.abs())));
    }
    Ok(rdot.clamp(-1.0 + RDOT_CLAMP, 1.0 - RDOT_CLAMP))
}

/// Drift and diffusion coefficients of the polar and normalized angular
/// systems at the state `(r, ṙ, θ, v)`.
///
/// Radial terms use `ṙ` as given (after rejecting `|ṙ| > 1 + 1e-9`), so the
/// radial noise vanishes at `|ṙ| = 1`. Terms carrying `1/(1 − ṙ²)` use the
/// clamped value.
pub fn polar_coefficients(
    metric: &WarpedMetric,
    r: f64,
    rdot: f64,
    theta: &[f64],
    v: &[f64],
    sigma: f64,
    d: usize,
) -> Result<PolarCoefficients> {
    if theta.len() != d || v.len() != d {
        return Err(Error::State(format!("angular vectors must have length d = {d}")));
    }
    let clamped = clamp_rdot(rdot)?;
    let rd = rdot.clamp(-1.0, 1.0);
    let jet = metric.log_jet(r)?;
    let one_minus = 1.0 - rd * rd;
    let one_minus_c = 1.0 - clamped * clamped;
    let dm = d as f64;
    let s2 = sigma * sigma;
    let alpha = one_minus.sqrt() * (-jet.ln_f).exp();
    let damping = 0.5 * s2 * (dm - 2.0) / one_minus_c;
    Ok(PolarCoefficients {
        r_drift: rd,
        rdot_drift: -0.5 * s2 * (dm - 1.0) * rd + jet.log_derivative * one_minus,
        rdot_noise: sigma * one_minus.sqrt(),
        alpha,
        theta_drift: v.iter().map(|x| alpha * x).collect(),
        v_drift: theta.iter().zip(v).map(|(t, x)| -alpha * t - damping * x).collect(),
        angular_noise_scale: sigma / one_minus_c.sqrt(),
        theta: theta.to_vec(),
        v: v.to_vec(),
    })
}
