//! Cartan development and anti-development on a warped product
//! `dr² + f(r)²dθ²`, in the polar chart with extrinsic `θ ∈ S^{d−1} ⊂ ℝ^d`.
//!
//! A tangent vector at `(r, θ)` is stored as `(w_r, W)` with `W · θ = 0`, and
//! the metric reads `⟨(a, A), (b, B)⟩ = ab + f(r)² A·B`. Parallel transport
//! along a curve with velocity `(ṙ, Θ̇)` solves
//!
//! * `ẇ_r = f f′ (Θ̇ · W)`
//! * `Ẇ = −(f′/f)(ṙ W + w_r Θ̇) − (Θ̇ · W) θ`
//!
//! which keeps `W` tangent to the sphere and preserves the metric.

use crate::error::{Error, Result};
use crate::geometry::WarpedMetric;
use crate::io;
use crate::kbm::{pole_substep_count, PolarState};
use crate::numerics::{self, dot, normalize, orthogonalize_against};
use crate::roughpath::{solve_rde_step2, Level2Path, VectorFields};
use serde::Serialize;
use std::path::Path;

/// Tolerance of the frame orthonormality invariant.
pub const FRAME_TOLERANCE: f64 = 1e-8;

/// Base point with an orthonormal frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameState {
    pub r: f64,
    pub theta: Vec<f64>,
    /// Column `i` is `(w_r, W_1, …, W_d)` for the frame vector `e_i`.
    pub frame: Vec<Vec<f64>>,
}

impl FrameState {
    /// Validated frame state.
    pub fn new(metric: &WarpedMetric, r: f64, theta: Vec<f64>, frame: Vec<Vec<f64>>) -> Result<Self> {
        let s = FrameState { r, theta, frame };
        s.validate(metric, FRAME_TOLERANCE)?;
        Ok(s)
    }

    /// Frame whose first vector is the velocity of a polar state, whose
    /// second vector lies in the plane spanned by the radial direction and
    /// `v`, and whose remaining vectors are angular.
    pub fn from_polar(metric: &WarpedMetric, p: &PolarState) -> Result<Self> {
        let d = p.theta.len();
        let f = metric.f(p.r)?;
        let s = (1.0 - p.rdot * p.rdot).max(0.0).sqrt();
        let col = |a: f64, w: &[f64], scale: f64| {
            let mut c = Vec::with_capacity(d + 1);
            c.push(a);
            c.extend(w.iter().map(|x| x * scale));
            c
        };
        let mut frame = vec![col(p.rdot, &p.v, s / f), col(s, &p.v, -p.rdot / f)];
        let mut basis = vec![p.theta.clone(), p.v.clone()];
        for k in 0..d {
            if basis.len() == d {
                break;
            }
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    orthogonalize_against(&mut e, b);
                }
            }
            if numerics::norm(&e) > 1e-6 {
                normalize(&mut e);
                frame.push(col(0.0, &e, 1.0 / f));
                basis.push(e);
            }
        }
        FrameState::new(metric, p.r, p.theta.clone(), frame)
    }

    /// Frame with `e_1` radial and the remaining vectors angular, completing
    /// `θ` to an orthonormal basis of `ℝ^d`.
    pub fn radial(metric: &WarpedMetric, r: f64, theta: Vec<f64>) -> Result<Self> {
        let d = theta.len();
        let mut v = vec![0.0; d];
        let k = (0..d).min_by(|a, b| theta[*a].abs().total_cmp(&theta[*b].abs())).unwrap_or(0);
        v[k] = 1.0;
        orthogonalize_against(&mut v, &theta);
        normalize(&mut v);
        let mut s = FrameState::from_polar(metric, &PolarState { r, rdot: 1.0, theta, v })?;
        // With ṙ = 1 the second vector is −v/f; flip it for a positive orientation.
        for x in s.frame[1].iter_mut() {
            *x = -*x;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Gram matrix of the frame under the metric.
    pub fn gram(&self, metric: &WarpedMetric) -> Result<Vec<Vec<f64>>> {
        let f2 = metric.f(self.r)?.powi(2);
        Ok(self.frame.iter().map(|a| self.frame.iter().map(|b| g_inner(f2, a, b)).collect()).collect())
    }

    pub fn validate(&self, metric: &WarpedMetric, tol: f64) -> Result<()> {
        let d = self.theta.len();
        if d < 2 || self.frame.len() != d || self.frame.iter().any(|c| c.len() != d + 1) {
            return Err(Error::State(format!("a frame in dimension {d} needs {d} columns of length {}", d + 1)));
        }
        if !(self.r > metric.domain_min()) {
            return Err(Error::Domain { r: self.r, domain_min: metric.domain_min() });
        }
        if (numerics::norm(&self.theta) - 1.0).abs() > tol {
            return Err(Error::State("theta is not a unit vector".into()));
        }
        for c in &self.frame {
            if dot(&c[1..], &self.theta).abs() > tol {
                return Err(Error::State("frame vector is not tangent to the sphere".into()));
            }
        }
        let g = self.gram(metric)?;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (v - target).abs() > tol {
                    return Err(Error::State(format!("frame Gram entry ({i}, {j}) = {v}")));
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn g_inner(f2: f64, a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + f2 * dot(&a[1..], &b[1..])
}

/// Flat layout `[r, θ, e_1, …, e_d]` used by the integrators.
fn pack(s: &FrameState) -> Vec<f64> {
    let mut y = Vec::with_capacity(1 + s.dim() + s.dim() * (s.dim() + 1));
    y.push(s.r);
    y.extend(&s.theta);
    for c in &s.frame {
        y.extend(c);
    }
    y
}

fn unpack(y: &[f64], d: usize) -> FrameState {
    let frame = (0..d).map(|i| y[1 + d + i * (d + 1)..1 + d + (i + 1) * (d + 1)].to_vec()).collect();
    FrameState { r: y[0], theta: y[1..1 + d].to_vec(), frame }
}

/// Time derivative of the packed state when the base point moves with chart
/// velocity `(rdot, thetadot)` and the frame is parallel transported.
fn transport_rhs(metric: &WarpedMetric, d: usize, y: &[f64], rdot: f64, thetadot: &[f64], out: &mut [f64]) {
    let jet = metric.log_jet_unchecked(y[0]);
    let l = jet.log_derivative;
    let ff = (2.0 * jet.ln_f).exp() * l;
    let theta = &y[1..1 + d];
    out[0] = rdot;
    out[1..1 + d].copy_from_slice(thetadot);
    for i in 0..d {
        let o = 1 + d + i * (d + 1);
        let wr = y[o];
        let w = &y[o + 1..o + 1 + d];
        let tw = dot(thetadot, w);
        out[o] = ff * tw;
        for j in 0..d {
            out[o + 1 + j] = -l * (rdot * w[j] + wr * thetadot[j]) - tw * theta[j];
        }
    }
}

/// Horizontal vector field for control velocity `mdot`.
fn horizontal_rhs(metric: &WarpedMetric, d: usize, y: &[f64], mdot: &[f64], out: &mut [f64]) {
    let mut rdot = 0.0;
    let mut thetadot = vec![0.0; d];
    for (i, m) in mdot.iter().enumerate() {
        if *m != 0.0 {
            let o = 1 + d + i * (d + 1);
            rdot += m * y[o];
            for j in 0..d {
                thetadot[j] += m * y[o + 1 + j];
            }
        }
    }
    transport_rhs(metric, d, y, rdot, &thetadot, out);
}

/// Restores `|θ| = 1`, tangency of the frame and `g`-orthonormality by
/// Gram–Schmidt under the metric.
fn reproject(metric: &WarpedMetric, d: usize, y: &mut [f64]) {
    let (head, frames) = y.split_at_mut(1 + d);
    normalize(&mut head[1..]);
    let theta = head[1..].to_vec();
    let f2 = (2.0 * metric.log_jet_unchecked(head[0]).ln_f).exp();
    for i in 0..d {
        let (done, rest) = frames.split_at_mut(i * (d + 1));
        let c = &mut rest[..d + 1];
        orthogonalize_against(&mut c[1..], &theta);
        for k in 0..i {
            let b = &done[k * (d + 1)..(k + 1) * (d + 1)];
            let p = g_inner(f2, c, b);
            for (x, y) in c.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
        let n = g_inner(f2, c, c).sqrt();
        if n > 0.0 && n != 1.0 {
            for x in c.iter_mut() {
                *x /= n;
            }
        }
    }
}

/// Developed path with its parallel frames.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Development {
    pub times: Vec<f64>,
    pub states: Vec<FrameState>,
}

impl Development {
    pub fn last(&self) -> &FrameState {
        self.states.last().expect("developments hold at least one sample")
    }

    /// Writes `t, r, theta_1..d` to `base` and the `d×(d+1)` frame entries
    /// `t, e1_r, e1_1..e1_d, …` to `frames`.
    pub fn write_csv(&self, base: &Path, frames: &Path) -> Result<()> {
        let d = self.states[0].dim();
        let mut hb = vec!["t".to_string(), "r".to_string()];
        hb.extend((1..=d).map(|i| format!("theta_{i}")));
        io::write_table(
            base,
            &hb,
            self.times.iter().zip(&self.states).map(|(t, s)| {
                let mut row = vec![*t, s.r];
                row.extend(&s.theta);
                row
            }),
        )?;
        let mut hf = vec!["t".to_string()];
        for i in 1..=d {
            hf.push(format!("e{i}_r"));
            hf.extend((1..=d).map(|j| format!("e{i}_{j}")));
        }
        io::write_table(
            frames,
            &hf,
            self.times.iter().zip(&self.states).map(|(t, s)| {
                let mut row = vec![*t];
                for c in &s.frame {
                    row.extend(c);
                }
                row
            }),
        )
    }
}

fn check_driver(times: &[f64], driver: &[Vec<f64>], d: usize) -> Result<()> {
    if times.len() != driver.len() || times.len() < 2 {
        return Err(Error::Input("driver needs at least 2 samples with matching times".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("driver times must increase strictly".into()));
    }
    if driver.iter().any(|p| p.len() != d) {
        return Err(Error::Input(format!("driver samples must have dimension {d}")));
    }
    if numerics::norm(&driver[0]) > 1e-12 {
        return Err(Error::Input("driver must start at the origin".into()));
    }
    Ok(())
}

fn rk4<F: FnMut(&[f64], &mut [f64])>(y: &mut [f64], mut rhs: F, k: &mut [Vec<f64>; 5]) {
    let n = y.len();
    let [k1, k2, k3, k4, tmp] = k;
    rhs(y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * k1[i];
    }
    rhs(tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * k2[i];
    }
    rhs(tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + k3[i];
    }
    rhs(tmp, k4);
    for i in 0..n {
        y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
}

/// Flows the packed state along the linear control `dm`, split into equal
/// pieces near the pole, and reprojects after every piece.
fn flow_increment(
    metric: &WarpedMetric,
    d: usize,
    y: &mut [f64],
    dm: &mut [f64],
    k: &mut [Vec<f64>; 5],
    step: usize,
    time: f64,
) -> Result<()> {
    let pieces = pole_substep_count(numerics::norm(dm), y[0]);
    if pieces > 1 {
        dm.iter_mut().for_each(|v| *v /= pieces as f64);
    }
    for _ in 0..pieces {
        rk4(y, |z, o| horizontal_rhs(metric, d, z, dm, o), k);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowUp { step: step as u64, detail: "development produced a non-finite state".into() });
        }
        if !(y[0] > metric.domain_min()) {
            return Err(Error::DomainExit { time, r: y[0] });
        }
        reproject(metric, d, y);
    }
    Ok(())
}

/// Develops an `ℝ^d` driver starting at the origin.
///
/// On each driver interval the control is linear, so the horizontal flow is
/// autonomous there and is integrated by one classical Runge–Kutta step in
/// the increment, followed by reprojection of `θ` and the frame. Near the
/// pole the increment is split so that each piece moves at most a fixed
/// fraction of the current radius.
pub fn develop(metric: &WarpedMetric, frame0: &FrameState, times: &[f64], driver: &[Vec<f64>]) -> Result<Development> {
    let d = frame0.dim();
    frame0.validate(metric, FRAME_TOLERANCE)?;
    check_driver(times, driver, d)?;
    let mut y = pack(frame0);
    let n = y.len();
    let mut k: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut out = Development { times: times.to_vec(), states: Vec::with_capacity(times.len()) };
    out.states.push(frame0.clone());
    let mut dm = vec![0.0; d];
    for s in 1..times.len() {
        for i in 0..d {
            dm[i] = driver[s][i] - driver[s - 1][i];
        }
        flow_increment(metric, d, &mut y, &mut dm, &mut k, s, times[s])?;
        out.states.push(unpack(&y, d));
    }
    Ok(out)
}

/// Radius of the development at the final driver time, without storing
/// intermediate states.
pub fn develop_terminal(metric: &WarpedMetric, frame0: &FrameState, times: &[f64], driver: &[Vec<f64>]) -> Result<FrameState> {
    let d = frame0.dim();
    frame0.validate(metric, FRAME_TOLERANCE)?;
    check_driver(times, driver, d)?;
    let mut y = pack(frame0);
    let n = y.len();
    let mut k: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut dm = vec![0.0; d];
    for s in 1..times.len() {
        for i in 0..d {
            dm[i] = driver[s][i] - driver[s - 1][i];
        }
        flow_increment(metric, d, &mut y, &mut dm, &mut k, s, times[s])?;
    }
    Ok(unpack(&y, d))
}

/// Anti-development: recovers the `ℝ^d` driver of a sampled manifold path
/// `(r_k, θ_k)` from an initial frame.
///
/// Each chart segment is traversed linearly while the frame is parallel
/// transported by one Runge–Kutta step. The increment is
/// `dm^i = ⟨e_i, Δx⟩_g` evaluated at the segment midpoint.
pub fn antidevelop(metric: &WarpedMetric, frame0: &FrameState, r: &[f64], theta: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = frame0.dim();
    frame0.validate(metric, FRAME_TOLERANCE)?;
    if r.len() != theta.len() || r.is_empty() {
        return Err(Error::Input("radius and angle series must be non-empty and of equal length".into()));
    }
    if (r[0] - frame0.r).abs() > 1e-12 || numerics::norm(&theta[0].iter().zip(&frame0.theta).map(|(a, b)| a - b).collect::<Vec<_>>()) > 1e-12 {
        return Err(Error::Input("path must start at the base point of the frame".into()));
    }
    let mut y = pack(frame0);
    let n = y.len();
    let mut k: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
    let mut m = vec![vec![0.0; d]];
    let mut cur = vec![0.0; d];
    let mut mid = vec![0.0; n];
    let mut rhs_buf = vec![0.0; n];
    for s in 1..r.len() {
        let dr = r[s] - r[s - 1];
        let dth: Vec<f64> = theta[s].iter().zip(&theta[s - 1]).map(|(a, b)| a - b).collect();
        // Midpoint frame by a half Runge–Kutta step of the transport flow.
        mid.copy_from_slice(&y);
        transport_rhs(metric, d, &y, dr, &dth, &mut rhs_buf);
        for i in 0..n {
            mid[i] = y[i] + 0.5 * rhs_buf[i];
        }
        transport_rhs(metric, d, &mid, dr, &dth, &mut rhs_buf);
        for i in 0..n {
            mid[i] = y[i] + 0.5 * rhs_buf[i];
        }
        let f2 = (2.0 * metric.log_jet_unchecked(mid[0]).ln_f).exp();
        let mut disp = Vec::with_capacity(d + 1);
        disp.push(dr);
        disp.extend(&dth);
        for i in 0..d {
            let o = 1 + d + i * (d + 1);
            cur[i] += g_inner(f2, &mid[o..o + d + 1], &disp);
        }
        m.push(cur.clone());
        rk4(&mut y, |z, o| transport_rhs(metric, d, z, dr, &dth, o), &mut k);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("degenerate frame at sample {s}")));
        }
        y[0] = r[s];
        y[1..1 + d].copy_from_slice(&theta[s]);
        reproject(metric, d, &mut y);
    }
    Ok(m)
}

/// Horizontal vector fields `A_k(y)` on the packed frame state.
pub struct HorizontalFields<'a> {
    pub metric: &'a WarpedMetric,
    pub d: usize,
}

impl VectorFields for HorizontalFields<'_> {
    fn state_dim(&self) -> usize {
        1 + self.d + self.d * (self.d + 1)
    }
    fn driver_dim(&self) -> usize {
        self.d
    }
    fn fields(&self, y: &[f64], out: &mut [f64]) {
        let n = self.state_dim();
        let mut e = vec![0.0; self.d];
        for k in 0..self.d {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[k] = 1.0;
            horizontal_rhs(self.metric, self.d, y, &e, &mut out[k * n..(k + 1) * n]);
        }
    }
    fn project(&self, y: &mut [f64]) {
        reproject(self.metric, self.d, y);
    }
    fn substeps(&self, y: &[f64], size: f64) -> usize {
        pole_substep_count(size, y[0])
    }
}

/// Rough development: the step-2 Euler solver applied to the horizontal
/// fields, with frame reprojection after every driver interval.
pub fn develop_rough(metric: &WarpedMetric, frame0: &FrameState, driver: &Level2Path) -> Result<Development> {
    let d = frame0.dim();
    frame0.validate(metric, FRAME_TOLERANCE)?;
    if driver.dim() != d {
        return Err(Error::Input(format!("driver has dimension {} instead of {d}", driver.dim())));
    }
    let fields = HorizontalFields { metric, d };
    let sol = solve_rde_step2(&fields, driver, &pack(frame0), 1)?;
    let mut out = Development { times: sol.times, states: Vec::with_capacity(sol.states.len()) };
    for (t, y) in out.times.iter().zip(&sol.states) {
        if !(y[0] > metric.domain_min()) {
            return Err(Error::DomainExit { time: *t, r: y[0] });
        }
        out.states.push(unpack(y, d));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{model_space, ModelSpace};

    fn line_driver(v: &[f64], n: usize, t: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let times: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
        let pts = times.iter().map(|s| v.iter().map(|c| c * s).collect()).collect();
        (times, pts)
    }

    #[test]
    fn radial_driver_is_radial_geodesic() {
        for fam in [ModelSpace::Hyperbolic, ModelSpace::Polynomial { beta: 2.0 }, ModelSpace::Euclidean] {
            let m = model_space(fam).unwrap();
            let f0 = FrameState::radial(&m, 1.0, vec![0.0, 0.6, 0.8]).unwrap();
            let (t, p) = line_driver(&[1.0, 0.0, 0.0], 200, 2.0);
            let dev = develop(&m, &f0, &t, &p).unwrap();
            for (s, st) in t.iter().zip(&dev.states) {
                assert!((st.r - 1.0 - s).abs() < 1e-12);
                st.validate(&m, 1e-10).unwrap();
            }
        }
    }

    #[test]
    fn transport_preserves_metric_in_finite_differences() {
        let m = model_space(ModelSpace::Hyperbolic).unwrap();
        let p = PolarState { r: 1.3, rdot: 0.4, theta: vec![1.0, 0.0, 0.0], v: vec![0.0, 0.0, 1.0] };
        let f0 = FrameState::from_polar(&m, &p).unwrap();
        let y = pack(&f0);
        let n = y.len();
        let mut out = vec![0.0; n];
        horizontal_rhs(&m, 3, &y, &[0.3, -0.5, 0.8], &mut out);
        let h = 1e-6;
        let plus: Vec<f64> = y.iter().zip(&out).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = y.iter().zip(&out).map(|(a, b)| a - h * b).collect();
        let (sp, sm) = (unpack(&plus, 3), unpack(&minus, 3));
        let (gp, gm) = (sp.gram(&m).unwrap(), sm.gram(&m).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert!(((gp[i][j] - gm[i][j]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn flat_development_reproduces_driver() {
        let m = model_space(ModelSpace::Euclidean).unwrap();
        let theta = vec![1.0, 0.0, 0.0];
        let f0 = FrameState::radial(&m, 2.0, theta.clone()).unwrap();
        let n = 2000;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let drv: Vec<Vec<f64>> = times.iter().map(|t| vec![0.5 * (3.0 * t).sin(), t * t, 0.3 * t]).collect();
        let dev = develop(&m, &f0, &times, &drv).unwrap();
        // Cartesian position r·θ against x₀ + E·m with E the initial frame.
        let e: Vec<Vec<f64>> = f0.frame.iter().map(|c| (0..3).map(|j| c[0] * theta[j] + 2.0 * c[1 + j]).collect()).collect();
        for (st, mm) in dev.states.iter().zip(&drv) {
            for j in 0..3 {
                let exact = 2.0 * theta[j] + (0..3).map(|i| e[i][j] * mm[i]).sum::<f64>();
                assert!((st.r * st.theta[j] - exact).abs() < 1e-3 / n as f64 * 10.0);
            }
        }
    }

    #[test]
    fn antidevelop_radial_geodesic_is_line() {
        let m = model_space(ModelSpace::Hyperbolic).unwrap();
        let f0 = FrameState::radial(&m, 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let r: Vec<f64> = (0..=100).map(|k| 1.0 + k as f64 * 0.01).collect();
        let th = vec![vec![1.0, 0.0, 0.0]; 101];
        let mm = antidevelop(&m, &f0, &r, &th).unwrap();
        for (k, p) in mm.iter().enumerate() {
            assert!((p[0] - k as f64 * 0.01).abs() < 1e-12 && p[1].abs() < 1e-14 && p[2].abs() < 1e-14);
        }
    }

    #[test]
    fn antidevelop_flat_circle_keeps_circumference() {
        let m = model_space(ModelSpace::Euclidean).unwrap();
        let r0 = 1.5;
        let p = PolarState { r: r0, rdot: 0.0, theta: vec![1.0, 0.0, 0.0], v: vec![0.0, 1.0, 0.0] };
        let f0 = FrameState::from_polar(&m, &p).unwrap();
        let n = 4000;
        let th: Vec<Vec<f64>> = (0..=n).map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vec![a.cos(), a.sin(), 0.0]
        }).collect();
        let mm = antidevelop(&m, &f0, &vec![r0; n + 1], &th).unwrap();
        let len: f64 = mm.windows(2).map(|w| numerics::norm(&w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect::<Vec<_>>())).sum();
        assert!((len - 2.0 * std::f64::consts::PI * r0).abs() < 1e-4, "{len}");
        // Rolling a flat circle without slipping returns a closed curve.
        assert!(numerics::norm(&mm[n]) < 1e-4);
    }
}
