//! Small numerical kernels: adaptive Gauss–Kronrod quadrature, dense vector
//! helpers and orthogonal reprojection of square matrices.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Fixed 15-point Kronrod rule on `[a, b]` with the embedded 7-point Gauss
/// difference as error estimate.
pub fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive quadrature on `[a, b]` with `0 < a`, split at the points `a·2^k`.
///
/// Each dyadic panel is integrated separately, so integrands concentrated
/// near `a` on long ranges are resolved rather than missed by the first
/// Kronrod rule. The absolute tolerance is shared evenly between panels.
pub fn integrate_dyadic<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("dyadic quadrature needs 0 < a and finite bounds, got [{a}, {b}]")));
    }
    if b <= a {
        return integrate(f, a, b, abs_tol, rel_tol, max_intervals);
    }
    let panels = (b / a).log2().ceil().max(1.0) as usize;
    let mut total = Quadrature { value: 0.0, error_estimate: 0.0, evaluations: 0 };
    let mut lo = a;
    for k in 0..panels {
        let hi = if k + 1 == panels { b } else { (lo * 2.0).min(b) };
        let q = integrate(&mut f, lo, hi, abs_tol / panels as f64, rel_tol, max_intervals)?;
        total.value += q.value;
        total.error_estimate += q.error_estimate;
        total.evaluations += q.evaluations;
        lo = hi;
    }
    Ok(total)
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `f` on `[a, b]`.
///
/// Intervals with the largest error estimate are bisected until the total
/// estimate falls below `max(abs_tol, rel_tol·|value|)`. Failure to converge
/// within `max_intervals` subdivisions is reported as [`Error::Quadrature`].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Input(format!("quadrature bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e) = kronrod15(&mut f, a, b);
    intervals.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature { a, b, estimate: value, error_estimate: error, evaluations });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature { value, error_estimate: error, evaluations });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::Quadrature { a, b, estimate: value, error_estimate: error, evaluations });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, iv)| if iv.3 > acc.1 { (i, iv.3) } else { acc });
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Euclidean inner product.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Squared-norm and inner-product deviations below which [`normalize`] and
/// [`orthogonalize_against`] leave their input unchanged.
pub const SNAP_TOLERANCE: f64 = 8.0 * f64::EPSILON;

/// Scales `a` to unit length in place. Leaves vectors whose squared norm is
/// within [`SNAP_TOLERANCE`] of one untouched.
#[inline]
pub fn normalize(a: &mut [f64]) {
    let n2 = dot(a, a);
    if (n2 - 1.0).abs() > SNAP_TOLERANCE && n2 > 0.0 {
        let inv = 1.0 / n2.sqrt();
        for x in a.iter_mut() {
            *x *= inv;
        }
    }
}

/// Removes from `v` its component along the unit vector `u`.
///
/// Components below [`SNAP_TOLERANCE`] are left in place so that the
/// operation fixes vectors that are already orthogonal to rounding.
#[inline]
pub fn orthogonalize_against(v: &mut [f64], u: &[f64]) {
    let p = dot(v, u);
    if p.abs() > SNAP_TOLERANCE {
        for (x, y) in v.iter_mut().zip(u) {
            *x -= p * y;
        }
    }
}

/// Frobenius norm of `mᵀm − I`.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    let gram = m.transpose() * m;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let e = gram[(i, j)] - target;
            s += e * e;
        }
    }
    s.sqrt()
}

/// Replaces `m` by the orthogonal factor of its polar decomposition.
///
/// Uses the Newton–Schulz iteration `X ← ½X(3I − XᵀX)`, which converges
/// quadratically for matrices close to the orthogonal group. Matrices whose
/// defect is already below 1e-15 are left unchanged, so the map is idempotent.
pub fn reproject_orthogonal(m: &mut DMatrix<f64>) -> Result<()> {
    let n = m.ncols();
    for _ in 0..20 {
        let defect = orthogonality_defect(m);
        if !defect.is_finite() || defect > 0.5 {
            return Err(Error::Numerical(format!(
                "matrix too far from the orthogonal group for reprojection (defect {defect:e})"
            )));
        }
        if defect <= 1e-15 {
            return Ok(());
        }
        let gram = m.transpose() * &*m;
        let corr = DMatrix::<f64>::identity(n, n) * 3.0 - gram;
        *m = &*m * corr * 0.5;
    }
    Ok(())
}

/// Cayley transform `(I − A/2)⁻¹(I + A/2)` of a skew-symmetric matrix.
///
/// The result is orthogonal to round-off for every skew input.
pub fn cayley(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let lhs = &id - a * 0.5;
    let rhs = &id + a * 0.5;
    lhs.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Cayley system".into()))
}
