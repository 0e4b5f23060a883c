//! Property tests for the warped metrics: curvature against finite
//! differences, monotone log-derivatives and the integrability thresholds.

use kbm_lab::geometry::{model_space, ModelSpace, WarpedMetric};
use proptest::prelude::*;

fn models() -> Vec<WarpedMetric> {
    [
        ModelSpace::Euclidean,
        ModelSpace::Hyperbolic,
        ModelSpace::Polynomial { beta: 0.5 },
        ModelSpace::Polynomial { beta: 1.5 },
        ModelSpace::Polynomial { beta: 2.0 },
        ModelSpace::Polynomial { beta: 3.0 },
        ModelSpace::Subexponential { beta: 0.5 },
        ModelSpace::Exponential { c: 1.0 },
        ModelSpace::Exponential { c: 2.0 },
    ]
    .into_iter()
    .map(|m| model_space(m).unwrap())
    .collect()
}

/// Five-point second difference of `f` divided by `f`.
fn fd_curvature(m: &WarpedMetric, r: f64) -> f64 {
    let h = 1e-3 * r;
    let f = |x: f64| m.f(x).unwrap();
    let f2 = (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h) - f(r - 2.0 * h)) / (12.0 * h * h);
    -f2 / f(r)
}

fn assert_curvature_matches(m: &WarpedMetric, r: f64) {
    let k = m.curvature(r).unwrap().k;
    let fd = fd_curvature(m, r);
    // Relative error, with an absolute floor on the natural scale 1/r².
    let scale = k.abs().max(1.0 / (r * r));
    assert!((k - fd).abs() <= 1e-5 * scale, "{}: r = {r}, K = {k}, finite difference {fd}", m.tag());
}

#[test]
fn curvature_matches_finite_differences_on_log_grid() {
    for m in models() {
        for k in -16..=12 {
            let r = 10f64.powf(k as f64 / 8.0);
            assert_curvature_matches(&m, r);
        }
    }
}

proptest! {
    #[test]
    fn curvature_matches_finite_differences_at_random_radii(log_r in -2.0f64..1.5, which in 0usize..9) {
        let m = &models()[which];
        assert_curvature_matches(m, 10f64.powf(log_r));
    }

    #[test]
    fn log_derivative_is_non_increasing(
        family in 0usize..3,
        beta in 0.1f64..10.0,
        mut grid in proptest::collection::vec(-3.0f64..3.0, 2..40),
    ) {
        let space = match family {
            0 => ModelSpace::Euclidean,
            1 => ModelSpace::Hyperbolic,
            _ => ModelSpace::Polynomial { beta },
        };
        let m = model_space(space).unwrap();
        grid.sort_by(f64::total_cmp);
        let vals: Vec<f64> = grid.iter().map(|l| m.log_derivative(10f64.powf(*l)).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-300, "{}: {:?}", m.tag(), w);
        }
    }

    #[test]
    fn polynomial_verdicts_follow_beta_thresholds(beta in 0.2f64..5.0) {
        prop_assume!((beta - 0.5).abs() > 0.05 && (beta - 2.0).abs() > 0.05);
        let d = 3;
        let rep = model_space(ModelSpace::Polynomial { beta }).unwrap().integrability_report(d, 100.0).unwrap();
        prop_assert_eq!(rep.radial_transient, beta * (d as f64 - 1.0) > 1.0, "β = {}", beta);
        prop_assert_eq!(rep.angle_converges, beta > 2.0, "β = {}", beta);
        prop_assert_eq!(rep.transience_integral.is_finite(), rep.radial_transient);
        prop_assert_eq!(rep.angle_integral.is_finite(), rep.angle_converges);
    }
}

#[test]
fn exponential_log_derivative_and_curvature() {
    let m = model_space(ModelSpace::Exponential { c: 1.0 }).unwrap();
    assert!((m.log_derivative(5.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((m.curvature(5.0).unwrap().k + 1.0).abs() < 1e-14);
}

#[test]
fn euclidean_log_derivative_is_reciprocal() {
    let m = model_space(ModelSpace::Euclidean).unwrap();
    for r in [1e-3, 0.5, 2.0, 40.0] {
        assert!((m.log_derivative(r).unwrap() * r - 1.0).abs() < 1e-14);
    }
}
