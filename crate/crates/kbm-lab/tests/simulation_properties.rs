//! Property tests for the simulators: projections, state constraints,
//! determinism, symmetry and law-level consistency between simulators.

use kbm_lab::geometry::{model_space, ModelSpace};
use kbm_lab::kbm::{
    self, EuclideanState, EuclideanSystem, HyperbolicPlaneState, HyperbolicPlaneSystem, PolarState, PolarSystem, RadialState,
};
use kbm_lab::sde::{self, NoiseStream, SdeSystem, SphereBrownianMotion, StepScheme, StepWorkspace};
use kbm_lab::stats::{ks_two_sample, EnsembleSummary};
use proptest::prelude::*;
use rayon::prelude::*;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn assert_idempotent<S: SdeSystem>(sys: &S, mut x: Vec<f64>) -> Result<(), TestCaseError> {
    sys.project(&mut x);
    let once = x.clone();
    sys.project(&mut x);
    let err = max_abs_diff(&once, &x);
    prop_assert!(err <= 1e-15, "projection moved the state by {err}");
    Ok(())
}

proptest! {
    #[test]
    fn polar_projection_is_idempotent(d in 3usize..7, raw in proptest::collection::vec(-1.0f64..1.0, 14), r in 0.1f64..20.0) {
        let m = model_space(ModelSpace::Hyperbolic).unwrap();
        let sys = PolarSystem { metric: &m, d, sigma: 1.0 };
        let mut x = raw[..2 + 2 * d].to_vec();
        x[0] = r;
        assert_idempotent(&sys, x)?;
    }

    #[test]
    fn euclidean_projection_is_idempotent(d in 2usize..7, raw in proptest::collection::vec(-3.0f64..3.0, 12)) {
        assert_idempotent(&EuclideanSystem { d, sigma: 1.0 }, raw[..2 * d].to_vec())?;
    }

    #[test]
    fn half_plane_projection_is_idempotent(raw in proptest::collection::vec(-3.0f64..3.0, 4)) {
        assert_idempotent(&HyperbolicPlaneSystem { sigma: 1.0 }, raw)?;
    }

    #[test]
    fn polar_snapshots_satisfy_constraints(seed in any::<u64>(), rdot0 in -0.9f64..0.9, beta in 0.5f64..4.0) {
        let m = model_space(ModelSpace::Polynomial { beta }).unwrap();
        let init = PolarState::standard(3, 1.5, rdot0);
        let run = kbm::simulate_polar(&m, 3, 1.0, 1.0, StepScheme::euler(1e-3).unwrap(), 5, &mut NoiseStream::new(seed, 0), &init).unwrap();
        prop_assert!((run.trajectory.horizon() - 1.0).abs() < 1e-12);
        run.trajectory.check_times().unwrap();
        for s in &run.trajectory.states {
            s.validate(&m).unwrap();
        }
    }

    #[test]
    fn euclidean_steps_have_length_dt(seed in any::<u64>(), sigma in 0.0f64..5.0) {
        let dt = 1e-3;
        let tr = kbm::simulate_euclidean(3, sigma, 0.5, StepScheme::euler(dt).unwrap(), 1, &mut NoiseStream::new(seed, 3), &EuclideanState::at_origin(3)).unwrap();
        for w in tr.states.windows(2) {
            let step: f64 = w[0].x.iter().zip(&w[1].x).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
            prop_assert!((step - dt).abs() <= 1e-12);
            w[1].validate().unwrap();
        }
    }

    #[test]
    fn half_plane_mirror_symmetry(seed in any::<u64>(), angle in -3.0f64..3.0) {
        let (c, s) = (angle.cos(), angle.sin());
        let dt = StepScheme::euler(1e-3).unwrap();
        let a0 = HyperbolicPlaneState::new(0.0, 1.0, c, s).unwrap();
        let b0 = HyperbolicPlaneState::new(0.0, 1.0, -c, s).unwrap();
        let a = kbm::simulate_hyperbolic_plane(1.0, 1.0, dt, 1, &mut NoiseStream::new(seed, 0), &a0).unwrap().trajectory;
        let b = kbm::simulate_hyperbolic_plane(1.0, 1.0, dt, 1, &mut NoiseStream::new(seed, 0).mirrored(), &b0).unwrap().trajectory;
        for (p, q) in a.states.iter().zip(&b.states) {
            prop_assert_eq!(p.x, -q.x);
            prop_assert_eq!(p.log_y, q.log_y);
            prop_assert_eq!(p.a, -q.a);
            prop_assert_eq!(p.u, q.u);
        }
    }
}

#[test]
fn replay_is_bit_identical_across_thread_counts() {
    let m = model_space(ModelSpace::Polynomial { beta: 3.0 }).unwrap();
    let init = PolarState::standard(3, 1.0, 0.1);
    let scheme = StepScheme::euler(1e-3).unwrap();
    let run = |threads: usize| -> Vec<(Vec<u8>, String)> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (0..16u64)
                .into_par_iter()
                .map(|k| {
                    let tr = kbm::simulate_polar(&m, 3, 1.0, 2.0, scheme, 3, &mut NoiseStream::new(7, k), &init).unwrap().trajectory;
                    (tr.csv_bytes().unwrap(), tr.fingerprint)
                })
                .collect()
        })
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a, b);
    assert_eq!(a, run(4));
}

#[test]
fn polar_velocity_stays_inside_the_unit_interval_at_fine_steps() {
    let m = model_space(ModelSpace::Hyperbolic).unwrap();
    let init = PolarState::standard(3, 1.0, 0.0);
    let min_gap = (0..8u64)
        .into_par_iter()
        .map(|k| {
            let tr = kbm::simulate_polar(&m, 3, 1.0, 1.0, StepScheme::euler(1e-4).unwrap(), 1, &mut NoiseStream::new(11, k), &init)
                .unwrap()
                .trajectory;
            tr.states.iter().map(|s| 1.0 - s.rdot * s.rdot).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    assert!(min_gap > 0.0, "min(1 − ṙ²) = {min_gap}");
}

/// Independent ensembles of 2000 paths give a null two-sample KS near 0.03,
/// so the comparison uses 20000 paths per side at the same bound.
#[test]
fn polar_and_radial_terminal_radii_agree() {
    let m = model_space(ModelSpace::Hyperbolic).unwrap();
    let scheme = StepScheme::euler(1e-3).unwrap();
    let n = 20_000u64;
    let polar0 = PolarState::standard(3, 1.0, 0.0);
    let radial0 = RadialState { r: 1.0, rdot: 0.0 };
    let a: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            kbm::simulate_polar(&m, 3, 1.0, 2.0, scheme, 2000, &mut NoiseStream::new(101, k), &polar0).unwrap().trajectory.last().r
        })
        .collect();
    let b: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            kbm::simulate_radial(&m, 3, 1.0, 2.0, scheme, 2000, &mut NoiseStream::new(202, k), &radial0).unwrap().trajectory.last().r
        })
        .collect();
    let ks = ks_two_sample(&a, &b).unwrap();
    println!("two-sample KS of terminal radii: {ks:.4}");
    assert!(ks <= 0.03, "KS = {ks}");
}

/// Unit-speed spherical Brownian motion integrated per the time-change
/// representation `X^σ_1 = σ^{-2} ∫_0^{σ⁴} y_s ds`.
fn sphere_representation(sigma: f64, dt: f64, seed: u64, k: u64) -> Vec<f64> {
    let d = 3;
    let sys = SphereBrownianMotion { n: d };
    let scheme = StepScheme::euler(dt).unwrap();
    let mut ws = StepWorkspace::for_system(&sys);
    let mut stream = NoiseStream::new(seed, k);
    let mut y = vec![1.0, 0.0, 0.0];
    let mut dz = vec![0.0; d];
    let mut integral = vec![0.0; d];
    let steps = (sigma.powi(4) / dt).round() as u64;
    for step in 1..=steps {
        for (i, v) in y.iter().enumerate() {
            integral[i] += v * dt;
        }
        stream.fill_increments(&mut dz, dt);
        sde::step(&sys, scheme, &mut y, &dz, step, &mut ws).unwrap();
    }
    integral.iter().map(|v| v / (sigma * sigma)).collect()
}

#[test]
fn rescaled_euclidean_matches_sphere_representation() {
    let (sigma, dt, n) = (4.0, 1e-3, 4000u64);
    let ens = |xs: Vec<Vec<f64>>| {
        let mut s = EnsembleSummary::new(3);
        for x in &xs {
            s.push(x).unwrap();
        }
        (0..3).map(|i| s.variance(i)).sum::<f64>() / 3.0
    };
    let direct: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let tr = kbm::simulate_euclidean(3, sigma, sigma * sigma, StepScheme::euler(dt).unwrap(), 1000, &mut NoiseStream::new(5, k), &EuclideanState::at_origin(3))
                .unwrap();
            tr.last().x.clone()
        })
        .collect();
    let represented: Vec<Vec<f64>> = (0..n).into_par_iter().map(|k| sphere_representation(sigma, sigma * sigma * dt, 6, k)).collect();
    let (u, v) = (ens(direct), ens(represented));
    println!("terminal variance: direct {u:.4}, sphere representation {v:.4}");
    assert!((u / v - 1.0).abs() <= 0.05, "variances {u} and {v}");
}

#[test]
fn stratonovich_and_ito_sphere_motion_agree_in_law() {
    let sys = SphereBrownianMotion { n: 3 };
    let dt = 1e-4;
    let terminal = |scheme: StepScheme, k: u64| -> Vec<f64> {
        let mut ws = StepWorkspace::for_system(&sys);
        let mut stream = NoiseStream::new(77, k);
        let mut y = vec![0.0, 0.0, 1.0];
        let mut dz = vec![0.0; 3];
        for step in 1..=10_000u64 {
            stream.fill_increments(&mut dz, dt);
            sde::step(&sys, scheme, &mut y, &dz, step, &mut ws).unwrap();
        }
        y
    };
    let (e, h) = (StepScheme::euler(dt).unwrap(), StepScheme::heun(dt).unwrap());
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..5000u64).into_par_iter().map(|k| (terminal(e, k), terminal(h, k))).collect();
    for i in 0..3 {
        let a: Vec<f64> = pairs.iter().map(|p| p.0[i]).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1[i]).collect();
        let ks = ks_two_sample(&a, &b).unwrap();
        assert!(ks <= 0.02, "coordinate {i}: KS = {ks}");
    }
}

#[test]
fn rescaled_quadratic_variation_matches_brownian_limit() {
    let (sigma, d, mesh) = (8.0, 3usize, 64usize);
    let qv: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let tr = kbm::simulate_euclidean(d, sigma, sigma * sigma, StepScheme::euler(1e-3).unwrap(), 1, &mut NoiseStream::new(9, k), &EuclideanState::at_origin(d))
                .unwrap();
            let g = kbm::rescale_on_grid(&tr, sigma, mesh).unwrap();
            g.windows(2).map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (b - a).powi(2)).sum::<f64>()).sum()
        })
        .collect();
    let mean = qv.iter().sum::<f64>() / qv.len() as f64;
    let target = d as f64 * 4.0 / (d as f64 * (d as f64 - 1.0));
    println!("ensemble quadratic variation {mean:.4}, target {target}");
    assert!((mean / target - 1.0).abs() <= 0.10, "quadratic variation {mean}");
}
