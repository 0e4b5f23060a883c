//! Property tests for level-2 lifts, moment scaling and the step-2 RDE
//! solver.

use kbm_lab::roughpath::{chen_combine, holder_diagnostics, lift_level2, solve_rde_step2, LinearFields, DEFAULT_GAMMA};
use kbm_lab::sde::NoiseStream;
use kbm_lab::stats::fit_line;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn random_path(d: usize, steps: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = steps.len() / d;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let mut x = vec![vec![0.0; d]];
    for k in 0..n {
        let next: Vec<f64> = (0..d).map(|i| x[k][i] + steps[k * d + i]).collect();
        x.push(next);
    }
    (times, x)
}

proptest! {
    #[test]
    fn chen_and_symmetric_part_hold_on_every_triple(
        d in 1usize..5,
        steps in proptest::collection::vec(-2.0f64..2.0, 8..240),
        picks in proptest::collection::vec(any::<u32>(), 3),
    ) {
        let (t, x) = random_path(d, &steps);
        prop_assume!(t.len() >= 3);
        let l = lift_level2(&t, &x, DEFAULT_GAMMA).unwrap();
        let n = l.len();
        let mut idx: Vec<usize> = picks.iter().map(|p| *p as usize % n).collect();
        idx.sort_unstable();
        let (s, u, v) = (idx[0], idx[1], idx[2]);
        prop_assert!(l.chen_defect(s, u, v) <= 1e-12, "Chen defect {}", l.chen_defect(s, u, v));
        prop_assert!(l.symmetry_defect(s, v) <= 1e-12, "symmetric-part defect {}", l.symmetry_defect(s, v));
    }

    #[test]
    fn split_and_recombine_reproduces_the_lift(
        steps in proptest::collection::vec(-1.0f64..1.0, 6..120),
        split in any::<u32>(),
    ) {
        let (t, x) = random_path(3, &steps[..steps.len() / 3 * 3]);
        prop_assume!(t.len() >= 3);
        let l = lift_level2(&t, &x, DEFAULT_GAMMA).unwrap();
        let last = l.len() - 1;
        let u = 1 + split as usize % (last - 1);
        let joined = chen_combine(&l.segment(0, u).unwrap(), &l.segment(u, last).unwrap()).unwrap();
        let (a, b) = (l.increment(0, last), joined.increment(0, joined.len() - 1));
        for (p, q) in a.0.iter().chain(&a.1).zip(b.0.iter().chain(&b.1)) {
            prop_assert!((p - q).abs() <= 1e-14 * (1.0 + p.abs()));
        }
    }
}

fn smooth_path(n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let t: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let x = t.iter().map(|s| vec![(3.0 * s).cos(), (2.0 * s).sin(), s * s]).collect();
    (t, x)
}

#[test]
fn refinement_changes_the_lift_by_order_dt() {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for n in [16usize, 32, 64, 128, 256] {
        let (t, x) = smooth_path(n);
        let (t2, x2) = smooth_path(2 * n);
        let a = lift_level2(&t, &x, DEFAULT_GAMMA).unwrap();
        let b = lift_level2(&t2, &x2, DEFAULT_GAMMA).unwrap();
        let (ma, mb) = (a.xx(a.len() - 1), b.xx(b.len() - 1));
        let diff = ma.iter().zip(mb).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        lx.push((1.0 / n as f64).ln());
        ly.push(diff.ln());
    }
    let fit = fit_line(&lx, &ly).unwrap();
    assert!(fit.slope >= 0.9, "refinement slope {}", fit.slope);
}

fn brownian_lift(k: u64, n: usize, d: usize) -> kbm_lab::roughpath::Level2Path {
    let mut stream = NoiseStream::new(31, k);
    let dt = 1.0 / n as f64;
    let times: Vec<f64> = (0..=n).map(|j| j as f64 * dt).collect();
    let mut x = vec![vec![0.0; d]];
    let mut dw = vec![0.0; d];
    for j in 0..n {
        stream.fill_increments(&mut dw, dt);
        let next: Vec<f64> = x[j].iter().zip(&dw).map(|(a, b)| a + b).collect();
        x.push(next);
    }
    lift_level2(&times, &x, DEFAULT_GAMMA).unwrap()
}

#[test]
fn brownian_first_level_moment_slope_is_half_the_order() {
    let ens: Vec<_> = (0..200).map(|k| brownian_lift(k, 1024, 2)).collect();
    let diag = holder_diagnostics(&ens, 2, 64).unwrap();
    assert!((diag.first_level_fit.slope - 1.0).abs() <= 0.1, "slope {}", diag.first_level_fit.slope);
}

#[test]
fn line_ensemble_moments_scale_exactly() {
    let v = [0.6, -0.8];
    let ens: Vec<_> = (0..100)
        .map(|k| {
            let s = 1.0 + k as f64 / 100.0;
            let t: Vec<f64> = (0..=256).map(|j| j as f64 / 256.0).collect();
            let x = t.iter().map(|u| vec![s * u * v[0], s * u * v[1]]).collect::<Vec<_>>();
            lift_level2(&t, &x, DEFAULT_GAMMA).unwrap()
        })
        .collect();
    let q = 4;
    let diag = holder_diagnostics(&ens, q, 64).unwrap();
    assert!((diag.first_level_fit.slope - q as f64).abs() < 1e-8, "{}", diag.first_level_fit.slope);
    assert!((diag.second_level_fit.slope - 2.0 * q as f64).abs() < 1e-8, "{}", diag.second_level_fit.slope);
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    (0..n * n).map(|k| m[(k / n, k % n)]).collect()
}

#[test]
fn linear_fields_on_a_line_match_the_matrix_exponential() {
    let m1 = DMatrix::from_row_slice(3, 3, &[0.0, -0.7, 0.2, 0.7, 0.0, -0.4, -0.2, 0.4, 0.0]);
    let m2 = DMatrix::from_row_slice(3, 3, &[0.3, 0.1, 0.0, -0.2, 0.1, 0.5, 0.0, 0.4, -0.3]);
    let v = [1.0, -0.5];
    let n = 1000;
    let t: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let x: Vec<Vec<f64>> = t.iter().map(|s| vec![s * v[0], s * v[1]]).collect();
    let driver = lift_level2(&t, &x, DEFAULT_GAMMA).unwrap();
    let fields = LinearFields { matrices: vec![row_major(&m1), row_major(&m2)], n: 3 };
    let y0 = [1.0, 0.5, -0.25];
    let sol = solve_rde_step2(&fields, &driver, &y0, 1).unwrap();
    let exact = (m1 * v[0] + m2 * v[1]).exp() * DVector::from_row_slice(&y0);
    let y = sol.states.last().unwrap();
    let err = (0..3).map(|i| (y[i] - exact[i]).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6, "error {err}");
}

/// Rotation generators about the first two axes.
fn generators() -> [DMatrix<f64>; 2] {
    [
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
    ]
}

#[test]
fn circle_driven_rotation_matches_classical_solve() {
    let [l1, l2] = generators();
    let horizon = 2.0 * std::f64::consts::PI;
    let n = (horizon / 1e-3).round() as usize;
    let t: Vec<f64> = (0..=n).map(|j| horizon * j as f64 / n as f64).collect();
    let x: Vec<Vec<f64>> = t.iter().map(|s| vec![s.cos(), s.sin()]).collect();
    let driver = lift_level2(&t, &x, DEFAULT_GAMMA).unwrap();
    let fields = LinearFields { matrices: vec![row_major(&l1), row_major(&l2)], n: 3 };
    let y0 = [0.0, 0.0, 1.0];
    let sol = solve_rde_step2(&fields, &driver, &y0, 1).unwrap();

    // Classical RK4 solve of ẏ = (−sin t · L₁ + cos t · L₂) y at a much finer step.
    let rhs = |s: f64, y: &DVector<f64>| (&l1 * (-s.sin()) + &l2 * s.cos()) * y;
    let fine = 200_000;
    let h = horizon / fine as f64;
    let mut y = DVector::from_row_slice(&y0);
    let mut worst = 0.0f64;
    let mut next_check = 0;
    for j in 0..fine {
        if j % (fine / 100) == 0 {
            let s = j as f64 * h;
            while next_check + 1 < sol.times.len() && sol.times[next_check] < s - 1e-12 {
                next_check += 1;
            }
            if (sol.times[next_check] - s).abs() < 1e-9 {
                let e = (0..3).map(|i| (sol.states[next_check][i] - y[i]).abs()).fold(0.0, f64::max);
                worst = worst.max(e);
            }
        }
        let s = j as f64 * h;
        let k1 = rhs(s, &y);
        let k2 = rhs(s + 0.5 * h, &(&y + &k1 * (0.5 * h)));
        let k3 = rhs(s + 0.5 * h, &(&y + &k2 * (0.5 * h)));
        let k4 = rhs(s + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    let last = sol.states.last().unwrap();
    worst = worst.max((0..3).map(|i| (last[i] - y[i]).abs()).fold(0.0, f64::max));
    assert!(worst <= 1e-3, "max deviation {worst}");
}
