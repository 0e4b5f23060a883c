//! Property tests for ensemble summaries, KS calibration and the invariant
//! densities.

use kbm_lab::geometry::{model_space, ModelSpace};
use kbm_lab::kbm::{self, RadialState};
use kbm_lab::sde::{NoiseStream, StepScheme};
use kbm_lab::stats::{ergodic_average, invariant_density_mu_ell, ks_critical_value, ks_distance, EnsembleSummary, InvariantDensity};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn summarize(rows: &[Vec<f64>]) -> EnsembleSummary {
    let mut s = EnsembleSummary::new(2);
    for r in rows {
        s.push(r).unwrap();
    }
    s
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn row() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1e3f64..1e3, 2)
}

proptest! {
    #[test]
    fn merge_is_associative_commutative_and_matches_the_union(
        a in proptest::collection::vec(row(), 2..60),
        b in proptest::collection::vec(row(), 2..60),
        c in proptest::collection::vec(row(), 2..60),
    ) {
        let (sa, sb, sc) = (summarize(&a), summarize(&b), summarize(&c));
        let mut left = sa.clone();
        left.merge(&sb).unwrap();
        left.merge(&sc).unwrap();
        let mut bc = sb.clone();
        bc.merge(&sc).unwrap();
        let mut right = sa.clone();
        right.merge(&bc).unwrap();
        let mut swapped = sc.clone();
        swapped.merge(&sb).unwrap();
        swapped.merge(&sa).unwrap();
        let union: Vec<Vec<f64>> = a.iter().chain(&b).chain(&c).cloned().collect();
        let all = summarize(&union);
        for other in [&right, &swapped, &all] {
            prop_assert_eq!(left.count, other.count);
            for i in 0..2 {
                prop_assert!(rel(left.mean[i], other.mean[i]) <= 1e-10 || (left.mean[i] - other.mean[i]).abs() <= 1e-10);
                prop_assert!(rel(left.variance(i), other.variance(i)) <= 1e-10);
            }
        }
    }

    #[test]
    fn invariant_densities_are_normalized(ell in 0.0f64..3.0, sigma in 0.3f64..3.0, d in 3usize..8) {
        let mu = invariant_density_mu_ell(ell, sigma, d).unwrap();
        prop_assert!((mu.expectation(|_| 1.0).unwrap() - 1.0).abs() <= 1e-10);
        prop_assert!((mu.cdf(1.0) - 1.0).abs() <= 1e-10);
        prop_assert!(mu.cdf(-1.0).abs() <= 1e-10);
    }
}

fn quantile(mu: &InvariantDensity, u: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mu.cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ks_is_calibrated_on_samples_from_the_target() {
    let n = 100_000;
    let mu = invariant_density_mu_ell(1.0, 1.0, 3).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let mut xs: Vec<f64> = (0..n).map(|_| quantile(&mu, rng.random::<f64>())).collect();
    xs.sort_by(f64::total_cmp);
    let ks = ks_distance(&xs, |x| mu.cdf(x)).unwrap();
    let bound = 1.63 / (n as f64).sqrt() * 1.5;
    assert!(ks <= bound, "KS {ks} above {bound}");
    assert!(ks <= ks_critical_value(n, 0.01) * 1.5);
}

#[test]
fn invariant_mean_increases_with_ell() {
    let means: Vec<f64> = [0.0, 0.5, 1.0, 2.0].iter().map(|l| invariant_density_mu_ell(*l, 1.0, 3).unwrap().mean).collect();
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
    assert!(means[0].abs() < 1e-12);
}

#[test]
fn constant_observable_averages_to_one() {
    let m = model_space(ModelSpace::Euclidean).unwrap();
    let run = kbm::simulate_radial(&m, 3, 1.0, 10.0, StepScheme::euler(1e-3).unwrap(), 10, &mut NoiseStream::new(1, 0), &RadialState { r: 1.0, rdot: 0.0 })
        .unwrap();
    let avg = ergodic_average(&run.trajectory, |_| 1.0, 0.1).unwrap();
    assert!((avg - 1.0).abs() < 1e-15);
}
