use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewcirc::cylindrical::{
    conditional_ratio_probe, tau_limit_check, tau_limit_grid, AbeLeyParams, CylProbeConfig,
    CylindricalModel, CylindricalParams, GParetoParams, Stage,
};
use skewcirc::probe::Classification;

fn abe_ley_grid(seed: u64, n: usize) -> Vec<CylindricalParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            AbeLeyParams::new(
                rng.random_range(0.5..3.0),
                rng.random_range(0.2..5.0),
                rng.random_range(-PI..PI),
                rng.random_range(0.05..5.0),
                rng.random_range(-1.0..=1.0),
            )
            .unwrap()
            .into()
        })
        .collect()
}

fn pareto_grid(seed: u64, n: usize) -> Vec<CylindricalParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            GParetoParams::new(
                rng.random_range(0.2..5.0),
                rng.random_range(0.3..3.0),
                rng.random_range(0.05..2.0),
                rng.random_range(-PI..PI),
                rng.random_range(0.05..0.95),
                rng.random_range(-1.0..=1.0),
            )
            .unwrap()
            .into()
        })
        .collect()
}

fn both_grids(seed: u64, n: usize) -> Vec<CylindricalParams> {
    let mut v = abe_ley_grid(seed, n);
    v.extend(pareto_grid(seed + 1000, n));
    v
}

#[test]
fn joint_densities_integrate_to_one() {
    for m in both_grids(1, 20) {
        let total = m.total_mass().unwrap();
        assert!((total - 1.0).abs() < 1e-7, "{m:?}: {total}");
    }
}

#[test]
fn conditionals_integrate_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in both_grids(2, 10) {
        let theta = rng.random_range(-PI..PI);
        let total = m.conditional_x_moment(theta, 0.0).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{m:?} at {theta}: {total}");
    }
}

#[test]
fn conditional_times_marginal_is_joint() {
    for m in both_grids(3, 5) {
        for i in 0..8 {
            let theta = -PI + TAU * (i as f64 + 0.5) / 8.0;
            let marginal = m.marginal_theta_density(theta).unwrap();
            for x in [0.01, 0.3, 1.0, 2.5, 7.0] {
                let joint = m.joint_density(theta, x).unwrap();
                let product = m.conditional_x_density(theta, x).unwrap() * marginal;
                assert!((joint - product).abs() <= 1e-8, "{m:?} ({theta}, {x})");
            }
        }
    }
}

#[test]
fn marginal_has_sine_skew_structure() {
    for m in both_grids(4, 3) {
        let mu = m.mu();
        for k in 0..100 {
            let t = PI * (k as f64 + 0.5) / 100.0;
            let plus = m.marginal_theta_density(mu + t).unwrap();
            let minus = m.marginal_theta_density(mu - t).unwrap();
            let odds = (plus - minus) / (plus + minus);
            assert!((odds - m.lambda() * t.sin()).abs() <= 1e-6, "{m:?} t = {t}");
        }
    }
}

#[test]
fn abe_ley_marginal_is_calibrated_wrapped_cauchy() {
    let m = CylindricalModel::abe_ley(2.0, 1.0, 0.0, 1.0, 0.5).unwrap();
    let theta = PI / 3.0;
    // 40-digit quadrature of the joint density over x
    let want = 0.238_697_875_361_796_25;
    assert!((m.marginal_theta_density(theta).unwrap() - want).abs() < 1e-12);
    let sswc = m.marginal_model().unwrap();
    assert!((sswc.density(theta) - want).abs() < 1e-6 * want);
}

#[test]
fn calibration_follows_the_mean_resultant_length() {
    for m in both_grids(5, 5) {
        let model = CylindricalModel::new(m).unwrap();
        let k = m.kappa();
        let want = match m {
            CylindricalParams::AbeLey(_) => (0.5 * k).tanh(),
            CylindricalParams::GPareto(_) => (1.0 - (1.0 - k * k).sqrt()) / k,
        };
        assert!((model.marginal_rho - want).abs() < 1e-10, "{m:?}");
    }
}

#[test]
fn tau_limit_is_first_order() {
    let grid = tau_limit_grid(50, 50, 10.0);
    for lambda in [0.0, 0.6] {
        let diff = |tau| {
            let gp = GParetoParams::new(1.0, 1.0, tau, 0.0, 0.5, lambda).unwrap();
            tau_limit_check(&gp, &grid).unwrap()
        };
        let (d2, d3, d4) = (diff(1e-2), diff(1e-3), diff(1e-4));
        assert!(d4 <= 1e-3, "{d4}");
        for r in [d2 / d3, d3 / d4] {
            assert!((r - 10.0).abs() < 1.0, "ratio {r}");
        }
    }
}

fn probe(a: CylindricalModel, b: CylindricalModel) -> skewcirc::cylindrical::CylindricalCertificate {
    conditional_ratio_probe(&a, &b, &CylProbeConfig::default()).unwrap()
}

fn gp(sigma: f64, delta: f64, tau: f64) -> CylindricalModel {
    CylindricalModel::gpareto(sigma, delta, tau, -1.0, 0.7, -0.4).unwrap()
}

#[test]
fn pareto_proof_limits() {
    let c = probe(gp(1.0, 0.5, 0.5), gp(1.0, 1.0, 0.5));
    assert_eq!((c.stage, c.classification), (Stage::ShapeAtOrigin, Classification::ToZero));
    let c = probe(gp(1.0, 1.0, 1.0), gp(1.0, 1.0, 0.5));
    assert_eq!((c.stage, c.classification), (Stage::TailAtInfinity, Classification::ToInfinity));
    let c = probe(gp(1.0, 1.0, 0.5), gp(2.0, 1.0, 0.5));
    assert_eq!(c.stage, Stage::ScaleAtOrigin);
    assert!((c.ratio_at_origin.unwrap() - 2.0).abs() <= 1e-12);
}

#[test]
fn sampler_matches_cross_moment() {
    // E[X cos Θ] for Abe–Ley(1, 1, 0, 1, 0), 40-digit quadrature
    let want = 1.813_430_203_923_509_4;
    let m = CylindricalModel::abe_ley(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
    let n = 100_000;
    for seed in [1, 2, 3] {
        let v: Vec<f64> = m.sample(n, seed).unwrap().iter().map(|&(t, x)| x * t.cos()).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - want).abs() < 4.0 * se, "seed {seed}: {mean} vs {want}");
    }
}

#[test]
fn symmetric_sampler_has_no_sine_mean() {
    let m = CylindricalModel::gpareto(1.0, 0.8, 0.3, 1.2, 0.6, 0.0).unwrap();
    let n = 100_000;
    let v: Vec<f64> = m.sample(n, 4).unwrap().iter().map(|&(t, _)| (t - 1.2).sin()).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 4.0 * (var / n as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn densities_are_nonnegative_and_periodic(
        alpha in 0.3f64..4.0, beta in 0.1f64..5.0, mu in -PI..PI, kappa in 0.01f64..8.0,
        lambda in -1.0f64..=1.0, theta in -10.0f64..10.0, x in 0.0f64..50.0,
    ) {
        let m: CylindricalParams = AbeLeyParams::new(alpha, beta, mu, kappa, lambda).unwrap().into();
        prop_assume!(x > 0.0 || alpha >= 1.0);
        let f = m.joint_density(theta, x).unwrap();
        prop_assert!(f >= 0.0);
        let shifted = theta + TAU;
        let g = m.joint_density(shifted, x).unwrap();
        // the rounded sum moves θ by up to one ulp, amplified by ∂f/∂θ
        let h = 1e-6;
        let slope = (m.joint_density(theta + h, x).unwrap() - m.joint_density(theta - h, x).unwrap()).abs() / (2.0 * h);
        let ulp = f64::EPSILON * shifted.abs().max(TAU);
        prop_assert!((f - g).abs() <= 1e-12 * f.max(1e-300) + 2.0 * ulp * slope);
    }

    #[test]
    fn symmetric_when_unskewed(
        sigma in 0.1f64..5.0, delta in 0.2f64..4.0, tau in 0.01f64..3.0, mu in -PI..PI,
        kappa in 0.01f64..0.99, t in 0.0f64..PI, x in 0.001f64..100.0,
    ) {
        let m: CylindricalParams = GParetoParams::new(sigma, delta, tau, mu, kappa, 0.0).unwrap().into();
        let a = m.joint_density(mu + t, x).unwrap();
        let b = m.joint_density(mu - t, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.max(1e-300));
    }

    #[test]
    fn shape_pair_follows_the_power_sign(d1 in 0.2f64..3.0, d2 in 0.2f64..3.0, tau in 0.05f64..2.0) {
        prop_assume!((1.0 / d1 - 1.0 / d2).abs() > 0.01);
        let c = probe(gp(1.3, d1, tau), gp(1.3, d2, tau));
        let want = if 1.0 / d1 > 1.0 / d2 { Classification::ToZero } else { Classification::ToInfinity };
        prop_assert_eq!(c.classification, want);
    }

    #[test]
    fn tail_pair_follows_the_index_sign(t1 in 0.05f64..3.0, t2 in 0.05f64..3.0, delta in 0.3f64..3.0) {
        prop_assume!((1.0 / t2 - 1.0 / t1).abs() > 0.01);
        let c = probe(gp(0.7, delta, t1), gp(0.7, delta, t2));
        let want = if 1.0 / t2 > 1.0 / t1 { Classification::ToInfinity } else { Classification::ToZero };
        prop_assert_eq!(c.classification, want);
    }

    #[test]
    fn scale_pair_ratio(s1 in 0.1f64..10.0, s2 in 0.1f64..10.0, delta in 0.2f64..4.0) {
        prop_assume!((s1 / s2).ln().abs() > 0.01);
        let c = probe(gp(s1, delta, 0.5), gp(s2, delta, 0.5));
        let want = (s2 / s1).powf(1.0 / delta);
        prop_assert!((c.ratio_at_origin.unwrap() - want).abs() <= 1e-12 * want.max(1.0));
    }
}
