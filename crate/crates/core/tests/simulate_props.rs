use mellin_deconv::quad::{adaptive, QuadConfig};
use mellin_deconv::simulate::{derive_seed, gig_density, sample_observations, sample_times, ObservationModel, TimeDistribution};
use proptest::prelude::*;

/// Kolmogorov distance between the sample and `cdf`, taken exactly at the
/// order statistics.
fn ks(mut v: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Numerical CDF from the density, tabulated on the sample quantiles.
fn numeric_ks(dist: &TimeDistribution, v: Vec<f64>) -> f64 {
    let mut sorted = v.clone();
    sorted.sort_by(f64::total_cmp);
    let cfg = QuadConfig::with_tolerances(1e-12, 1e-10);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut table = Vec::with_capacity(sorted.len());
    for &x in &sorted {
        acc += adaptive(|t| dist.density(t), prev, x, &cfg).unwrap().0;
        prev = x;
        table.push(acc);
    }
    let n = sorted.len() as f64;
    table
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs()))
        .fold(0.0, f64::max)
}

// 1% critical value of the one-sample KS statistic.
fn ks_limit(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

#[test]
fn gig_density_integrates_to_one() {
    let cfg = QuadConfig {
        log_range: 40.0,
        ..QuadConfig::with_tolerances(1e-13, 1e-11)
    };
    for (l, k, d) in [(2.0, 2f64.sqrt(), 0.0), (1.0, 1.0, 1.0), (0.5, 2.0, 0.5), (-1.5, 0.0, 1.0), (-0.3, 0.7, 2.0)] {
        let (mass, _) = mellin_deconv::quad::adaptive_half_line(|v| gig_density(l, k, d, v), &cfg).unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "GIG({l}, {k}, {d}) mass {mass}");
    }
}

#[test]
fn heavy_tail_sampler_matches_cdf() {
    let n = 20_000;
    let s = sample_times::<f64>(&TimeDistribution::HeavyTailQ { nu: 2.0 }, n, 3).unwrap();
    let d = ks(s.values().to_vec(), |x| 2.0 / std::f64::consts::PI * x.atan());
    assert!(d < ks_limit(n), "KS {d}");
    for nu in [1.5, 3.0] {
        let dist = TimeDistribution::HeavyTailQ { nu };
        let s = sample_times::<f64>(&dist, 5000, 4).unwrap();
        let d = numeric_ks(&dist, s.values().to_vec());
        assert!(d < ks_limit(5000), "nu {nu}: KS {d}");
    }
}

#[test]
fn gamma_and_gig_samplers_match_their_laws() {
    let laws = [
        TimeDistribution::Gamma { alpha: 0.6 },
        TimeDistribution::Gamma { alpha: 2.0 },
        TimeDistribution::Gig { lambda: 1.0, kappa: 1.0, delta: 1.0 },
        TimeDistribution::Gig { lambda: 0.5, kappa: 2.0, delta: 0.5 },
        TimeDistribution::Gig { lambda: -0.5, kappa: 1.0, delta: 1.0 },
        TimeDistribution::Gig { lambda: 0.05, kappa: 3.0, delta: 4.0 },
        TimeDistribution::Gig { lambda: -2.0, kappa: 0.0, delta: 1.5 },
        TimeDistribution::Gig { lambda: 2.0, kappa: 2f64.sqrt(), delta: 0.0 },
    ];
    for (i, law) in laws.iter().enumerate() {
        let s = sample_times::<f64>(law, 5000, 100 + i as u64).unwrap();
        assert!(s.values().iter().all(|&t| t > 0.0));
        let d = numeric_ks(law, s.values().to_vec());
        assert!(d < ks_limit(5000), "{law:?}: KS {d}");
    }
}

#[test]
fn stable_observations_match_characteristic_function() {
    // With T ≡ 1 the draws are standard symmetric α-stable, E cos(uS) = e^{−|u|^α}.
    for alpha in [0.7, 1.0, 1.5, 2.0] {
        let ones = mellin_deconv::SampleSet::new(vec![1.0f64; 40_000], 0, "one").unwrap();
        let x = sample_observations(&ones, &ObservationModel::SubordinatedStable { alpha }, 9).unwrap();
        for u in [0.3, 1.0, 2.0] {
            let ecf = x.values().iter().map(|v| (u * v).cos()).sum::<f64>() / x.len() as f64;
            let want = (-f64::powf(u, alpha)).exp();
            assert!((ecf - want).abs() < 0.015, "alpha {alpha}, u {u}: {ecf} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn equal_seeds_give_equal_draws(seed in any::<u64>(), alpha in 0.3f64..5.0) {
        let law = TimeDistribution::Gamma { alpha };
        let a = sample_times::<f64>(&law, 64, seed).unwrap();
        let b = sample_times::<f64>(&law, 64, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        let c = sample_times::<f64>(&law, 64, seed.wrapping_add(1)).unwrap();
        prop_assert_ne!(a.values(), c.values());
    }

    #[test]
    fn gig_draws_are_deterministic(seed in any::<u64>(), l in -2.0f64..2.0, k in 0.1f64..3.0, d in 0.1f64..3.0) {
        let law = TimeDistribution::Gig { lambda: l, kappa: k, delta: d };
        let a = sample_times::<f64>(&law, 32, seed).unwrap();
        let b = sample_times::<f64>(&law, 32, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert!(a.values().iter().all(|t| t.is_finite() && *t > 0.0));
    }

    #[test]
    fn brownian_observations_scale_with_time(seed in any::<u64>(), c in 0.1f64..10.0) {
        // X = √T N with the normals fixed by the seed, so T → c²T gives X → cX.
        let times = sample_times::<f64>(&TimeDistribution::Gamma { alpha: 2.0 }, 50, 1).unwrap();
        let scaled = mellin_deconv::SampleSet::new(times.values().iter().map(|t| t * c * c).collect(), 0, "s").unwrap();
        let x = sample_observations(&times, &ObservationModel::SubordinatedBm, seed).unwrap();
        let y = sample_observations(&scaled, &ObservationModel::SubordinatedBm, seed).unwrap();
        for (a, b) in x.values().iter().zip(y.values()) {
            prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn derived_seeds_do_not_collide(master in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(derive_seed(master, 0, i), derive_seed(master, 0, j));
        prop_assert_ne!(derive_seed(master, 0, i), derive_seed(master, 1, i));
    }
}
