use mellin_deconv::estimate::linear_grid;
use mellin_deconv::mellin::{empirical_mellin, mellin_inverse_regularized, Catalog};
use mellin_deconv::sse::{estimate_sse, estimate_sse_plugin, SseConfig};
use mellin_deconv::{Complex64 as C, SampleSet, SmoothnessMode};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn positive_samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..30.0, 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn empirical_transform_at_one_is_one(v in positive_samples()) {
        let s = SampleSet::new(v, 0, "t").unwrap();
        prop_assert_eq!(empirical_mellin(&s, C::new(1.0, 0.0)).unwrap(), C::new(1.0, 0.0));
    }

    #[test]
    fn empirical_transform_scales(v in positive_samples(), c in 0.05f64..20.0, re in 0.55f64..2.5, im in -20.0f64..20.0) {
        let z = C::new(re, im);
        let s = SampleSet::new(v.clone(), 0, "t").unwrap();
        let cs = SampleSet::new(v.iter().map(|x| x * c).collect(), 0, "t").unwrap();
        let lhs = empirical_mellin(&cs, z).unwrap();
        let rhs = (z - 1.0).expf(c) * empirical_mellin(&s, z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1e-300));
    }

    #[test]
    fn sse_is_an_average_over_samples(a in positive_samples(), b in positive_samples(), h in 0.3f64..1.5) {
        let grid = linear_grid(0.1, 6.0, 17);
        let cfg = SseConfig::new(0.8, FRAC_PI_2, SmoothnessMode::C, 1000);
        let sa = SampleSet::new(a.clone(), 0, "a").unwrap();
        let sb = SampleSet::new(b.clone(), 0, "b").unwrap();
        let ea = estimate_sse(&sa, &cfg, h, &grid).unwrap();
        let eb = estimate_sse(&sb, &cfg, h, &grid).unwrap();
        let eu = estimate_sse(&sa.union(&sb), &cfg, h, &grid).unwrap();
        let (na, nb) = (a.len() as f64, b.len() as f64);
        for i in 0..grid.len() {
            let mix = (na * ea.values[i] + nb * eb.values[i]) / (na + nb);
            prop_assert!((eu.values[i] - mix).abs() <= 1e-9 * (1.0 + mix.abs()));
        }
    }
}

#[test]
fn plugin_sse_equals_inversion_of_target_transform() {
    let m = Catalog::GammaDensity { alpha: 2.0 }.mellin::<f64>().unwrap();
    let abs = m.subordinated_abs_bm();
    let grid = linear_grid(0.05, 8.0, 40);
    for &(gamma, h) in &[(0.8, 0.5), (1.2, 0.3)] {
        let cfg = SseConfig::new(gamma, 1.0, SmoothnessMode::C, 1000);
        let est = estimate_sse_plugin(&abs, &cfg, h, &grid).unwrap();
        let direct = mellin_inverse_regularized(&m, gamma, 1.0 / h, &grid).unwrap();
        for (e, d) in est.values.iter().zip(&direct) {
            assert!((e - d).abs() < 1e-8, "{e} vs {d}");
        }
    }
}

#[test]
fn sse_rejects_low_line() {
    let s = SampleSet::new(vec![1.0, 2.0], 0, "t").unwrap();
    let cfg = SseConfig::new(0.7, 1.0, SmoothnessMode::C, 1000);
    assert!(estimate_sse(&s, &cfg, 0.5, &[1.0]).is_err());
}
