use mellin_deconv::estimate::linear_grid;
use mellin_deconv::gsse::{
    char_exponent, contour_condition_check, contour_transform, estimate_gsse_with_cutoffs, CfSource, GsseConfig, Jump,
    LevyModel,
};
use mellin_deconv::special::complex_gamma;
use mellin_deconv::{Complex64 as C, SampleSet, SmoothnessMode};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn jumps() -> impl Strategy<Value = Vec<Jump>> {
    prop::collection::vec(
        (-3.0f64..3.0, 0.0f64..2.0).prop_map(|(location, weight)| Jump { location, weight }),
        0..5,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn triplet_derivative_is_linearly_bounded(mu in -2.0f64..2.0, s2 in 0.0f64..3.0, js in jumps(), u in -50.0f64..50.0) {
        let model = LevyModel::triplet(mu, s2, js.clone()).unwrap();
        let d = model.psi_prime::<f64>(u);
        // |ψ'(u)| <= |μ| + σ²|u| + 2 Σ w|x|: the linear growth used for the
        // contour integrals.
        let bound = mu.abs() + s2 * u.abs() + 2.0 * js.iter().map(|j| j.weight * j.location.abs()).sum::<f64>();
        prop_assert!(d.norm() <= bound * (1.0 + 1e-12) + 1e-12);
        let h = 1e-5;
        let fd = (model.psi::<f64>(u + h) - model.psi::<f64>(u - h)) / (2.0 * h);
        prop_assert!((fd - d).norm() < 1e-5 * (1.0 + d.norm()));
    }

    #[test]
    fn exponent_is_hermitian(mu in -2.0f64..2.0, s2 in 0.0f64..3.0, js in jumps(), u in 0.0f64..30.0) {
        let model = LevyModel::triplet(mu, s2, js).unwrap();
        let a = char_exponent::<f64>(&model, u).unwrap();
        let b = char_exponent::<f64>(&model, -u).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12 * (1.0 + a.norm()));
        prop_assert!(a.re >= -1e-12);
    }

    #[test]
    fn gsse_is_linear_in_the_sample(a in prop::collection::vec(-2.5f64..2.5, 1..20), b in prop::collection::vec(-2.5f64..2.5, 1..20)) {
        // Both halves share the same largest |x| so the λ-grids coincide.
        let mut a = a;
        let mut b = b;
        a.push(3.0);
        b.push(-3.0);
        let model = LevyModel::brownian_drift(0.0, 1.0).unwrap();
        let cfg = GsseConfig::new(0.7, FRAC_PI_2, SmoothnessMode::C, 1000);
        let grid = linear_grid(0.2, 4.0, 9);
        let sa = SampleSet::new(a.clone(), 0, "a").unwrap();
        let sb = SampleSet::new(b.clone(), 0, "b").unwrap();
        let su = sa.union(&sb);
        let est = |s: &SampleSet<f64>| {
            estimate_gsse_with_cutoffs(CfSource::Samples(s), &model, &cfg, 20.0, 1.0, &grid, false).unwrap()
        };
        let (ea, eb, eu) = (est(&sa), est(&sb), est(&su));
        let (na, nb) = (a.len() as f64, b.len() as f64);
        for i in 0..grid.len() {
            let mix = (na * ea.values[i] + nb * eb.values[i]) / (na + nb);
            prop_assert!((eu.values[i] - mix).abs() < 1e-9 * (1.0 + mix.abs()));
        }
    }
}

#[test]
fn transform_identity_for_gamma_times() {
    // For T ~ Gamma(2, 1), E e^{iλX} = (1 + ψ(λ))^{-2} and the contour
    // transform tends to Γ(z + 1) Γ(1 − z).
    for model in [
        LevyModel::brownian_drift(1.0, 1.0).unwrap(),
        LevyModel::brownian_drift(0.0, 1.0).unwrap(),
        LevyModel::triplet(0.5, 1.0, vec![Jump { location: 0.5, weight: 1.0 }]).unwrap(),
    ] {
        for z in [C::new(0.3, 0.0), C::new(0.7, 0.0), C::new(0.6, 1.5)] {
            let m = model.clone();
            let got = contour_transform(&model, move |l: f64| (1.0 + m.psi(l)).powi(-2), z, 3000.0).unwrap();
            let want = complex_gamma(z + 1.0).unwrap() * complex_gamma(1.0 - z).unwrap();
            assert!((got - want).norm() < 1e-4 * want.norm(), "{model:?} z={z}: {got} vs {want}");
        }
    }
}

#[test]
fn contour_condition_flags() {
    let grid: Vec<f64> = (0..120).map(|k| 0.5 * 1.05f64.powi(k)).collect();
    let r = contour_condition_check(&LevyModel::brownian_drift(0.0, 1.0).unwrap(), &grid).unwrap();
    assert!(!r.condition_violated);
    let r = contour_condition_check(&LevyModel::stable(1.5).unwrap(), &grid).unwrap();
    assert!(!r.condition_violated);
}

#[test]
fn exact_source_converges_for_brownian_motion() {
    // With the exact characteristic function only the cutoff bias remains,
    // and it falls as U grows. Beyond U ≈ 5 the e^{π|v|/2} growth of ψ^{−z}
    // exhausts double precision and the residue check trips instead.
    let model = LevyModel::brownian_drift(1.0, 1.0).unwrap();
    let cfg = GsseConfig::new(0.7, FRAC_PI_2, SmoothnessMode::C, 1000);
    let m = model.clone();
    let cf = move |l: f64| (1.0 + m.psi(l)).powi(-2);
    let grid = linear_grid(0.3, 5.0, 24);
    let mut last = f64::INFINITY;
    for u in [3.0, 4.0, 5.0] {
        for vr in [true, false] {
            let est = estimate_gsse_with_cutoffs(
                CfSource::Exact { cf: &cf, mean: 2.0, x_scale: 10.0 },
                &model,
                &cfg,
                2000.0,
                u,
                &grid,
                vr,
            )
            .unwrap();
            let err = grid
                .iter()
                .zip(&est.values)
                .map(|(x, v)| (v - x * (-x).exp()).abs())
                .fold(0.0, f64::max);
            assert!(err < last, "U = {u}: error {err} did not fall below {last}");
            if !vr {
                last = err;
            }
        }
    }
    assert!(last < 2e-3, "error at U = 5 is {last}");
}
