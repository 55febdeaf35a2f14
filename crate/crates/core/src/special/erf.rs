//! Complex complementary error function.
//!
//! Two evaluation routes cover the plane:
//!
//! * the Maclaurin series of `erf`, used inside `|ζ| < 2` and also in the
//!   sectors `|arg ζ| > π/4` where `e^{-ζ²}` grows and the series terms do not
//!   cancel;
//! * Laplace's continued fraction for `erfc` in the sector `|arg ζ| < π/4`
//!   with `|ζ| >= 2`, where the function is exponentially small.
//!
//! The left half-plane uses `erfc(−ζ) = 2 − erfc(ζ)`.

use crate::scalar::{cx, real, Cx, Scalar};

fn erf_series<F: Scalar>(z: Cx<F>) -> Cx<F> {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let eps = F::epsilon() * F::lit(0.25);
    for n in 1..400usize {
        let nf = F::of_usize(n);
        term = -term * z2 / nf;
        let add = term / (F::lit(2.0) * nf + F::one());
        sum += add;
        if add.norm() <= eps * sum.norm() {
            break;
        }
    }
    sum * F::lit(2.0 / std::f64::consts::PI.sqrt())
}

/// Modified Lentz evaluation of `erfc` for `Re ζ > 0`, `|ζ|` not small.
fn erfc_cf<F: Scalar>(z: Cx<F>) -> Cx<F> {
    // erfc z = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let tiny = F::min_positive_value().sqrt();
    let eps = F::epsilon();
    let mut f = z;
    if f.norm() == F::zero() {
        f = real(tiny);
    }
    let mut c = f;
    let mut d = Cx::new(F::zero(), F::zero());
    for k in 1..2000usize {
        let a = real(F::lit(0.5) * F::of_usize(k));
        d = z + a * d;
        if d.norm() == F::zero() {
            d = real(tiny);
        }
        c = z + a / c;
        if c.norm() == F::zero() {
            c = real(tiny);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - F::one()).norm() < eps {
            break;
        }
    }
    (-z * z).exp() / f * F::lit(1.0 / std::f64::consts::PI.sqrt())
}

/// `erfc(ζ)` for complex `ζ`.
pub fn erfc<F: Scalar>(z: Cx<F>) -> Cx<F> {
    if z.re < F::zero() {
        return real(F::lit(2.0)) - erfc(-z);
    }
    let r = z.norm();
    if r >= F::lit(2.0) && z.im.abs() < z.re {
        erfc_cf(z)
    } else {
        real(F::one()) - erf_series(z)
    }
}

/// `erf(ζ)` for complex `ζ`.
pub fn erf<F: Scalar>(z: Cx<F>) -> Cx<F> {
    if z.norm() < F::lit(3.0) {
        erf_series(z)
    } else {
        real(F::one()) - erfc(z)
    }
}

/// `∫_{-∞}^{v} e^{-t²/2 + i t c} dt` in closed form,
/// `e^{-c²/2} √(π/2) erfc(−(v − ic)/√2)`.
pub fn gaussian_fourier_cdf<F: Scalar>(c: F, v: F) -> Cx<F> {
    let s = F::lit(std::f64::consts::FRAC_1_SQRT_2);
    let arg = cx(-v * s, c * s);
    erfc(arg) * ((-c * c * F::lit(0.5)).exp() * F::lit((std::f64::consts::PI / 2.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_matches_libm_style_values() {
        // erfc(x) reference values.
        let cases = [
            (0.0, 1.0),
            (0.5, 0.479_500_122_186_953_5),
            (2.0, 0.004_677_734_981_047_266),
            (3.5, 7.430_983_723_414_127e-7),
            (6.0, 2.151_973_671_249_891_3e-17),
            (-1.0, 1.842_700_792_949_715),
        ];
        for (x, want) in cases {
            let got = erfc(Cx::new(x, 0.0f64));
            assert!((got.re - want).abs() <= 1e-14 * want.abs().max(1e-300) + 1e-16, "x={x} got={got}");
            assert!(got.im.abs() < 1e-300 + 1e-16 * want);
        }
    }

    #[test]
    fn complex_reference_values() {
        // mpmath erfc at 30 digits.
        let cases = [
            ((1.0, 1.0), (-0.316_151_281_697_947_6, -0.190_453_469_237_834_7)),
            ((4.0, 2.0), (-5.652_170_027_934_937e-7, 5.131_005_296_081_876e-7)),
            ((0.3, 4.5), (-3.580_891_994_096_667e7, 6.373_090_063_760_129e7)),
        ];
        for ((re, im), (er, ei)) in cases {
            let got = erfc(Cx::new(re, im));
            let want = Cx::new(er, ei);
            assert!((got - want).norm() / want.norm() < 1e-12, "z={re}+{im}i got={got}");
        }
    }

    #[test]
    fn gaussian_cdf_limit_is_gaussian_fourier_transform() {
        // v → ∞ gives √(2π) e^{-c²/2}.
        let c = 0.7f64;
        let g = gaussian_fourier_cdf(c, 40.0);
        let want = (2.0 * std::f64::consts::PI).sqrt() * (-c * c / 2.0).exp();
        assert!((g.re - want).abs() < 1e-13 && g.im.abs() < 1e-13);
    }
}
