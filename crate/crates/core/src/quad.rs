//! Quadrature rules.
//!
//! Two tools are used throughout the crate:
//!
//! * fixed composite Gauss–Legendre panels, for smooth integrands whose scale
//!   is known in advance (vertical Mellin lines, `λ`-grids shared between
//!   many evaluations);
//! * adaptive Gauss–Kronrod 7/15 with global error control, for one-off
//!   integrals such as multiplicative convolutions and the test oracles.
//!
//! Both are generic over the integrand value so that real and complex
//! integrands share the same code.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};

/// Values a quadrature rule can accumulate.
pub trait QuadValue<F: Scalar>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<F, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> F;
}

impl<F: Scalar> QuadValue<F> for F {
    fn zero() -> Self {
        F::zero()
    }
    fn magnitude(self) -> F {
        self.abs()
    }
}

impl<F: Scalar> QuadValue<F> for Cx<F> {
    fn zero() -> Self {
        Cx::new(F::zero(), F::zero())
    }
    fn magnitude(self) -> F {
        self.norm()
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<F> {
    nodes: Vec<F>,
    weights: Vec<F>,
}

impl<F: Scalar> GaussLegendre<F> {
    /// Rule with `order` nodes, computed by Newton iteration on `P_order`
    /// in double precision.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre {
            nodes: nodes.into_iter().map(F::lit).collect(),
            weights: weights.into_iter().map(F::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: F, b: F) -> impl Iterator<Item = (F, F)> + '_ {
        let half = (b - a) * F::lit(0.5);
        let mid = (a + b) * F::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }

    pub fn integrate<T: QuadValue<F>>(&self, a: F, b: F, mut f: impl FnMut(F) -> T) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }
}

/// Nodes and weights of a composite rule on `[a, b]` with equal panels no
/// wider than `max_width`. The node set is symmetric about the midpoint.
pub fn composite_nodes<F: Scalar>(rule: &GaussLegendre<F>, a: F, b: F, max_width: F) -> Vec<(F, F)> {
    if !(b > a) {
        return Vec::new();
    }
    let panels = ((b - a) / max_width).ceil().to_usize().unwrap_or(1).max(1);
    let width = (b - a) / F::of_usize(panels);
    let mut out = Vec::with_capacity(panels * rule.order());
    for p in 0..panels {
        let lo = a + width * F::of_usize(p);
        let hi = if p + 1 == panels { b } else { lo + width };
        out.extend(rule.mapped(lo, hi));
    }
    out
}

/// Panels `[r^{k+1} x0, r^k x0]`, k = 0..levels, grading geometrically into 0,
/// returned from the origin outward.
pub fn graded_nodes<F: Scalar>(rule: &GaussLegendre<F>, x0: F, ratio: F, levels: usize) -> Vec<(F, F)> {
    let mut out = Vec::with_capacity(levels * rule.order());
    let mut hi = x0;
    let mut stack = Vec::with_capacity(levels);
    for _ in 0..levels {
        let lo = hi * ratio;
        stack.push((lo, hi));
        hi = lo;
    }
    for &(lo, hi) in stack.iter().rev() {
        out.extend(rule.mapped(lo, hi));
    }
    out
}

/// Settings for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<F> {
    pub abs_tol: F,
    pub rel_tol: F,
    /// Upper limit on the number of subintervals.
    pub max_intervals: usize,
    /// The domain is first split into this many equal pieces so narrow
    /// features are not missed by the first Kronrod estimate.
    pub initial_pieces: usize,
    /// Truncation of `(0, ∞)` integrals on the log axis: `|log t| <= log_range`.
    pub log_range: F,
    /// Cross-check closed forms against quadrature where supported.
    pub verify: bool,
}

impl<F: Scalar> Default for QuadConfig<F> {
    fn default() -> Self {
        QuadConfig {
            abs_tol: F::tol(1e-13, 16.0),
            rel_tol: F::tol(1e-11, 64.0),
            max_intervals: 4000,
            initial_pieces: 16,
            log_range: F::lit(40.0),
            verify: false,
        }
    }
}

impl<F: Scalar> QuadConfig<F> {
    pub fn with_tolerances(abs_tol: F, rel_tol: F) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Scalar, T: QuadValue<F>>(
    f: &mut impl FnMut(F) -> Result<T>,
    a: F,
    b: F,
) -> Result<(T, F)> {
    let half = (b - a) * F::lit(0.5);
    let mid = (a + b) * F::lit(0.5);
    let fc = f(mid)?;
    let mut kron = fc * F::lit(WGK[7]);
    let mut gauss = fc * F::lit(WG[3]);
    for j in 0..7 {
        let dx = half * F::lit(XGK[j]);
        let pair = f(mid - dx)? + f(mid + dx)?;
        kron = kron + pair * F::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * F::lit(WG[j / 2]);
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    Ok((kron, (kron - gauss).magnitude()))
}

/// Adaptive Gauss–Kronrod integral of a fallible integrand.
///
/// Returns the value and the estimated absolute error.
pub fn try_adaptive<F: Scalar, T: QuadValue<F>>(
    mut f: impl FnMut(F) -> Result<T>,
    a: F,
    b: F,
    cfg: &QuadConfig<F>,
) -> Result<(T, F)> {
    if a == b {
        return Ok((T::zero(), F::zero()));
    }
    let pieces = cfg.initial_pieces.max(1);
    let width = (b - a) / F::of_usize(pieces);
    let mut intervals: Vec<(F, F, T, F)> = Vec::with_capacity(cfg.max_intervals.max(pieces));
    for p in 0..pieces {
        let lo = a + width * F::of_usize(p);
        let hi = if p + 1 == pieces { b } else { lo + width };
        let (v, e) = gk15(&mut f, lo, hi)?;
        intervals.push((lo, hi, v, e));
    }
    loop {
        let (total, err) = intervals
            .iter()
            .fold((T::zero(), F::zero()), |(s, e), iv| (s + iv.2, e + iv.3));
        if !total.magnitude().is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if err <= target {
            return Ok((total, err));
        }
        if intervals.len() >= cfg.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence after {} subintervals on [{a}, {b}]: error {err} > {target}",
                intervals.len()
            )));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let m = (lo + hi) * F::lit(0.5);
        if !(m > lo && m < hi) {
            return Err(Error::Quadrature(format!(
                "interval [{lo}, {hi}] cannot be bisected further"
            )));
        }
        let (v1, e1) = gk15(&mut f, lo, m)?;
        let (v2, e2) = gk15(&mut f, m, hi)?;
        intervals.push((lo, m, v1, e1));
        intervals.push((m, hi, v2, e2));
    }
}

/// Adaptive Gauss–Kronrod integral of an infallible integrand.
pub fn adaptive<F: Scalar, T: QuadValue<F>>(
    mut f: impl FnMut(F) -> T,
    a: F,
    b: F,
    cfg: &QuadConfig<F>,
) -> Result<(T, F)> {
    try_adaptive(|x| Ok(f(x)), a, b, cfg)
}

/// `∫_0^∞ f(t) dt` through `t = e^s`, `|s| <= cfg.log_range`.
pub fn adaptive_half_line<F: Scalar, T: QuadValue<F>>(
    mut f: impl FnMut(F) -> T,
    cfg: &QuadConfig<F>,
) -> Result<(T, F)> {
    let r = cfg.log_range;
    adaptive(
        |s: F| {
            let t = s.exp();
            f(t) * t
        },
        -r,
        r,
        cfg,
    )
}
