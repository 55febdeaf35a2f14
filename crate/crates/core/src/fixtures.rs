//! Two-point constructions from the minimax lower bounds, used as oracles.
//!
//! A base mixing density `q` is perturbed by `q∨ρ_M` with
//! `ρ_M(x) = φ(log x) sin(M log x)/x` (`φ` the standard normal density) or
//! its variant with an extra `1/log x`. The Mellin transform of `ρ_M` is a
//! difference of Gaussians (resp. of error functions), so the perturbation
//! of the observation density `p = mixture(q)` has the closed transform
//!
//! ```text
//! M[Δp](z) = 2^{z/2} Γ(z/2)/√(2π) · M[q]((z+1)/2) · (M[ρ_M]((z+1)/2) − ζ_M)
//! ```
//!
//! with `ζ_M = ∫ρ_M` (zero for the plain variant). `Δp` is evaluated by
//! inverting this on `Re z = 1` with fixed nodes, which keeps it smooth in
//! `x` down to the `e^{−cM}` scales the χ² checks need.
//!
//! Only `ρ_M` and its transform are generic over the scalar; the pair
//! machinery is a test oracle and runs in `f64`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{
    heavy_tail_density, heavy_tail_mellin, line_nodes, log_tail_density, log_tail_mellin, multiplicative_convolution,
    MellinFunction,
};
use crate::quad::{adaptive, adaptive_half_line, try_adaptive, QuadConfig};
use crate::scalar::{cx, real, Cx, Scalar};
use crate::special::{erfc, ln_gamma};

/// Half-width of the `v`-range used to invert `M[Δp]` on `Re z = 1`.
const DELTA_CUTOFF: f64 = 60.0;
/// Upper end of the χ² integration range.
pub const CHI_SQUARE_X_MAX: f64 = 50.0;

/// Which perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `ρ_M(x) = φ(log x) sin(M log x)/x`; base `q ∝ 1/(1+x^ν)`.
    Poly,
    /// `ρ_M(x) = φ(log x) sin(M log x)/(x log x)`; base with log tails.
    Log,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(Variant::Poly),
            "log" => Ok(Variant::Log),
            other => Err(Error::Param(format!("unknown variant `{other}` (poly|log)"))),
        }
    }
}

/// `ρ_M(x)`.
pub fn rho_m<F: Scalar>(variant: Variant, m: F, x: F) -> Result<F> {
    if !(x > F::zero()) {
        return Err(Error::Domain(format!("rho_m needs x > 0, got {x}")));
    }
    if !(m > F::zero()) {
        return Err(Error::Domain(format!("rho_m needs M > 0, got {m}")));
    }
    let inv_sqrt_2pi = F::one() / (F::lit(2.0) * F::PI()).sqrt();
    let s = x.ln();
    let gauss = inv_sqrt_2pi * (-s * s * F::lit(0.5)).exp();
    Ok(match variant {
        Variant::Poly => gauss * (m * s).sin() / x,
        Variant::Log => {
            if s == F::zero() {
                m * inv_sqrt_2pi
            } else {
                gauss * (m * s).sin() / (s * x)
            }
        }
    })
}

/// `M[ρ_M](z)`.
///
/// Plain: `(e^{(z−1+iM)²/2} − e^{(z−1−iM)²/2})/(2i)`. Log: with
/// `z − 1 = c + iv`, `½√(π/2)[erfc(−(v+M−ic)/√2) − erfc(−(v−M−ic)/√2)]`.
pub fn mellin_rho_m<F: Scalar>(variant: Variant, m: F, z: Cx<F>) -> Result<Cx<F>> {
    if !(m > F::zero()) {
        return Err(Error::Domain(format!("mellin_rho_m needs M > 0, got {m}")));
    }
    let half = F::lit(0.5);
    let w = z - F::one();
    Ok(match variant {
        Variant::Poly => {
            let a = w + cx(F::zero(), m);
            let b = w - cx(F::zero(), m);
            let d = (a * a * half).exp() - (b * b * half).exp();
            // d / (2i)
            cx(d.im * half, -d.re * half)
        }
        Variant::Log => {
            let r2 = F::lit(2.0).sqrt();
            let k = (F::PI() * half).sqrt() * half;
            let at = |t: F| -(cx(w.im + t, -w.re)) / r2;
            (erfc(at(m)) - erfc(at(-m))) * k
        }
    })
}

/// `ζ_M = ∫_0^∞ ρ_M` of the log variant, `√(π/2) erf(M/√2)`.
pub fn zeta_m(m: f64) -> f64 {
    mellin_rho_m(Variant::Log, m, real(1.0)).map(|v| v.re).unwrap_or(f64::NAN)
}

/// `p(x) = (2/√(2π)) ∫_0^∞ λ^{−1/2} e^{−x²/(2λ)} q(λ) dλ`, the density of
/// `|W_T|` when `T` has density `q`.
pub fn mixture_density(q: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("mixture_density needs x >= 0, got {x}")));
    }
    let c = 2.0 / (2.0 * PI).sqrt();
    let cfg = QuadConfig::with_tolerances(1e-15, 1e-11);
    let (v, _) = adaptive_half_line(
        |l: f64| {
            let k = l.powf(-0.5) * (-x * x / (2.0 * l)).exp();
            if k == 0.0 { 0.0 } else { k * q(l) }
        },
        &cfg,
    )?;
    Ok(c * v)
}

/// Mellin transform of [`mixture_density`] from that of `q`:
/// `2^{z/2} Γ(z/2)/√(2π) · M[q]((z+1)/2)`.
pub fn mixture_mellin(mq: impl Fn(Cx<f64>) -> Result<Cx<f64>>, z: Cx<f64>) -> Result<Cx<f64>> {
    let e = (z * (0.5 * 2f64.ln()) + ln_gamma(z * 0.5)?).exp() / (2.0 * PI).sqrt();
    Ok(e * mq((z + 1.0) * 0.5)?)
}

/// A base/perturbed pair of mixing densities with the matching observation
/// densities.
#[derive(Debug, Clone)]
pub struct PerturbedPair {
    pub variant: Variant,
    pub nu: f64,
    pub m: f64,
    /// Multiplier of the perturbation (1 for the proof's pair).
    pub scale: f64,
    /// `∫ρ_M`, zero for the plain variant.
    pub zeta_m: f64,
    delta_nodes: Vec<(f64, Cx<f64>)>,
}

/// The pair with unit perturbation.
pub fn build_pair(variant: Variant, nu: f64, m: f64) -> Result<PerturbedPair> {
    PerturbedPair::new(variant, nu, m, 1.0)
}

impl PerturbedPair {
    pub fn new(variant: Variant, nu: f64, m: f64, scale: f64) -> Result<Self> {
        if !(nu > 1.0 && nu.is_finite()) {
            return Err(Error::Param(format!("nu must exceed 1, got {nu}")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Param(format!("M must be positive, got {m}")));
        }
        if !scale.is_finite() {
            return Err(Error::Param("perturbation scale must be finite".into()));
        }
        let zeta = match variant {
            Variant::Poly => 0.0,
            Variant::Log => zeta_m(m),
        };
        let mut pair = PerturbedPair {
            variant,
            nu,
            m,
            scale,
            zeta_m: zeta,
            delta_nodes: Vec::new(),
        };
        let mq = pair.base_mellin()?;
        let mut nodes = Vec::new();
        for (v, w) in line_nodes(DELTA_CUTOFF) {
            let z = cx(1.0, v);
            let s = (z + 1.0) * 0.5;
            let pert = (mellin_rho_m(variant, m, s)? - zeta) * scale;
            let t = mixture_mellin(|u| mq.evaluate(u), z)? * pert;
            nodes.push((v, t * (w / (2.0 * PI))));
        }
        pair.delta_nodes = nodes;
        // Normalization of the perturbed mixing density, asserted.
        let mass = pair.q1_mass()?;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Quadrature(format!("perturbed density integrates to {mass}")));
        }
        Ok(pair)
    }

    /// `q0(x)`.
    pub fn q0(&self, x: f64) -> f64 {
        match self.variant {
            Variant::Poly => heavy_tail_density(self.nu, x),
            Variant::Log => log_tail_density(self.nu, x),
        }
    }

    /// `M[q0]`.
    pub fn base_mellin(&self) -> Result<MellinFunction<f64>> {
        match self.variant {
            Variant::Poly => heavy_tail_mellin(self.nu),
            Variant::Log => log_tail_mellin(self.nu),
        }
    }

    /// `(q0∨ρ_M)(x)` by direct quadrature.
    pub fn q_conv_rho(&self, x: f64) -> Result<f64> {
        let cfg = QuadConfig {
            max_intervals: 20_000,
            ..QuadConfig::with_tolerances(1e-14, 1e-10)
        };
        multiplicative_convolution(|t| self.q0(t), |u| rho_m(self.variant, self.m, u).unwrap_or(0.0), x, &cfg)
    }

    /// `q1(x)`: `q0 + s·q0∨ρ_M` (plain) or `(1 − sζ_M)q0 + s·q0∨ρ_M` (log).
    pub fn q1(&self, x: f64) -> Result<f64> {
        if self.scale == 0.0 {
            return Ok(self.q0(x));
        }
        let conv = self.q_conv_rho(x)?;
        Ok((1.0 - self.scale * self.zeta_m) * self.q0(x) + self.scale * conv)
    }

    /// `∫ q1`, from `∫ q0∨ρ_M = ∫q0 · ∫ρ_M` checked by quadrature of `q0`.
    fn q1_mass(&self) -> Result<f64> {
        let cfg = QuadConfig::with_tolerances(1e-14, 1e-11);
        let (m0, _) = adaptive_half_line(|t| self.q0(t), &cfg)?;
        let (r, _) = adaptive(
            |s: f64| rho_m(self.variant, self.m, s.exp()).unwrap_or(0.0) * s.exp(),
            -40.0,
            40.0,
            &QuadConfig { max_intervals: 20_000, ..cfg },
        )?;
        Ok((1.0 - self.scale * self.zeta_m) * m0 + self.scale * m0 * r)
    }

    /// `M[q1](z)`.
    pub fn q1_mellin(&self) -> Result<MellinFunction<f64>> {
        let base = self.base_mellin()?;
        let (lo, hi) = base.strip();
        let (variant, m, scale, zeta) = (self.variant, self.m, self.scale, self.zeta_m);
        MellinFunction::new(format!("perturbed({variant:?}, M={m})"), lo, hi, move |z| {
            Ok(base.evaluate(z)? * (real(1.0) + (mellin_rho_m(variant, m, z)? - zeta) * scale))
        })
    }

    /// Observation density under `q0`.
    pub fn p0(&self, x: f64) -> Result<f64> {
        mixture_density(|t| self.q0(t), x)
    }

    /// `p1 − p0` on `x > 0`.
    pub fn delta_p(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("delta_p needs x > 0, got {x}")));
        }
        let lx = x.ln();
        let scale = 1.0 / x;
        let mut acc = Cx::new(0.0, 0.0);
        for &(v, t) in &self.delta_nodes {
            let (s, c) = (-v * lx).sin_cos();
            acc += t * cx(c, s);
        }
        Ok(acc.re * scale)
    }

    /// Observation density under `q1`.
    pub fn p1(&self, x: f64) -> Result<f64> {
        Ok(self.p0(x)? + self.delta_p(x)?)
    }
}

/// χ² distance with the estimated tail beyond the integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub value: f64,
    /// Power-law extrapolation of `∫_{x_max}^∞`; infinite when the integrand
    /// does not decay faster than `1/x`.
    pub tail_bound: f64,
}

/// `∫_0^{50} (p1 − p0)²/p0 dx` by adaptive quadrature.
pub fn chi_square_distance(
    p0: impl Fn(f64) -> Result<f64>,
    p1: impl Fn(f64) -> Result<f64>,
    cfg: &QuadConfig<f64>,
) -> Result<ChiSquare> {
    let f = |x: f64| -> Result<f64> {
        let a = p0(x)?;
        let b = p1(x)?;
        if b == a {
            return Ok(0.0);
        }
        if !(a > f64::MIN_POSITIVE) {
            return Err(Error::Divide(format!("p0({x}) = {a} underflows")));
        }
        Ok((b - a) * (b - a) / a)
    };
    let (value, _) = try_adaptive(f, 0.0, CHI_SQUARE_X_MAX, cfg)?;
    let (fa, fb) = (f(CHI_SQUARE_X_MAX / 2.0)?, f(CHI_SQUARE_X_MAX)?);
    let tail_bound = if fb == 0.0 {
        0.0
    } else {
        let k = (fa / fb).ln() / 2f64.ln();
        if k > 1.0 {
            fb * CHI_SQUARE_X_MAX / (k - 1.0)
        } else {
            f64::INFINITY
        }
    };
    Ok(ChiSquare { value, tail_bound })
}

/// χ² between the observation densities of a pair.
pub fn pair_chi_square(pair: &PerturbedPair) -> Result<ChiSquare> {
    let cfg = QuadConfig {
        max_intervals: 2000,
        initial_pieces: 32,
        ..QuadConfig::with_tolerances(0.0, 1e-6)
    };
    // x = 0 is replaced by a tiny positive point; the integrand is bounded there.
    chi_square_distance(
        |x| pair.p0(x.max(1e-12)),
        |x| {
            let x = x.max(1e-12);
            Ok(pair.p0(x)? + pair.delta_p(x)?)
        },
        &cfg,
    )
}

/// Least-squares slope of `log y` against `x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData("need at least two points".into()));
    }
    if y.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("log slope needs positive values".into()));
    }
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}
