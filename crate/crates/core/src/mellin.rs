//! Mellin transforms: empirical, closed-form catalog, regularized inversion
//! on a vertical line, multiplicative convolution and class norms.
//!
//! Conventions: `M[f](z) = ∫_0^∞ f(x) x^{z−1} dx`, analytic on a strip
//! `a < Re z < b`. Inversion along `Re z = γ` reads
//! `f(x) = (1/2π) ∫ x^{−γ−iv} M[f](γ+iv) dv`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, composite_nodes, GaussLegendre, QuadConfig};
use crate::sample::SampleSet;
use crate::scalar::{cx, real, Cx, Scalar};
use crate::special::ln_gamma;

/// Panel width on the vertical line.
pub const LINE_PANEL_WIDTH: f64 = 0.5;
/// Gauss–Legendre nodes per panel on the vertical line.
pub const LINE_ORDER: usize = 12;

type MellinEval<F> = dyn Fn(Cx<F>) -> Result<Cx<F>> + Send + Sync;

/// A Mellin transform together with its strip of analyticity.
#[derive(Clone)]
pub struct MellinFunction<F> {
    eval: Arc<MellinEval<F>>,
    strip_lo: F,
    strip_hi: F,
    label: String,
}

impl<F: Scalar> fmt::Debug for MellinFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MellinFunction")
            .field("label", &self.label)
            .field("strip_lo", &self.strip_lo)
            .field("strip_hi", &self.strip_hi)
            .finish()
    }
}

impl<F: Scalar> MellinFunction<F> {
    pub fn new(
        label: impl Into<String>,
        strip_lo: F,
        strip_hi: F,
        eval: impl Fn(Cx<F>) -> Result<Cx<F>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(strip_lo < strip_hi) {
            return Err(Error::Param(format!("empty strip ({strip_lo}, {strip_hi})")));
        }
        Ok(MellinFunction {
            eval: Arc::new(eval),
            strip_lo,
            strip_hi,
            label: label.into(),
        })
    }

    /// Transform of the zero function, analytic everywhere.
    pub fn zero() -> Self {
        MellinFunction {
            eval: Arc::new(|_| Ok(Cx::new(F::zero(), F::zero()))),
            strip_lo: F::neg_infinity(),
            strip_hi: F::infinity(),
            label: "zero".into(),
        }
    }

    pub fn strip(&self) -> (F, F) {
        (self.strip_lo, self.strip_hi)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, re: F) -> bool {
        re > self.strip_lo && re < self.strip_hi
    }

    pub(crate) fn check_line(&self, re: F) -> Result<()> {
        if self.contains(re) {
            Ok(())
        } else {
            Err(Error::Strip {
                re: re.as_f64(),
                lo: self.strip_lo.as_f64(),
                hi: self.strip_hi.as_f64(),
            })
        }
    }

    /// Evaluates inside the strip.
    pub fn evaluate(&self, z: Cx<F>) -> Result<Cx<F>> {
        self.check_line(z.re)?;
        (self.eval)(z)
    }

    /// Multiplies the transform by a constant.
    pub fn scaled(&self, c: F) -> Self {
        let inner = Arc::clone(&self.eval);
        MellinFunction {
            eval: Arc::new(move |z| inner(z).map(|v| v * c)),
            strip_lo: self.strip_lo,
            strip_hi: self.strip_hi,
            label: format!("{c}*{}", self.label),
        }
    }

    /// Transform of `|W_T|` (`W` a standard Brownian motion independent of
    /// `T`) given the transform of the density of `T`:
    /// `E|W_1|^{z−1} · M[p_T]((z+1)/2)`, with
    /// `E|W_1|^{z−1} = 2^{(z−1)/2} Γ(z/2)/√π`.
    pub fn subordinated_abs_bm(&self) -> Self {
        let inner = Arc::clone(&self.eval);
        let two = F::lit(2.0);
        let lo = (two * self.strip_lo - F::one()).max(F::zero());
        let hi = two * self.strip_hi - F::one();
        MellinFunction {
            eval: Arc::new(move |z: Cx<F>| {
                let half = F::lit(0.5);
                let w = (z + F::one()) * half;
                let lg = ln_gamma(z * half)? + (z - F::one()) * (half * two.ln())
                    - real(half * F::PI().ln());
                Ok(lg.exp() * inner(w)?)
            }),
            strip_lo: lo,
            strip_hi: hi,
            label: format!("|W_T| for {}", self.label),
        }
    }
}

/// Smoothness classes: exponential (`C`) or polynomial (`D`) decay weight on
/// the vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothnessMode {
    C,
    D,
}

impl fmt::Display for SmoothnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmoothnessMode::C => "C",
            SmoothnessMode::D => "D",
        })
    }
}

impl std::str::FromStr for SmoothnessMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(SmoothnessMode::C),
            "D" | "d" => Ok(SmoothnessMode::D),
            other => Err(Error::Param(format!("smoothness mode `{other}` (expected C or D)"))),
        }
    }
}

/// Precomputed logarithms of `|X_k|` for repeated empirical Mellin
/// evaluation.
#[derive(Debug, Clone)]
pub struct EmpiricalMellin<F> {
    logs: Vec<F>,
    zeros: Vec<usize>,
    n: usize,
}

impl<F: Scalar> EmpiricalMellin<F> {
    /// Uses `|x|` for every sample.
    pub fn new(samples: &SampleSet<F>) -> Self {
        let mut logs = Vec::with_capacity(samples.len());
        let mut zeros = Vec::new();
        for (i, &x) in samples.values().iter().enumerate() {
            if x == F::zero() {
                zeros.push(i);
            } else {
                logs.push(x.abs().ln());
            }
        }
        EmpiricalMellin {
            logs,
            zeros,
            n: samples.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(1/n) Σ |X_k|^{z−1}`.
    pub fn eval(&self, z: Cx<F>) -> Result<Cx<F>> {
        if z.re <= F::lit(0.5) {
            return Err(Error::Domain(format!("empirical Mellin needs Re z > 1/2, got {}", z.re)));
        }
        if z.re <= F::one() {
            if let Some(&i) = self.zeros.first() {
                return Err(Error::SingularSample {
                    index: i,
                    re: z.re.as_f64(),
                });
            }
        }
        if z.re == F::one() && z.im == F::zero() {
            return Ok(real(F::one()));
        }
        let a = z.re - F::one();
        let b = z.im;
        let (mut sr, mut si) = (F::zero(), F::zero());
        for &l in &self.logs {
            let m = (a * l).exp();
            let (s, c) = (b * l).sin_cos();
            sr += m * c;
            si += m * s;
        }
        let n = F::of_usize(self.n);
        Ok(cx(sr / n, si / n))
    }
}

/// `(1/n) Σ |X_k|^{z−1}`.
pub fn empirical_mellin<F: Scalar>(samples: &SampleSet<F>, z: Cx<F>) -> Result<Cx<F>> {
    EmpiricalMellin::new(samples).eval(z)
}

/// Closed-form test densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Catalog {
    /// `x^{α−1} e^{−x}/Γ(α)`.
    GammaDensity { alpha: f64 },
    /// `(q sin(π/q)/π) / (1 + x^q)`.
    HeavyTailQ { q: f64 },
    /// `[2Γ(ν)]^{−1} log^{ν−1}(1/x)` on `(0,1]`, `[2Γ(ν)]^{−1} x^{−2} log^{ν−1} x` above.
    LogTailQ { nu: f64 },
}

impl Catalog {
    /// Parses a catalog tag with its parameter map.
    pub fn from_tag(tag: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Param(format!("{tag} requires parameter `{k}`")))
        };
        let c = match tag {
            "gamma_density" => Catalog::GammaDensity { alpha: get("alpha")? },
            "heavy_tail_q" => Catalog::HeavyTailQ { q: get("q")? },
            "log_tail_q" => Catalog::LogTailQ { nu: get("nu")? },
            other => return Err(Error::UnknownCatalogTag(other.to_string())),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Catalog::GammaDensity { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::Param(format!("gamma_density needs alpha > 0, got {alpha}")))
            }
            Catalog::HeavyTailQ { q } if !(q >= 2.0 && q.is_finite()) => {
                Err(Error::Param(format!("heavy_tail_q needs q >= 2, got {q}")))
            }
            Catalog::LogTailQ { nu } if !(nu > 1.0 && nu.is_finite()) => {
                Err(Error::Param(format!("log_tail_q needs nu > 1, got {nu}")))
            }
            _ => Ok(()),
        }
    }

    /// The density itself.
    pub fn density<F: Scalar>(&self, x: F) -> F {
        if x <= F::zero() {
            return F::zero();
        }
        match *self {
            Catalog::GammaDensity { alpha } => {
                let a = F::lit(alpha);
                ((a - F::one()) * x.ln() - x - ln_gamma(real(a)).map(|l| l.re).unwrap_or(F::zero())).exp()
            }
            Catalog::HeavyTailQ { q } => heavy_tail_density(F::lit(q), x),
            Catalog::LogTailQ { nu } => log_tail_density(F::lit(nu), x),
        }
    }

    pub fn mellin<F: Scalar>(&self) -> Result<MellinFunction<F>> {
        self.validate()?;
        match *self {
            Catalog::GammaDensity { alpha } => {
                let a = F::lit(alpha);
                let lg_a = ln_gamma(real(a))?;
                MellinFunction::new(
                    format!("gamma_density(alpha={alpha})"),
                    F::one() - a,
                    F::infinity(),
                    move |z| Ok((ln_gamma(z + a - F::one())? - lg_a).exp()),
                )
            }
            Catalog::HeavyTailQ { q } => heavy_tail_mellin(F::lit(q)),
            Catalog::LogTailQ { nu } => log_tail_mellin(F::lit(nu)),
        }
    }
}

/// Closed-form catalog transform by tag.
pub fn analytic_mellin<F: Scalar>(tag: &str, params: &BTreeMap<String, f64>) -> Result<MellinFunction<F>> {
    Catalog::from_tag(tag, params)?.mellin()
}

pub(crate) fn heavy_tail_density<F: Scalar>(q: F, x: F) -> F {
    let c = q * (F::PI() / q).sin() / F::PI();
    // 1/(1+x^q) without overflow for large x.
    if x > F::one() {
        let r = x.powf(-q);
        c * r / (F::one() + r)
    } else {
        c / (F::one() + x.powf(q))
    }
}

/// `sin(π/q)/sin(πz/q)` on `0 < Re z < q`. Valid for every `q > 1`.
pub(crate) fn heavy_tail_mellin<F: Scalar>(q: F) -> Result<MellinFunction<F>> {
    let num = (F::PI() / q).sin();
    MellinFunction::new(format!("heavy_tail_q(q={q})"), F::zero(), q, move |z: Cx<F>| {
        Ok(real(num) / (z * (F::PI() / q)).sin())
    })
}

pub(crate) fn log_tail_density<F: Scalar>(nu: F, x: F) -> F {
    let norm = F::lit(2.0) * ln_gamma(real(nu)).map(|l| l.re.exp()).unwrap_or(F::one());
    if x <= F::one() {
        (-x.ln()).powf(nu - F::one()) / norm
    } else {
        x.ln().powf(nu - F::one()) / (x * x * norm)
    }
}

/// `½[z^{−ν} + (2−z)^{−ν}]` on `0 < Re z < 2`.
pub(crate) fn log_tail_mellin<F: Scalar>(nu: F) -> Result<MellinFunction<F>> {
    MellinFunction::new(format!("log_tail_q(nu={nu})"), F::zero(), F::lit(2.0), move |z: Cx<F>| {
        let two = real(F::lit(2.0));
        Ok(((z.ln() * -nu).exp() + ((two - z).ln() * -nu).exp()) * F::lit(0.5))
    })
}

/// Symmetric composite Gauss–Legendre nodes on `[−cutoff, cutoff]`.
pub(crate) fn line_nodes<F: Scalar>(cutoff: F) -> Vec<(F, F)> {
    let rule = GaussLegendre::new(LINE_ORDER);
    composite_nodes(&rule, -cutoff, cutoff, F::lit(LINE_PANEL_WIDTH))
}

/// Real part of a symmetric-node line integral after checking that the
/// imaginary residue is small relative to the integral of the modulus.
pub(crate) fn real_after_symmetry_check<F: Scalar>(value: Cx<F>, modulus: F, tol: F, what: &str) -> Result<F> {
    if value.im.abs() > tol * modulus && value.im.abs() > F::min_positive_value() {
        return Err(Error::Quadrature(format!(
            "{what}: imaginary residue {} exceeds {} of the integrand modulus {}",
            value.im, tol, modulus
        )));
    }
    Ok(value.re)
}

/// `(1/2π) ∫_{−cutoff}^{cutoff} x^{−γ−iv} m(γ+iv) dv` on each grid point.
pub fn mellin_inverse_regularized<F: Scalar>(
    m: &MellinFunction<F>,
    gamma_line: F,
    cutoff: F,
    x_grid: &[F],
) -> Result<Vec<F>> {
    m.check_line(gamma_line)?;
    if !(cutoff >= F::zero()) {
        return Err(Error::Domain(format!("cutoff must be nonnegative, got {cutoff}")));
    }
    if let Some(x) = x_grid.iter().find(|x| !(**x > F::zero())) {
        return Err(Error::Domain(format!("grid point {x} is not positive")));
    }
    if cutoff == F::zero() {
        return Ok(vec![F::zero(); x_grid.len()]);
    }
    let nodes = line_nodes(cutoff);
    let values: Vec<(F, Cx<F>)> = nodes
        .iter()
        .map(|&(v, w)| m.evaluate(cx(gamma_line, v)).map(|mv| (v, mv * w)))
        .collect::<Result<_>>()?;
    let tol = F::tol(1e-8, 64.0);
    let two_pi = F::lit(2.0) * F::PI();
    x_grid
        .par_iter()
        .map(|&x| {
            let lx = x.ln();
            let scale = (-gamma_line * lx).exp();
            let (mut acc, mut modulus) = (Cx::new(F::zero(), F::zero()), F::zero());
            for &(v, mw) in &values {
                let (s, c) = (-v * lx).sin_cos();
                acc += mw * cx(c, s);
                modulus += mw.norm();
            }
            let acc = acc * (scale / two_pi);
            real_after_symmetry_check(acc, modulus * scale / two_pi, tol, "inverse Mellin")
        })
        .collect()
}

/// `(f∨g)(x) = ∫_0^∞ f(t) g(x/t) dt/t`, integrated over `s = log t` with
/// `|s| <= cfg.log_range`.
pub fn multiplicative_convolution<F: Scalar>(
    f: impl Fn(F) -> F,
    g: impl Fn(F) -> F,
    x: F,
    cfg: &QuadConfig<F>,
) -> Result<F> {
    if !(x > F::zero()) {
        return Err(Error::Domain(format!("convolution point {x} is not positive")));
    }
    let h = |s: F| f(s.exp()) * g(x * (-s).exp());
    let r = cfg.log_range;
    let (v, _) = quad::adaptive(h, -r, r, cfg)?;
    let edge = h(-r).abs().max(h(r).abs());
    if edge > cfg.abs_tol.max(cfg.rel_tol * v.abs()) {
        return Err(Error::Quadrature(format!(
            "integrand {edge} at |log t| = {r} is not negligible against {v}"
        )));
    }
    Ok(v)
}

fn class_weight<F: Scalar>(v: F, beta: F, mode: SmoothnessMode) -> F {
    match mode {
        SmoothnessMode::C => (beta * v.abs()).exp(),
        SmoothnessMode::D => F::one() + v.abs().powf(beta),
    }
}

/// `∫_{−cutoff}^{cutoff} |m(γ+iv)| w(v) dv` with `w = e^{β|v|}` (class C) or
/// `1+|v|^β` (class D).
///
/// The neglected tails are estimated from the local decay at `±cutoff`
/// (exponential fit in mode C, power fit in mode D); the result is rejected
/// unless that estimate is below 1% of the truncated integral.
pub fn smoothness_norm<F: Scalar>(
    m: &MellinFunction<F>,
    beta: F,
    gamma_line: F,
    mode: SmoothnessMode,
    cutoff: F,
) -> Result<F> {
    m.check_line(gamma_line)?;
    if !(beta > F::zero()) || !(cutoff > F::zero()) {
        return Err(Error::Domain("beta and cutoff must be positive".into()));
    }
    let g = |v: F| -> Result<F> { Ok(m.evaluate(cx(gamma_line, v))?.norm() * class_weight(v, beta, mode)) };
    let mut partial = F::zero();
    for (v, w) in line_nodes(cutoff) {
        partial += g(v)? * w;
    }
    let delta = (cutoff * F::lit(0.25)).min(F::lit(2.0));
    let mut tail = F::zero();
    for side in [F::one(), -F::one()] {
        let outer = g(side * cutoff)?;
        let inner = g(side * (cutoff - delta))?;
        if outer == F::zero() {
            continue;
        }
        let ratio = (inner / outer).ln();
        match mode {
            SmoothnessMode::C => {
                let rate = ratio / delta;
                if !(rate > F::zero()) {
                    return Err(Error::Tail(format!(
                        "weighted transform is not decaying at |v| = {cutoff} (beta = {beta})"
                    )));
                }
                tail += outer / rate;
            }
            SmoothnessMode::D => {
                let power = ratio / (cutoff / (cutoff - delta)).ln();
                if !(power > F::one()) {
                    return Err(Error::Tail(format!(
                        "weighted transform decays like |v|^-{power} at |v| = {cutoff}: not integrable"
                    )));
                }
                tail += outer * cutoff / (power - F::one());
            }
        }
    }
    if !tail.is_finite() || tail > F::lit(0.01) * partial {
        return Err(Error::Tail(format!(
            "tail estimate {tail} exceeds 1% of the truncated norm {partial}"
        )));
    }
    Ok(partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: &str, v: f64) -> BTreeMap<String, f64> {
        [(k.to_string(), v)].into_iter().collect()
    }

    #[test]
    fn empirical_basics() {
        let s = SampleSet::new(vec![2.0f64, 8.0], 0, "t").unwrap();
        let v = empirical_mellin(&s, Cx::new(2.0, 0.0)).unwrap();
        assert!((v.re - 5.0).abs() < 1e-14);
        let ones = SampleSet::new(vec![1.0f64; 3], 0, "t").unwrap();
        assert_eq!(empirical_mellin(&ones, Cx::new(0.9, 3.0)).unwrap(), Cx::new(1.0, 0.0));
        assert!(matches!(empirical_mellin(&s, Cx::new(0.5, 0.0)), Err(Error::Domain(_))));
        let z = SampleSet::new(vec![0.0f64, 1.0], 0, "t").unwrap();
        assert!(matches!(empirical_mellin(&z, Cx::new(0.9, 0.0)), Err(Error::SingularSample { .. })));
        assert!((empirical_mellin(&z, Cx::new(2.0, 0.0)).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn catalog_values() {
        let g = analytic_mellin::<f64>("gamma_density", &params("alpha", 2.0)).unwrap();
        assert!((g.evaluate(Cx::new(2.0, 0.0)).unwrap().re - 2.0).abs() < 1e-13);
        // Γ(2.5)/Γ(2) = 3√π/4
        let want = 0.75 * std::f64::consts::PI.sqrt();
        assert!((g.evaluate(Cx::new(1.5, 0.0)).unwrap().re - want).abs() < 1e-13);
        let h = analytic_mellin::<f64>("heavy_tail_q", &params("q", 2.0)).unwrap();
        assert!((h.evaluate(Cx::new(1.0, 0.0)).unwrap().re - 1.0).abs() < 1e-15);
        assert!(matches!(
            analytic_mellin::<f64>("nope", &params("q", 2.0)),
            Err(Error::UnknownCatalogTag(_))
        ));
        assert!(matches!(
            analytic_mellin::<f64>("heavy_tail_q", &params("q", 1.5)),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn catalog_transforms_match_their_densities() {
        let cfg = QuadConfig::default();
        let z = Cx::new(1.3, 0.4);
        for cat in [
            Catalog::GammaDensity { alpha: 2.0 },
            Catalog::HeavyTailQ { q: 3.0 },
            Catalog::LogTailQ { nu: 2.5 },
        ] {
            let m = cat.mellin::<f64>().unwrap().evaluate(z).unwrap();
            let (q, _) = quad::adaptive_half_line(
                |x: f64| (Cx::new(z.re - 1.0, z.im) * x.ln()).exp() * cat.density(x),
                &cfg,
            )
            .unwrap();
            assert!((q - m).norm() < 1e-8, "{cat:?}: {q} vs {m}");
        }
    }

    #[test]
    fn inversion_recovers_gamma_density() {
        let g = Catalog::GammaDensity { alpha: 2.0 }.mellin::<f64>().unwrap();
        let v = mellin_inverse_regularized(&g, 1.2, 40.0, &[1.0]).unwrap();
        assert!((v[0] - (-1.0f64).exp()).abs() < 1e-3);
        assert_eq!(mellin_inverse_regularized(&g, 1.2, 0.0, &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            mellin_inverse_regularized(&g, -1.5, 4.0, &[1.0]),
            Err(Error::Strip { .. })
        ));
    }

    #[test]
    fn subordinated_transform_matches_mixture_moments() {
        // E|W_T| for T ~ Gamma(2,1) is E√T · E|N| = Γ(2.5)/Γ(2) · √(2/π).
        let m = Catalog::GammaDensity { alpha: 2.0 }.mellin::<f64>().unwrap().subordinated_abs_bm();
        let want = 0.75 * std::f64::consts::PI.sqrt() * (2.0 / std::f64::consts::PI).sqrt();
        assert!((m.evaluate(Cx::new(2.0, 0.0)).unwrap().re - want).abs() < 1e-13);
        assert!((m.evaluate(Cx::new(1.0, 0.0)).unwrap().re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn convolution_of_gammas() {
        let cfg = QuadConfig::default();
        let f = |t: f64| t * (-t).exp();
        let v = multiplicative_convolution(f, f, 1.0, &cfg).unwrap();
        let (want, _) = quad::adaptive_half_line(|t: f64| (-t - 1.0 / t).exp() / t, &cfg).unwrap();
        assert!((v - want).abs() < 1e-10);
        assert_eq!(multiplicative_convolution(f, |_| 0.0, 2.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn norms() {
        let g = Catalog::GammaDensity { alpha: 2.0 }.mellin::<f64>().unwrap();
        let l = smoothness_norm(&g, 1.0, 1.2, SmoothnessMode::C, 60.0).unwrap();
        assert!(l.is_finite() && l > 0.0);
        let h = Catalog::HeavyTailQ { q: 2.0 }.mellin::<f64>().unwrap();
        assert!(matches!(
            smoothness_norm(&h, 2.0, 1.0, SmoothnessMode::C, 60.0),
            Err(Error::Tail(_))
        ));
        let z = MellinFunction::<f64>::zero();
        assert_eq!(smoothness_norm(&z, 1.0, 1.0, SmoothnessMode::D, 10.0).unwrap(), 0.0);
    }
}
