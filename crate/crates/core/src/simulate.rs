//! Reproducible samplers for random times and for the observations built
//! from them.
//!
//! Every stream is a `ChaCha8Rng` seeded from a single `u64`. Experiments
//! derive per-replication seeds with [`derive_seed`], a SplitMix64 mix of
//! `(master, stream, index)`, so any replication can be rerun on its own.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{heavy_tail_density, heavy_tail_mellin, MellinFunction};
use crate::quad::{adaptive, QuadConfig};
use crate::sample::SampleSet;
use crate::scalar::{real, Scalar};
use crate::special::ln_gamma;

/// Law of the random time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeDistribution {
    /// `Gamma(α, rate 1)`.
    Gamma { alpha: f64 },
    /// Generalized inverse Gaussian,
    /// `∝ v^{λ−1} exp(−(ϰ² v + δ²/v)/2)`.
    Gig { lambda: f64, kappa: f64, delta: f64 },
    /// `(ν sin(π/ν)/π)/(1 + x^ν)`.
    HeavyTailQ { nu: f64 },
}

impl TimeDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TimeDistribution::Gamma { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::Param(format!("gamma needs alpha > 0, got {alpha}")));
                }
            }
            TimeDistribution::Gig { lambda, kappa, delta } => {
                if !lambda.is_finite() || !(kappa >= 0.0) || !(delta >= 0.0) || !kappa.is_finite() || !delta.is_finite() {
                    return Err(Error::Param(format!("gig(lambda={lambda}, kappa={kappa}, delta={delta})")));
                }
                if kappa == 0.0 && delta == 0.0 {
                    return Err(Error::Param("gig needs kappa or delta positive".into()));
                }
                if delta == 0.0 && !(lambda > 0.0) {
                    return Err(Error::Param("gig with delta = 0 needs lambda > 0".into()));
                }
                if kappa == 0.0 && !(lambda < 0.0) {
                    return Err(Error::Param("gig with kappa = 0 needs lambda < 0".into()));
                }
            }
            TimeDistribution::HeavyTailQ { nu } => {
                if !(nu > 1.0 && nu.is_finite()) {
                    return Err(Error::Param(format!("heavy_tail_q needs nu > 1, got {nu}")));
                }
            }
        }
        Ok(())
    }

    /// Short tag such as `gamma(alpha=2)`.
    pub fn tag(&self) -> String {
        match *self {
            TimeDistribution::Gamma { alpha } => format!("gamma(alpha={alpha})"),
            TimeDistribution::Gig { lambda, kappa, delta } => {
                format!("gig(lambda={lambda},kappa={kappa},delta={delta})")
            }
            TimeDistribution::HeavyTailQ { nu } => format!("heavy_tail_q(nu={nu})"),
        }
    }

    /// Density at `x` (zero for `x <= 0`).
    pub fn density(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match *self {
            TimeDistribution::Gamma { alpha } => ((alpha - 1.0) * x.ln() - x - ln_gamma_real(alpha)).exp(),
            TimeDistribution::Gig { lambda, kappa, delta } => gig_density(lambda, kappa, delta, x),
            TimeDistribution::HeavyTailQ { nu } => heavy_tail_density(nu, x),
        }
    }

    /// Closed-form Mellin transform where one is available.
    pub fn mellin<F: Scalar>(&self) -> Result<MellinFunction<F>> {
        self.validate()?;
        match *self {
            TimeDistribution::Gamma { alpha } => crate::mellin::Catalog::GammaDensity { alpha }.mellin(),
            TimeDistribution::Gig { lambda, kappa, delta: 0.0 } => {
                // Gamma(λ, rate ϰ²/2).
                let a = F::lit(lambda);
                let rate = F::lit(kappa * kappa / 2.0);
                let lg = ln_gamma(real(a))?;
                MellinFunction::new(self.tag(), F::one() - a, F::infinity(), move |z| {
                    let s = z - F::one();
                    Ok((ln_gamma(s + a)? - lg - s * rate.ln()).exp())
                })
            }
            TimeDistribution::HeavyTailQ { nu } => heavy_tail_mellin(F::lit(nu)),
            TimeDistribution::Gig { .. } => Err(Error::Param(format!(
                "{}: Mellin transform needs Bessel functions of complex order",
                self.tag()
            ))),
        }
    }
}

/// How observations are produced from times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservationModel {
    /// `X = √T · N`.
    SubordinatedBm,
    /// `X = μT + σ√T · N`.
    VarianceMean { mu: f64, sigma: f64 },
    /// `X = T^{1/α} S` with `S` standard symmetric α-stable.
    SubordinatedStable { alpha: f64 },
}

impl ObservationModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ObservationModel::SubordinatedBm => Ok(()),
            ObservationModel::VarianceMean { mu, sigma } => {
                if !mu.is_finite() || !(sigma > 0.0) || !sigma.is_finite() {
                    Err(Error::Param(format!("variance_mean needs finite mu and sigma > 0, got ({mu}, {sigma})")))
                } else {
                    Ok(())
                }
            }
            ObservationModel::SubordinatedStable { alpha } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    Err(Error::Param(format!("stable index {alpha} outside (0, 2]")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            ObservationModel::SubordinatedBm => "subordinated_bm".into(),
            ObservationModel::VarianceMean { mu, sigma } => format!("variance_mean(mu={mu},sigma={sigma})"),
            ObservationModel::SubordinatedStable { alpha } => format!("subordinated_stable(alpha={alpha})"),
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of item `index` in stream `stream` under `master`.
///
/// `mix(mix(mix(master) + stream·φ) + index·φ)` with `φ` the 64-bit golden
/// ratio increment. Streams used by the harness: 0 for times, 1 for
/// observations.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    const PHI: u64 = 0x9e37_79b9_7f4a_7c15;
    let a = mix64(master.wrapping_add(PHI));
    let b = mix64(a.wrapping_add(stream.wrapping_add(1).wrapping_mul(PHI)));
    mix64(b.wrapping_add(index.wrapping_add(1).wrapping_mul(PHI)))
}

/// `n` i.i.d. draws of `T`.
pub fn sample_times<F: Scalar>(dist: &TimeDistribution, n: usize, seed: u64) -> Result<SampleSet<F>> {
    dist.validate()?;
    if n == 0 {
        return Err(Error::Param("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = match *dist {
        TimeDistribution::Gamma { alpha } => {
            let g = Gamma::new(alpha, 1.0).map_err(|e| Error::Param(e.to_string()))?;
            (0..n).map(|_| g.sample(&mut rng)).collect()
        }
        TimeDistribution::Gig { lambda, kappa, delta } => {
            let sampler = GigSampler::new(lambda, kappa, delta)?;
            (0..n).map(|_| sampler.sample(&mut rng)).collect()
        }
        TimeDistribution::HeavyTailQ { nu } => heavy_tail_draws(nu, n, &mut rng)?,
    };
    SampleSet::new(values.into_iter().map(F::lit).collect(), seed, dist.tag())
}

fn heavy_tail_draws(nu: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if nu == 2.0 {
        // CDF (2/π) arctan x.
        return Ok((0..n)
            .map(|_| (std::f64::consts::FRAC_PI_2 * rng.random::<f64>()).tan())
            .collect());
    }
    // T^ν is beta-prime(1/ν, 1 − 1/ν): T = (B/(1−B))^{1/ν}, B ~ Beta.
    let beta = Beta::new(1.0 / nu, 1.0 - 1.0 / nu).map_err(|e| Error::Param(e.to_string()))?;
    Ok((0..n)
        .map(|_| {
            let b: f64 = beta.sample(rng);
            (b / (1.0 - b)).powf(1.0 / nu)
        })
        .collect())
}

/// Observations `X_k` from times `T_k`.
pub fn sample_observations<F: Scalar>(times: &SampleSet<F>, model: &ObservationModel, seed: u64) -> Result<SampleSet<F>> {
    model.validate()?;
    if let Some(i) = times.values().iter().position(|&t| t < F::zero()) {
        return Err(Error::NegativeTime {
            index: i,
            value: times.values()[i].as_f64(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<F> = times
        .values()
        .iter()
        .map(|&t| {
            let t = t.as_f64();
            let x = match *model {
                ObservationModel::SubordinatedBm => {
                    let z: f64 = rng.sample(StandardNormal);
                    t.sqrt() * z
                }
                ObservationModel::VarianceMean { mu, sigma } => {
                    let z: f64 = rng.sample(StandardNormal);
                    mu * t + sigma * t.sqrt() * z
                }
                ObservationModel::SubordinatedStable { alpha } => t.powf(1.0 / alpha) * symmetric_stable(alpha, &mut rng),
            };
            F::lit(x)
        })
        .collect();
    SampleSet::new(values, seed, format!("{}[{}]", model.tag(), times.model_tag()))
}

/// Chambers–Mallows–Stuck draw with `E e^{iuS} = e^{−|u|^α}`.
fn symmetric_stable(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    let v = std::f64::consts::PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(real(x)).map(|l| l.re).unwrap_or(f64::NAN)
}

/// `K_ν(x)` for real order and `x > 0`, from
/// `∫_0^∞ e^{−x cosh t} cosh(νt) dt`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_k(nu, x)?.exp())
}

/// `log K_ν(x)`; stays finite where `K_ν` itself under- or overflows.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() || !nu.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got K_{nu}({x})")));
    }
    let nu = nu.abs();
    // Integrand e^{νt − x cosh t} peaks at sinh t* = ν/x; factor out its
    // maximum and integrate until it has dropped by e^{−60}.
    let t_star = (nu / x).asinh();
    let peak = nu * t_star - x * t_star.cosh();
    let g = |t: f64| (nu * t - x * t.cosh() - peak).exp() + (-nu * t - x * t.cosh() - peak).exp();
    let mut hi = t_star + 1.0;
    while nu * hi - x * hi.cosh() - peak > -60.0 {
        hi *= 1.5;
    }
    let cfg = QuadConfig::with_tolerances(0.0, 1e-13);
    let (v, _) = adaptive(|t: f64| 0.5 * g(t), 0.0, hi, &cfg)?;
    Ok(v.ln() + peak)
}

/// Generalized inverse Gaussian density
/// `(ϰ/δ)^λ/(2K_λ(δϰ)) v^{λ−1} exp(−(ϰ² v + δ²/v)/2)`, with the Gamma and
/// inverse-Gamma limits at `δ = 0` and `ϰ = 0`.
pub fn gig_density(lambda: f64, kappa: f64, delta: f64, v: f64) -> f64 {
    if !(v > 0.0) {
        return 0.0;
    }
    let log_norm = gig_log_norm(lambda, kappa, delta);
    (log_norm + (lambda - 1.0) * v.ln() - 0.5 * (kappa * kappa * v + delta * delta / v)).exp()
}

fn gig_log_norm(lambda: f64, kappa: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        lambda * (kappa * kappa / 2.0).ln() - ln_gamma_real(lambda)
    } else if kappa == 0.0 {
        -lambda * (delta * delta / 2.0).ln() - ln_gamma_real(-lambda)
    } else {
        lambda * (kappa / delta).ln() - 2f64.ln() - ln_bessel_k(lambda, delta * kappa).unwrap_or(f64::NAN)
    }
}

/// Acceptance rate below which the envelope samplers hand over to the
/// ratio-of-uniforms sampler.
const MIN_ENVELOPE_ACCEPTANCE: f64 = 0.2;

enum GigMethod {
    /// Exact Gamma(shape, rate).
    Gamma { shape: f64, rate: f64 },
    /// Exact inverse of Gamma(shape, rate).
    InverseGamma { shape: f64, rate: f64 },
    /// Gamma proposal accepted with probability `e^{−δ²/(2V)}`.
    GammaEnvelope { shape: f64, rate: f64, d2: f64 },
    /// Inverse-Gamma proposal accepted with probability `e^{−ϰ²V/2}`.
    InverseGammaEnvelope { shape: f64, rate: f64, k2: f64 },
    /// Ratio of uniforms with mode shift for the log-concave law of `log V`.
    RatioOfUniforms(LogGigRou),
}

struct GigSampler {
    method: GigMethod,
}

impl GigSampler {
    fn new(lambda: f64, kappa: f64, delta: f64) -> Result<Self> {
        TimeDistribution::Gig { lambda, kappa, delta }.validate()?;
        let (k2, d2) = (kappa * kappa, delta * delta);
        let method = if delta == 0.0 {
            GigMethod::Gamma { shape: lambda, rate: k2 / 2.0 }
        } else if kappa == 0.0 {
            GigMethod::InverseGamma { shape: -lambda, rate: d2 / 2.0 }
        } else {
            // Acceptance of either envelope: 2 K_λ(δϰ) (δϰ/2)^{|λ|} / Γ(|λ|).
            let acceptance = if lambda != 0.0 {
                let l = lambda.abs();
                (2f64.ln() + ln_bessel_k(lambda, delta * kappa)? + l * (delta * kappa / 2.0).ln() - ln_gamma_real(l)).exp()
            } else {
                0.0
            };
            if acceptance >= MIN_ENVELOPE_ACCEPTANCE {
                log::debug!("gig envelope acceptance rate {acceptance:.3}");
                if lambda > 0.0 {
                    GigMethod::GammaEnvelope { shape: lambda, rate: k2 / 2.0, d2 }
                } else {
                    GigMethod::InverseGammaEnvelope { shape: -lambda, rate: d2 / 2.0, k2 }
                }
            } else {
                log::debug!("gig envelope acceptance {acceptance:.3} too low, using ratio of uniforms");
                GigMethod::RatioOfUniforms(LogGigRou::new(lambda, kappa, delta))
            }
        };
        Ok(GigSampler { method })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match &self.method {
            GigMethod::Gamma { shape, rate } => gamma_draw(*shape, *rate, rng),
            GigMethod::InverseGamma { shape, rate } => 1.0 / gamma_draw(*shape, *rate, rng),
            GigMethod::GammaEnvelope { shape, rate, d2 } => loop {
                let v = gamma_draw(*shape, *rate, rng);
                if rng.random::<f64>() < (-d2 / (2.0 * v)).exp() {
                    return v;
                }
            },
            GigMethod::InverseGammaEnvelope { shape, rate, k2 } => loop {
                let v = 1.0 / gamma_draw(*shape, *rate, rng);
                if rng.random::<f64>() < (-k2 * v / 2.0).exp() {
                    return v;
                }
            },
            GigMethod::RatioOfUniforms(r) => r.sample(rng),
        }
    }
}

fn gamma_draw(shape: f64, rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    // Parameters were validated when the sampler was built.
    Gamma::new(shape, 1.0 / rate).map(|g| g.sample(rng)).unwrap_or(f64::NAN)
}

/// Ratio of uniforms for `Y = log V`, whose log-density
/// `ℓ(y) = λy − (ϰ² e^y + δ² e^{−y})/2` is strictly concave.
struct LogGigRou {
    lambda: f64,
    a: f64,
    b: f64,
    mode: f64,
    ell_mode: f64,
    u_lo: f64,
    u_hi: f64,
}

impl LogGigRou {
    fn new(lambda: f64, kappa: f64, delta: f64) -> Self {
        let (a, b) = (kappa * kappa / 2.0, delta * delta / 2.0);
        // ℓ'(y) = λ − a e^y + b e^{−y} = 0.
        let e = (lambda + (lambda * lambda + 4.0 * a * b).sqrt()) / (2.0 * a);
        let mode = e.ln();
        let mut r = LogGigRou {
            lambda,
            a,
            b,
            mode,
            ell_mode: 0.0,
            u_lo: 0.0,
            u_hi: 0.0,
        };
        r.ell_mode = r.ell(mode);
        // Extremes of (y − m) e^{(ℓ(y)−ℓ(m))/2} solve 1 + (y − m)ℓ'(y)/2 = 0.
        let side = |r: &LogGigRou, dir: f64| {
            let h = |y: f64| 1.0 + (y - r.mode) * r.ell_prime(y) / 2.0;
            let mut step = 1.0;
            while h(r.mode + dir * step) > 0.0 {
                step *= 2.0;
            }
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(r.mode + dir * mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let y = r.mode + dir * 0.5 * (lo + hi);
            (y - r.mode) * ((r.ell(y) - r.ell_mode) / 2.0).exp()
        };
        r.u_lo = side(&r, -1.0);
        r.u_hi = side(&r, 1.0);
        r
    }

    fn ell(&self, y: f64) -> f64 {
        self.lambda * y - self.a * y.exp() - self.b * (-y).exp()
    }

    fn ell_prime(&self, y: f64) -> f64 {
        self.lambda - self.a * y.exp() + self.b * (-y).exp()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u == 0.0 {
                continue;
            }
            let w = self.u_lo + (self.u_hi - self.u_lo) * rng.random::<f64>();
            let y = self.mode + w / u;
            if 2.0 * u.ln() <= self.ell(y) - self.ell_mode {
                return y.exp();
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SampleHeader {
    kind: String,
    params: serde_json::Value,
    seed: u64,
}

/// Writes `# <json header>` followed by a `value` column.
pub fn write_samples<F: Scalar>(samples: &SampleSet<F>, params: serde_json::Value, path: &Path) -> Result<()> {
    let header = SampleHeader {
        kind: samples.model_tag().to_string(),
        params,
        seed: samples.seed(),
    };
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(&serde_json::to_string(&header)?);
    out.push_str("\nvalue\n");
    for v in samples.values() {
        out.push_str(&format!("{}\n", v.as_f64()));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a file produced by [`write_samples`] (or a bare one-column CSV).
pub fn read_samples<F: Scalar>(path: &Path) -> Result<SampleSet<F>> {
    let body = fs::read_to_string(path)?;
    let mut seed = 0;
    let mut tag = path.display().to_string();
    let mut values = Vec::new();
    for (k, line) in body.lines().enumerate() {
        let line = line.trim();
        if let Some(h) = line.strip_prefix('#') {
            let header: SampleHeader = serde_json::from_str(h.trim())?;
            seed = header.seed;
            tag = header.kind;
            continue;
        }
        if line.is_empty() || line == "value" || line == "x" {
            continue;
        }
        let first = line.split(',').next().unwrap_or("");
        let v: f64 = first
            .trim()
            .parse()
            .map_err(|_| Error::Param(format!("{}: line {} is not a number", path.display(), k + 1)))?;
        values.push(F::lit(v));
    }
    SampleSet::new(values, seed, tag)
}
