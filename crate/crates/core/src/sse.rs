//! Density of a random time `T` from samples of `X = W_T`.
//!
//! For a Brownian motion `W` independent of `T`, `|X|` has Mellin transform
//! `E|W_1|^{z−1} M[p_T]((z+1)/2)`. Solving for `M[p_T]` and inverting along
//! `Re z = γ` with the spectral cutoff `|v| <= 1/h` gives
//!
//! ```text
//! p_{T,n}(x) = (1/√π) ∫_{−1/h}^{1/h} x^{−z} M_n(2z−1) / (2^z Γ(z−1/2)) dv,   z = γ + iv,
//! ```
//!
//! where `M_n` is the empirical Mellin transform of `|X_1|, …, |X_n|`. The
//! kernel is the indicator of `[−1, 1]`; `γ > 3/4` keeps `Re(2z−1) > 1/2` so
//! the empirical transform has finite variance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{check_grid, DensityEstimate, EstimatorConfig};
use crate::mellin::{line_nodes, real_after_symmetry_check, EmpiricalMellin, MellinFunction, SmoothnessMode};
use crate::sample::SampleSet;
use crate::scalar::{cx, Cx, Scalar};
use crate::special::ln_gamma;

/// Settings of the Mellin-route estimator. Stored in double precision; the
/// estimator converts to its own scalar type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SseConfig {
    /// Inversion line `γ`, must exceed 3/4.
    pub gamma_line: f64,
    /// Smoothness index `β` of the target class.
    pub beta: f64,
    pub smoothness_mode: SmoothnessMode,
    /// Constant `c` in front of the bandwidth rule.
    pub bandwidth_multiplier: f64,
    /// Sample size the bandwidth is tuned for.
    pub n: usize,
    /// Replace negative estimates by zero.
    #[serde(default)]
    pub clip_nonnegative: bool,
}

impl SseConfig {
    pub fn new(gamma_line: f64, beta: f64, smoothness_mode: SmoothnessMode, n: usize) -> Self {
        SseConfig {
            gamma_line,
            beta,
            smoothness_mode,
            bandwidth_multiplier: 1.0,
            n,
            clip_nonnegative: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_line > 0.75) || !self.gamma_line.is_finite() {
            return Err(Error::Domain(format!(
                "gamma_line must exceed 3/4, got {}",
                self.gamma_line
            )));
        }
        if !(self.beta > 0.0) || !(self.bandwidth_multiplier > 0.0) {
            return Err(Error::Domain("beta and bandwidth_multiplier must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        Ok(())
    }

    /// Bandwidth from the rate-optimal rule at this configuration.
    pub fn bandwidth<F: Scalar>(&self) -> Result<F> {
        bandwidth(
            self.n,
            F::lit(self.beta),
            F::lit(self.gamma_line),
            self.smoothness_mode,
            F::lit(self.bandwidth_multiplier),
        )
    }
}

/// Rate-optimal spectral bandwidth.
///
/// Class C: `c(π+2β)/(log n − 2(1−γ) log log n)` for `γ < 1`, else
/// `c(π+2β)/log n`. Class D: `cπ/(log n − 2(β+1−γ) log log n)` for `γ < 1`,
/// else `cπ/(log n − 2β log log n)`.
pub fn bandwidth<F: Scalar>(n: usize, beta: F, gamma_line: F, mode: SmoothnessMode, multiplier: F) -> Result<F> {
    if n < 3 {
        return Err(Error::Domain(format!("bandwidth needs n >= 3, got {n}")));
    }
    if !(beta > F::zero()) || !(multiplier > F::zero()) {
        return Err(Error::Domain("beta and multiplier must be positive".into()));
    }
    let ln = F::of_usize(n).ln();
    let lnln = ln.ln();
    let two = F::lit(2.0);
    let below_one = gamma_line < F::one();
    let (num, den) = match mode {
        SmoothnessMode::C => {
            let den = if below_one {
                ln - two * (F::one() - gamma_line) * lnln
            } else {
                ln
            };
            (F::PI() + two * beta, den)
        }
        SmoothnessMode::D => {
            let den = if below_one {
                ln - two * (beta + F::one() - gamma_line) * lnln
            } else {
                ln - two * beta * lnln
            };
            (F::PI(), den)
        }
    };
    if !(den > F::zero()) {
        return Err(Error::Domain(format!(
            "bandwidth denominator {den} <= 0: n = {n} too small for beta = {beta}, gamma = {gamma_line}"
        )));
    }
    Ok(multiplier * num / den)
}

/// `ρ_n = n^{−1/2} h^{2(γ−1)} log^{−2}(1/h) e^{π/h}`, the normalization of
/// the pointwise central limit theorem.
pub fn variance_rate_rho<F: Scalar>(n: usize, h: F, gamma_line: F) -> Result<F> {
    if !(h > F::zero() && h < F::one()) {
        return Err(Error::Domain(format!("variance rate needs 0 < h < 1, got {h}")));
    }
    let l = (F::one() / h).ln();
    Ok(F::of_usize(n).powf(F::lit(-0.5))
        * h.powf(F::lit(2.0) * (gamma_line - F::one()))
        / (l * l)
        * (F::PI() / h).exp())
}

/// Quadrature nodes `z_j = γ + i v_j` on `|v| <= 1/h` with the weights
/// `w_j / (√π 2^{z_j} Γ(z_j − 1/2))` folded in.
#[derive(Debug, Clone)]
pub struct SseKernel<F> {
    gamma_line: F,
    h: F,
    nodes: Vec<(Cx<F>, Cx<F>)>,
}

impl<F: Scalar> SseKernel<F> {
    pub fn new(gamma_line: F, h: F) -> Result<Self> {
        if !(h > F::zero()) {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        if !(gamma_line > F::lit(0.75)) {
            return Err(Error::Domain(format!("gamma_line must exceed 3/4, got {gamma_line}")));
        }
        let cutoff = F::one() / h;
        let half = F::lit(0.5);
        let ln2 = F::lit(2.0).ln();
        let log_sqrt_pi = half * F::PI().ln();
        let mut nodes = Vec::new();
        if cutoff.is_finite() && cutoff > F::zero() {
            for (v, w) in line_nodes(cutoff) {
                let z = cx(gamma_line, v);
                let log_den = z * ln2 + ln_gamma(z - half)? + log_sqrt_pi;
                nodes.push((z, (-log_den).exp() * w));
            }
        }
        Ok(SseKernel { gamma_line, h, nodes })
    }

    pub fn bandwidth(&self) -> F {
        self.h
    }

    pub fn gamma_line(&self) -> F {
        self.gamma_line
    }

    /// Number of nodes on the inversion line.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Arguments `2z_j − 1` at which the transform of `|X|` is needed.
    pub fn mellin_arguments(&self) -> impl Iterator<Item = Cx<F>> + '_ {
        let two = F::lit(2.0);
        self.nodes.iter().map(move |(z, _)| *z * two - F::one())
    }

    /// Folds transform values at [`SseKernel::mellin_arguments`] into
    /// per-node coefficients.
    fn coefficients(&self, transform: &[Cx<F>]) -> Vec<(Cx<F>, Cx<F>)> {
        self.nodes.iter().zip(transform).map(|(&(z, k), &m)| (z, k * m)).collect()
    }

    /// Evaluates `Σ_j c_j x^{−z_j}` on the grid.
    fn invert(&self, coeffs: &[(Cx<F>, Cx<F>)], x_grid: &[F]) -> Result<Vec<F>> {
        let tol = F::tol(1e-8, 256.0);
        x_grid
            .iter()
            .map(|&x| {
                let lx = x.ln();
                let mut acc = Cx::new(F::zero(), F::zero());
                let mut modulus = F::zero();
                for &(z, c) in coeffs {
                    let term = c * (-z * lx).exp();
                    acc += term;
                    modulus += term.norm();
                }
                real_after_symmetry_check(acc, modulus, tol, "spectral cutoff inversion")
            })
            .collect()
    }

    /// `Z_{n,k}` for one observation: the estimator applied to a single
    /// sample.
    pub fn z_term(&self, sample_value: F, x: F) -> Result<F> {
        if !(x > F::zero()) {
            return Err(Error::Domain(format!("evaluation point {x} must be positive")));
        }
        let set = SampleSet::new(vec![sample_value], 0, "single")?;
        let emp = EmpiricalMellin::new(&set);
        let m: Vec<Cx<F>> = self.mellin_arguments().map(|s| emp.eval(s)).collect::<Result<_>>()?;
        Ok(self.invert(&self.coefficients(&m), &[x])?[0])
    }
}

fn finish<F: Scalar>(
    mut values: Vec<F>,
    x_grid: &[F],
    config: &SseConfig,
    h: F,
    plug_in: bool,
) -> DensityEstimate<F> {
    if config.clip_nonnegative {
        for v in &mut values {
            *v = v.max(F::zero());
        }
    }
    let mut params = BTreeMap::new();
    params.insert("h".to_string(), h.as_f64());
    params.insert("cutoff".to_string(), (F::one() / h).as_f64());
    if plug_in {
        params.insert("plug_in".to_string(), 1.0);
    }
    DensityEstimate {
        x_grid: x_grid.to_vec(),
        values,
        config: EstimatorConfig::Sse(config.clone()),
        params,
    }
}

/// Spectral-cutoff estimate of `p_T` from observations of `W_T`.
pub fn estimate_sse<F: Scalar>(
    samples: &SampleSet<F>,
    config: &SseConfig,
    h: F,
    x_grid: &[F],
) -> Result<DensityEstimate<F>> {
    config.validate()?;
    check_grid(x_grid)?;
    let kernel = SseKernel::new(F::lit(config.gamma_line), h)?;
    let emp = EmpiricalMellin::new(samples);
    let m: Vec<Cx<F>> = kernel.mellin_arguments().map(|s| emp.eval(s)).collect::<Result<_>>()?;
    let values = kernel.invert(&kernel.coefficients(&m), x_grid)?;
    Ok(finish(values, x_grid, config, h, false))
}

/// Same estimator with the exact transform of `|X|` in place of the
/// empirical one: isolates the regularization bias.
pub fn estimate_sse_plugin<F: Scalar>(
    abs_transform: &MellinFunction<F>,
    config: &SseConfig,
    h: F,
    x_grid: &[F],
) -> Result<DensityEstimate<F>> {
    config.validate()?;
    check_grid(x_grid)?;
    let kernel = SseKernel::new(F::lit(config.gamma_line), h)?;
    let m: Vec<Cx<F>> = kernel
        .mellin_arguments()
        .map(|s| abs_transform.evaluate(s))
        .collect::<Result<_>>()?;
    let values = kernel.invert(&kernel.coefficients(&m), x_grid)?;
    Ok(finish(values, x_grid, config, h, true))
}

/// `Z_{n,k}` at `x` for one observation.
pub fn z_term<F: Scalar>(sample_value: F, config: &SseConfig, h: F, x: F) -> Result<F> {
    config.validate()?;
    SseKernel::new(F::lit(config.gamma_line), h)?.z_term(sample_value, x)
}
