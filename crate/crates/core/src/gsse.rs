//! Density of a random time `T` from samples of a Lévy process stopped at
//! `T`.
//!
//! With `ψ` the characteristic exponent of `L` (`E e^{iuL_t} = e^{−tψ(u)}`),
//! the characteristic function of `X = L_T` is the Laplace transform of `p_T`
//! along the curve `ψ(λ)`, `λ > 0`. Rotating `∫_0^∞ e^{−s ψ} s^{−z} ds` onto
//! that curve yields
//!
//! ```text
//! M[p_T](z) Γ(1−z) = ∫_0^∞ ψ(λ)^{−z} φ_X(λ) ψ'(λ) dλ,   0 < Re z < 1,
//! ```
//!
//! provided `Re ψ → ∞` and `|Im ψ|/Re ψ` stays bounded. The estimator
//! replaces `φ_X` by the empirical characteristic function, truncates at
//! `λ <= A_n`, and inverts along `Re z = γ` with `|v| <= U_n`.
//!
//! All `λ`-integrals share one node set per estimate. The singular start at
//! `λ = 0` is removed analytically: `∫_0^A ψ^{−z} ψ' dλ = ψ(A)^{1−z}/(1−z)`,
//! so only `ψ^{−z} ψ' (φ − 1)` is integrated numerically, on panels graded
//! geometrically into the origin.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{check_grid, DensityEstimate, EstimatorConfig};
use crate::mellin::{line_nodes, SmoothnessMode};
use crate::quad::{composite_nodes, graded_nodes, GaussLegendre, QuadConfig};
use crate::sample::SampleSet;
use crate::scalar::{cx, is_finite_cx, real, Cx, Scalar};
use crate::special::{kummer_1f1, ln_gamma, recip_gamma};

/// Gauss–Legendre order of each `λ` panel.
const LAMBDA_ORDER: usize = 8;
/// Number of halvings used to grade the first panel into the origin.
const GRADING_LEVELS: usize = 60;

/// A point mass `weight · δ_location` of the Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub location: f64,
    pub weight: f64,
}

/// Characteristic-exponent presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevyModel {
    /// `ψ(u) = −iμu + σ²u²/2`.
    BrownianDrift { mu: f64, sigma: f64 },
    /// `ψ(u) = |u|^α`.
    Stable { alpha: f64 },
    /// Lévy–Khintchine with a finite discrete jump measure:
    /// `ψ(u) = −iμu + σ²u²/2 + Σ_j w_j (1 − e^{iux_j} + iux_j 1{|x_j| <= 1})`.
    Triplet { mu: f64, sigma2: f64, jumps: Vec<Jump> },
}

impl LevyModel {
    pub fn brownian_drift(mu: f64, sigma: f64) -> Result<Self> {
        let m = LevyModel::BrownianDrift { mu, sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn stable(alpha: f64) -> Result<Self> {
        let m = LevyModel::Stable { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn triplet(mu: f64, sigma2: f64, jumps: Vec<Jump>) -> Result<Self> {
        let m = LevyModel::Triplet { mu, sigma2, jumps };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyModel::BrownianDrift { mu, sigma } => {
                if !mu.is_finite() || !(*sigma >= 0.0) || !sigma.is_finite() {
                    return Err(Error::Model(format!("brownian_drift(mu={mu}, sigma={sigma})")));
                }
            }
            LevyModel::Stable { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(Error::Model(format!("stable index {alpha} outside (0, 2]")));
                }
            }
            LevyModel::Triplet { mu, sigma2, jumps } => {
                if !mu.is_finite() || !(*sigma2 >= 0.0) || !sigma2.is_finite() {
                    return Err(Error::Model(format!("triplet drift {mu} / variance {sigma2}")));
                }
                for (j, jump) in jumps.iter().enumerate() {
                    if !(jump.weight > 0.0) || !jump.weight.is_finite() {
                        return Err(Error::Model(format!("jump {j}: weight {} must be positive", jump.weight)));
                    }
                    if jump.location == 0.0 || !jump.location.is_finite() {
                        return Err(Error::Model(format!(
                            "jump {j}: location {} must be finite and nonzero",
                            jump.location
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ψ(u)`.
    pub fn psi<F: Scalar>(&self, u: F) -> Cx<F> {
        match self {
            LevyModel::BrownianDrift { mu, sigma } => {
                let s = F::lit(*sigma);
                cx(s * s * u * u * F::lit(0.5), -F::lit(*mu) * u)
            }
            LevyModel::Stable { alpha } => real(u.abs().powf(F::lit(*alpha))),
            LevyModel::Triplet { mu, sigma2, jumps } => {
                let mut v = cx(F::lit(*sigma2) * u * u * F::lit(0.5), -F::lit(*mu) * u);
                for jump in jumps {
                    let x = F::lit(jump.location);
                    let w = F::lit(jump.weight);
                    let (s, c) = (u * x).sin_cos();
                    let small = if x.abs() <= F::one() { u * x } else { F::zero() };
                    v += cx(F::one() - c, small - s) * w;
                }
                v
            }
        }
    }

    /// `ψ'(u)`.
    pub fn psi_prime<F: Scalar>(&self, u: F) -> Cx<F> {
        match self {
            LevyModel::BrownianDrift { mu, sigma } => {
                let s = F::lit(*sigma);
                cx(s * s * u, -F::lit(*mu))
            }
            LevyModel::Stable { alpha } => {
                let a = F::lit(*alpha);
                if u == F::zero() {
                    return real(if a > F::one() { F::zero() } else { F::infinity() });
                }
                real(a * u.abs().powf(a - F::one()) * u.signum())
            }
            LevyModel::Triplet { mu, sigma2, jumps } => {
                let mut v = cx(F::lit(*sigma2) * u, -F::lit(*mu));
                for jump in jumps {
                    let x = F::lit(jump.location);
                    let w = F::lit(jump.weight);
                    let (s, c) = (u * x).sin_cos();
                    let small = if x.abs() <= F::one() { F::one() } else { F::zero() };
                    // −i w x (e^{iux} − 1{|x| <= 1})
                    v += cx(s, small - c) * (w * x);
                }
                v
            }
        }
    }

    /// The drift term `d = μ − Σ_{|x_j| <= 1} w_j x_j` of a triplet (zero
    /// for the other presets unless they carry `μ`).
    pub fn effective_drift(&self) -> f64 {
        match self {
            LevyModel::BrownianDrift { mu, .. } => *mu,
            LevyModel::Stable { .. } => 0.0,
            LevyModel::Triplet { mu, jumps, .. } => {
                mu - jumps
                    .iter()
                    .filter(|j| j.location.abs() <= 1.0)
                    .map(|j| j.weight * j.location)
                    .sum::<f64>()
            }
        }
    }
}

/// `ψ(u)`.
pub fn char_exponent<F: Scalar>(model: &LevyModel, u: F) -> Result<Cx<F>> {
    model.validate()?;
    Ok(model.psi(u))
}

/// Diagnostics for the contour-rotation conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    /// `max |Im ψ|/Re ψ` over grid points with `Re ψ > 0`.
    pub a_hat: f64,
    /// Grid point where `a_hat` is attained.
    pub a_hat_at: f64,
    /// Number of grid points with `Re ψ = 0`.
    pub zero_re_points: usize,
    /// `Re ψ` at the last grid point exceeds 10× its value at the median.
    pub re_divergent: bool,
    /// Either of the two conditions fails on this grid.
    pub condition_violated: bool,
}

/// Checks `Re ψ → ∞` and `|Im ψ|/Re ψ < A` on an increasing grid.
pub fn contour_condition_check<F: Scalar>(model: &LevyModel, u_grid: &[F]) -> Result<ContourReport> {
    model.validate()?;
    if u_grid.len() < 3 || u_grid.windows(2).any(|w| !(w[1] > w[0])) || !(u_grid[0] > F::zero()) {
        return Err(Error::Domain("grid must be positive, strictly increasing, at least 3 points".into()));
    }
    let mut a_hat = 0.0f64;
    let mut a_hat_at = u_grid[0].as_f64();
    let mut zero_re = 0;
    for &u in u_grid {
        let p = model.psi(u);
        if p.re <= F::zero() {
            zero_re += 1;
            continue;
        }
        let r = (p.im.abs() / p.re).as_f64();
        if r > a_hat {
            a_hat = r;
            a_hat_at = u.as_f64();
        }
    }
    let last = model.psi(u_grid[u_grid.len() - 1]).re;
    let mid = model.psi(u_grid[u_grid.len() / 2]).re;
    let re_divergent = last > F::zero() && last > F::lit(10.0) * mid.max(F::zero());
    Ok(ContourReport {
        a_hat,
        a_hat_at,
        zero_re_points: zero_re,
        re_divergent,
        condition_violated: zero_re > 0 || !re_divergent,
    })
}

/// Settings of the Lévy-route estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsseConfig {
    /// Inversion line `γ ∈ (1/2, 1)`.
    pub gamma_line: f64,
    pub beta: f64,
    /// Moment-condition exponent `ε`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub smoothness_mode: SmoothnessMode,
    #[serde(default = "one")]
    pub a_multiplier: f64,
    #[serde(default = "one")]
    pub u_multiplier: f64,
    pub n: usize,
}

fn default_epsilon() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

impl GsseConfig {
    pub fn new(gamma_line: f64, beta: f64, smoothness_mode: SmoothnessMode, n: usize) -> Self {
        GsseConfig {
            gamma_line,
            beta,
            epsilon: default_epsilon(),
            smoothness_mode,
            a_multiplier: 1.0,
            u_multiplier: 1.0,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_line > 0.5 && self.gamma_line < 1.0) {
            return Err(Error::Domain(format!("gamma_line must lie in (1/2, 1), got {}", self.gamma_line)));
        }
        if !(self.epsilon > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Domain("epsilon and beta must be positive".into()));
        }
        if !(self.a_multiplier > 0.0) || !(self.u_multiplier > 0.0) {
            return Err(Error::Domain("cutoff multipliers must be positive".into()));
        }
        if self.n < 3 {
            return Err(Error::Domain("n must be at least 3".into()));
        }
        Ok(())
    }
}

/// Cutoffs `(A_n, U_n)`.
///
/// `A_n = a n^{1/(4(1−γ)+2ε)}`. Class C:
/// `U_n = u[ε log n/((2−2γ+ε)(2β+π)) − (2γ−1) log log n/(2β+π)]`; class D:
/// `U_n = u[ε log n/(π(2−2γ+ε)) − (2β+2γ−1) log log n/π]`.
pub fn cutoffs(config: &GsseConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let (g, b, e) = (config.gamma_line, config.beta, config.epsilon);
    let ln = (config.n as f64).ln();
    let lnln = ln.ln();
    let pi = std::f64::consts::PI;
    let a_n = config.a_multiplier * (config.n as f64).powf(1.0 / (4.0 * (1.0 - g) + 2.0 * e));
    let u_n = config.u_multiplier
        * match config.smoothness_mode {
            SmoothnessMode::C => e / ((2.0 - 2.0 * g + e) * (2.0 * b + pi)) * ln - (2.0 * g - 1.0) / (2.0 * b + pi) * lnln,
            SmoothnessMode::D => e / (pi * (2.0 - 2.0 * g + e)) * ln - (2.0 * b + 2.0 * g - 1.0) / pi * lnln,
        };
    if !(u_n > 0.0) {
        return Err(Error::Domain(format!("U_n = {u_n} <= 0 at n = {}", config.n)));
    }
    Ok((a_n, u_n))
}

/// `ψ`, `Log ψ` and `ψ'` tabulated on a quadrature rule for `(0, A]`.
#[derive(Debug, Clone)]
pub struct LambdaGrid<F> {
    pub lambda: Vec<F>,
    pub weight: Vec<F>,
    pub psi: Vec<Cx<F>>,
    pub log_psi: Vec<Cx<F>>,
    pub dpsi: Vec<Cx<F>>,
    pub a: F,
    pub log_psi_a: Cx<F>,
}

impl<F: Scalar> LambdaGrid<F> {
    /// Panels of width `min(π/(4(1+x_scale)), 1/2)` on `[λ_0, A]` and a
    /// geometrically graded first panel `[0, λ_0]`.
    pub fn new(model: &LevyModel, a: F, x_scale: F) -> Result<Self> {
        if !(a > F::zero()) || !a.is_finite() {
            return Err(Error::Domain(format!("A_n must be positive, got {a}")));
        }
        let width = (F::PI() / (F::lit(4.0) * (F::one() + x_scale.abs()))).min(F::lit(0.5));
        let rule = GaussLegendre::new(LAMBDA_ORDER);
        let l0 = width.min(a);
        let mut nodes = graded_nodes(&rule, l0, F::lit(0.5), GRADING_LEVELS);
        nodes.extend(composite_nodes(&rule, l0, a, width));
        let mut grid = LambdaGrid {
            lambda: Vec::with_capacity(nodes.len()),
            weight: Vec::with_capacity(nodes.len()),
            psi: Vec::with_capacity(nodes.len()),
            log_psi: Vec::with_capacity(nodes.len()),
            dpsi: Vec::with_capacity(nodes.len()),
            a,
            log_psi_a: checked_log_psi(model, a)?,
        };
        for (l, w) in nodes {
            let p = model.psi(l);
            let lp = checked_log_psi(model, l)?;
            grid.lambda.push(l);
            grid.weight.push(w);
            grid.psi.push(p);
            grid.log_psi.push(lp);
            grid.dpsi.push(model.psi_prime(l));
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// `∫_0^A ψ^{s−1} g(λ) ψ' dλ + ψ(A)^s/s` with `g = φ − 1` supplied on the
    /// nodes; equals `∫_0^A ψ^{s−1} φ ψ' dλ`.
    fn contour_integral(&self, s: Cx<F>, g: &[Cx<F>]) -> Cx<F> {
        let exact = (self.log_psi_a * s).exp() / s;
        exact + self.partial_integral(s, g)
    }

    /// `∫_0^A ψ^{s−1} g(λ) ψ' dλ` from node values of `g`.
    fn partial_integral(&self, s: Cx<F>, g: &[Cx<F>]) -> Cx<F> {
        let sm1 = s - F::one();
        let mut acc = Cx::new(F::zero(), F::zero());
        for j in 0..self.lambda.len() {
            let t = (self.log_psi[j] * sm1).exp() * self.dpsi[j] * g[j];
            acc += t * self.weight[j];
        }
        acc
    }
}

fn checked_log_psi<F: Scalar>(model: &LevyModel, l: F) -> Result<Cx<F>> {
    let p = model.psi(l);
    if !is_finite_cx(p) || (p.re == F::zero() && p.im == F::zero()) {
        return Err(Error::Branch(format!("psi({l}) = {p} has no logarithm")));
    }
    if p.re < F::zero() && p.im.abs() <= F::epsilon() * p.norm() {
        return Err(Error::Branch(format!("psi({l}) = {p} lies on the negative real axis")));
    }
    if p.re < -F::epsilon() * p.norm() {
        return Err(Error::Branch(format!("Re psi({l}) = {} < 0", p.re)));
    }
    Ok(p.ln())
}

/// `Φ_n(z, x) = ∫_0^A ψ(λ)^{z−1} e^{ixλ} ψ'(λ) dλ` for `0 < Re z < 1`.
///
/// Stable models use the closed form `(A^{αz}/z) 1F1(αz; 1+αz; iAx)`, checked
/// against quadrature when `quad_cfg.verify` is set.
pub fn phi_n<F: Scalar>(model: &LevyModel, z: Cx<F>, x: F, a_n: F, quad_cfg: &QuadConfig<F>) -> Result<Cx<F>> {
    model.validate()?;
    if !(z.re > F::zero() && z.re < F::one()) {
        return Err(Error::Domain(format!("phi_n needs 0 < Re z < 1, got {}", z.re)));
    }
    if let LevyModel::Stable { alpha } = model {
        let alpha = F::lit(*alpha);
        let az = z * alpha;
        let closed = (az * a_n.ln()).exp() / z * kummer_1f1(az, az + F::one(), cx(F::zero(), a_n * x))?;
        if quad_cfg.verify {
            let q = phi_n_quadrature(model, z, x, a_n)?;
            let tol = F::tol(1e-6, 1024.0);
            if (q - closed).norm() > tol * closed.norm().max(F::one()) {
                return Err(Error::Quadrature(format!(
                    "stable closed form {closed} disagrees with quadrature {q}"
                )));
            }
        }
        return Ok(closed);
    }
    phi_n_quadrature(model, z, x, a_n)
}

fn phi_n_quadrature<F: Scalar>(model: &LevyModel, z: Cx<F>, x: F, a_n: F) -> Result<Cx<F>> {
    let grid = LambdaGrid::new(model, a_n, x)?;
    let g: Vec<Cx<F>> = grid
        .lambda
        .iter()
        .map(|&l| {
            let (s, c) = (x * l).sin_cos();
            cx(c - F::one(), s)
        })
        .collect();
    Ok(grid.contour_integral(z, &g))
}

/// `∫_0^A ψ^{−z} φ(λ) ψ' dλ` for an analytic characteristic function `φ`.
/// As `A → ∞` this tends to `M[p_T](z) Γ(1−z)`.
pub fn contour_transform<F: Scalar>(
    model: &LevyModel,
    cf: impl Fn(F) -> Cx<F>,
    z: Cx<F>,
    a_n: F,
) -> Result<Cx<F>> {
    model.validate()?;
    let grid = LambdaGrid::new(model, a_n, F::zero())?;
    let g: Vec<Cx<F>> = grid.lambda.iter().map(|&l| cf(l) - F::one()).collect();
    Ok(grid.contour_integral(real(F::one()) - z, &g))
}

/// Characteristic-function input of the estimator.
pub enum CfSource<'a, F> {
    /// Empirical characteristic function of observed `X_k`.
    Samples(&'a SampleSet<F>),
    /// Exact characteristic function together with `E[X]`.
    Exact {
        cf: &'a (dyn Fn(F) -> Cx<F> + Sync),
        mean: F,
        x_scale: F,
    },
}

/// Estimate with the cutoffs of [`cutoffs`].
pub fn estimate_gsse<F: Scalar>(
    samples: &SampleSet<F>,
    model: &LevyModel,
    config: &GsseConfig,
    x_grid: &[F],
    variance_reduction: bool,
) -> Result<DensityEstimate<F>> {
    let (a_n, u_n) = cutoffs(config)?;
    estimate_gsse_with_cutoffs(
        CfSource::Samples(samples),
        model,
        config,
        F::lit(a_n),
        F::lit(u_n),
        x_grid,
        variance_reduction,
    )
}

/// Estimate with explicit cutoffs `A` and `U`.
pub fn estimate_gsse_with_cutoffs<F: Scalar>(
    source: CfSource<'_, F>,
    model: &LevyModel,
    config: &GsseConfig,
    a_n: F,
    u_n: F,
    x_grid: &[F],
    variance_reduction: bool,
) -> Result<DensityEstimate<F>> {
    model.validate()?;
    config.validate()?;
    check_grid(x_grid)?;
    if !(u_n >= F::zero()) {
        return Err(Error::Domain(format!("U_n must be nonnegative, got {u_n}")));
    }
    let gamma = F::lit(config.gamma_line);
    let (x_scale, mean) = match &source {
        CfSource::Samples(s) => (
            s.values().iter().fold(F::zero(), |m, v| m.max(v.abs())),
            s.mean(),
        ),
        CfSource::Exact { mean, x_scale, .. } => (*x_scale, *mean),
    };
    if variance_reduction && !(mean > F::zero()) {
        return Err(Error::Config(format!(
            "variance reduction needs a positive sample mean, got {mean}"
        )));
    }
    let mut params = BTreeMap::new();
    params.insert("A_n".to_string(), a_n.as_f64());
    params.insert("U_n".to_string(), u_n.as_f64());

    let v_nodes = line_nodes(u_n);
    if v_nodes.is_empty() || u_n == F::zero() {
        return Ok(DensityEstimate {
            x_grid: x_grid.to_vec(),
            values: vec![F::zero(); x_grid.len()],
            config: EstimatorConfig::Gsse(config.clone()),
            params,
        });
    }

    let grid = LambdaGrid::new(model, a_n, x_scale)?;
    let phi: Vec<Cx<F>> = match &source {
        CfSource::Samples(s) => empirical_cf(s.values(), &grid.lambda),
        CfSource::Exact { cf, .. } => grid.lambda.iter().map(|&l| cf(l)).collect(),
    };
    let g: Vec<Cx<F>> = if variance_reduction {
        phi.iter()
            .zip(&grid.psi)
            .map(|(&p, &s)| p - (-s * mean).exp())
            .collect()
    } else {
        phi.iter().map(|&p| p - F::one()).collect()
    };
    if variance_reduction {
        params.insert("m_n".to_string(), mean.as_f64());
        let bound = mean.powf(gamma - F::one()) * (-mean * a_n * a_n * F::lit(0.5)).exp();
        params.insert("remainder_bound".to_string(), bound.as_f64());
        log::debug!(
            "decomposition remainder bound m^-(1-gamma) exp(-m A^2/2) = {:e}",
            bound.as_f64()
        );
    }

    // Per-node coefficients c_v = w_v I(v) / (2π Γ(1−z_v)).
    let two_pi = F::lit(2.0) * F::PI();
    let mut coeffs = Vec::with_capacity(v_nodes.len());
    for &(v, w) in &v_nodes {
        let z = cx(gamma, v);
        let s = real(F::one()) - z;
        let inner = if variance_reduction {
            grid.partial_integral(s, &g) + ((z - F::one()) * mean.ln()).exp() * ln_gamma(s)?.exp()
        } else {
            grid.contour_integral(s, &g)
        };
        coeffs.push((z, inner * recip_gamma(s) * (w / two_pi)));
    }

    let mut values = Vec::with_capacity(x_grid.len());
    let mut worst = F::zero();
    for &x in x_grid {
        let lx = x.ln();
        let mut acc = Cx::new(F::zero(), F::zero());
        let mut modulus = F::zero();
        for &(z, c) in &coeffs {
            let t = c * (-z * lx).exp();
            acc += t;
            modulus += t.norm();
        }
        if modulus > F::zero() {
            worst = worst.max(acc.im.abs() / modulus);
        }
        values.push(acc.re);
    }
    params.insert("imag_residue".to_string(), worst.as_f64());
    if let CfSource::Exact { .. } = source {
        // The exact transform is Hermitian, so the residue only measures
        // truncation at A.
        if worst > F::tol(1e-6, 1024.0) {
            return Err(Error::Quadrature(format!("imaginary residue {worst} with exact input")));
        }
    }
    Ok(DensityEstimate {
        x_grid: x_grid.to_vec(),
        values,
        config: EstimatorConfig::Gsse(config.clone()),
        params,
    })
}

/// `(1/n) Σ_k e^{iλX_k}` on each node.
fn empirical_cf<F: Scalar>(xs: &[F], lambda: &[F]) -> Vec<Cx<F>> {
    let n = F::of_usize(xs.len());
    lambda
        .iter()
        .map(|&l| {
            let (mut re, mut im) = (F::zero(), F::zero());
            for &x in xs {
                let (s, c) = (l * x).sin_cos();
                re += c;
                im += s;
            }
            cx(re / n, im / n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn exponent_examples() {
        let bm = LevyModel::brownian_drift(1.0, 1.0).unwrap();
        assert_eq!(bm.psi(2.0f64), Cx::new(2.0, -2.0));
        let st = LevyModel::stable(1.5).unwrap();
        assert!((st.psi(4.0f64).re - 8.0).abs() < 1e-14);
        assert_eq!(st.psi(0.0f64), Cx::new(0.0, 0.0));
        assert!(LevyModel::stable(2.5).is_err());
        assert!(LevyModel::triplet(0.0, 1.0, vec![Jump { location: 0.0, weight: 1.0 }]).is_err());
    }

    #[test]
    fn triplet_derivative_matches_difference_quotient() {
        let m = LevyModel::triplet(
            0.3,
            0.5,
            vec![
                Jump { location: 0.4, weight: 2.0 },
                Jump { location: -3.0, weight: 0.7 },
            ],
        )
        .unwrap();
        for &u in &[0.1f64, 1.0, 7.5] {
            let h = 1e-6;
            let fd = (m.psi(u + h) - m.psi(u - h)) / (2.0 * h);
            assert!((fd - m.psi_prime(u)).norm() < 1e-7, "u={u}");
        }
    }

    #[test]
    fn contour_report_cases() {
        let grid: Vec<f64> = (0..200).map(|k| 0.5 * 1.05f64.powi(k)).collect();
        let bm = LevyModel::brownian_drift(1.0, 1.0).unwrap();
        let r = contour_condition_check(&bm, &grid).unwrap();
        assert!((r.a_hat - 2.0 / 0.5).abs() < 1e-12 && r.a_hat_at == 0.5);
        assert!(r.re_divergent && !r.condition_violated);
        let st = contour_condition_check(&LevyModel::stable(1.2).unwrap(), &grid).unwrap();
        assert_eq!(st.a_hat, 0.0);
        let drift = contour_condition_check(&LevyModel::brownian_drift(1.0, 0.0).unwrap(), &grid).unwrap();
        assert!(!drift.re_divergent && drift.condition_violated);
        assert_eq!(drift.zero_re_points, grid.len());
    }

    #[test]
    fn cutoff_example() {
        let mut c = GsseConfig::new(0.7, std::f64::consts::FRAC_PI_2, SmoothnessMode::C, 10_000);
        c.epsilon = 0.5;
        let (a, u) = cutoffs(&c).unwrap();
        assert!((a - 10f64.powf(4.0 / 2.2)).abs() < 1e-9);
        assert!((a - 65.8).abs() < 0.1);
        assert!(u > 0.0);
    }

    #[test]
    fn phi_n_elementary_cases() {
        let cfg = QuadConfig::default();
        let st = LevyModel::stable(1.0).unwrap();
        let z = Cx::new(0.4, 0.0);
        let v = phi_n(&st, z, 0.0, 20.0, &cfg).unwrap();
        assert!((v.re - 20f64.powf(0.4) / 0.4).abs() < 1e-10 && v.im.abs() < 1e-12);
    }

    #[test]
    fn stable_closed_form_matches_grid_quadrature() {
        let mut cfg = QuadConfig::default();
        cfg.verify = true;
        let st = LevyModel::stable(1.5).unwrap();
        let z = Cx::new(0.3, -0.4);
        let v = phi_n(&st, z, 1.0, 20.0, &cfg).unwrap();
        // Independent oracle: α ∫ λ^{αz−1} e^{iλ} dλ by adaptive Kronrod on
        // λ = t^4 so the algebraic start becomes smooth.
        let a = 1.5;
        let (q, _) = quad::adaptive(
            |t: f64| {
                let l = t.powi(4);
                let f = (Cx::new(a * z.re - 1.0, a * z.im) * l.ln()).exp() * Cx::new(0.0, l).exp();
                f * (a * 4.0 * t.powi(3))
            },
            0.0,
            20f64.powf(0.25),
            &QuadConfig { max_intervals: 20_000, ..cfg },
        )
        .unwrap();
        assert!((v - q).norm() < 1e-6 * q.norm(), "{v} vs {q}");
    }
}
