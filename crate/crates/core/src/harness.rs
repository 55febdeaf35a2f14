//! Monte Carlo experiments: replicated estimation, sup-loss statistics,
//! rate regression and a normality diagnostic.
//!
//! An experiment is a pure function of its [`ExperimentSpec`]. Replication
//! `k` at the `i`-th sample size draws its times with
//! `derive_seed(master, 0, i·2³² + k)` and its observations with stream 1,
//! so results do not depend on thread count or scheduling.
//!
//! Export layout under the target directory:
//!
//! ```text
//! losses.csv          n,replication,sup_loss
//! summary.csv         n,replications,median,q1,q3,whisker_low,whisker_high,min,max
//! curves/rep_<k>.csv  x,true,n_<n1>,n_<n2>,...
//! overlay.svg         true density and the estimates at `overlay_n` (default: largest n)
//! boxplot.svg         sup-loss box per n
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{linear_grid, DensityEstimate};
use crate::gsse::{estimate_gsse, GsseConfig, LevyModel};
use crate::mellin::SmoothnessMode;
use crate::sample::SampleSet;
use crate::simulate::{derive_seed, sample_observations, sample_times, ObservationModel, TimeDistribution};
use crate::sse::{estimate_sse, SseConfig};

/// Estimator used by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Sse,
    Gsse,
    GsseDecomposed,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sse" => Ok(Route::Sse),
            "gsse" => Ok(Route::Gsse),
            "gsse-decomposed" | "gsse_decomposed" => Ok(Route::GsseDecomposed),
            other => Err(Error::Config(format!("unknown route `{other}` (sse|gsse|gsse-decomposed)"))),
        }
    }
}

/// Points on which the sup-loss is taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for LossGrid {
    fn default() -> Self {
        LossGrid {
            x_min: 0.05,
            x_max: 10.0,
            points: 200,
        }
    }
}

impl LossGrid {
    pub fn grid(&self) -> Vec<f64> {
        linear_grid(self.x_min, self.x_max, self.points)
    }
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// Complete description of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub time_distribution: TimeDistribution,
    pub observation: ObservationModel,
    pub route: Route,
    pub gamma_line: f64,
    pub beta: f64,
    pub smoothness_mode: SmoothnessMode,
    /// `ε` of the GSSE cutoff rule.
    #[serde(default = "half")]
    pub epsilon: f64,
    /// Constant in front of the SSE bandwidth rule.
    #[serde(default = "one")]
    pub bandwidth_multiplier: f64,
    #[serde(default = "one")]
    pub a_multiplier: f64,
    #[serde(default = "one")]
    pub u_multiplier: f64,
    /// Lévy model for the GSSE routes; derived from `observation` if absent.
    #[serde(default)]
    pub levy_model: Option<LevyModel>,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub loss_grid: LossGrid,
    /// Sample size whose estimates are drawn in `overlay.svg`; the largest
    /// by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay_n: Option<usize>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.time_distribution.validate()?;
        self.observation.validate()?;
        if self.route == Route::Sse && self.observation != ObservationModel::SubordinatedBm {
            return Err(Error::Config("route sse needs observation subordinated_bm".into()));
        }
        if let Some(m) = &self.levy_model {
            m.validate()?;
        }
        if self.n_list.iter().any(|&n| n < 3) {
            return Err(Error::Config("every n in n_list must be at least 3".into()));
        }
        let g = &self.loss_grid;
        if !(g.x_min > 0.0 && g.x_max > g.x_min && g.points >= 2) {
            return Err(Error::Config("loss_grid needs 0 < x_min < x_max and points >= 2".into()));
        }
        for &n in &self.n_list {
            match self.route {
                Route::Sse => self.sse_config(n).validate()?,
                _ => self.gsse_config(n).validate()?,
            }
        }
        Ok(())
    }

    pub fn sse_config(&self, n: usize) -> SseConfig {
        SseConfig {
            gamma_line: self.gamma_line,
            beta: self.beta,
            smoothness_mode: self.smoothness_mode,
            bandwidth_multiplier: self.bandwidth_multiplier,
            n,
            clip_nonnegative: false,
        }
    }

    pub fn gsse_config(&self, n: usize) -> GsseConfig {
        GsseConfig {
            gamma_line: self.gamma_line,
            beta: self.beta,
            epsilon: self.epsilon,
            smoothness_mode: self.smoothness_mode,
            a_multiplier: self.a_multiplier,
            u_multiplier: self.u_multiplier,
            n,
        }
    }

    /// Lévy exponent matching the observation model.
    pub fn levy(&self) -> Result<LevyModel> {
        if let Some(m) = &self.levy_model {
            return Ok(m.clone());
        }
        match self.observation {
            ObservationModel::SubordinatedBm => LevyModel::brownian_drift(0.0, 1.0),
            ObservationModel::VarianceMean { mu, sigma } => LevyModel::brownian_drift(mu, sigma),
            ObservationModel::SubordinatedStable { alpha } => LevyModel::stable(alpha),
        }
    }

    /// Seeds `(times, observations)` of replication `rep` at the `n_index`-th size.
    pub fn seeds(&self, n_index: usize, rep: usize) -> (u64, u64) {
        let k = ((n_index as u64) << 32) | rep as u64;
        (derive_seed(self.master_seed, 0, k), derive_seed(self.master_seed, 1, k))
    }

    /// Simulated observations for one replication.
    pub fn observations(&self, n_index: usize, n: usize, rep: usize) -> Result<SampleSet<f64>> {
        let (ts, os) = self.seeds(n_index, rep);
        let times = sample_times::<f64>(&self.time_distribution, n, ts)?;
        sample_observations(&times, &self.observation, os)
    }

    /// Runs the configured estimator on one sample.
    pub fn estimate(&self, samples: &SampleSet<f64>, n: usize, grid: &[f64]) -> Result<DensityEstimate<f64>> {
        match self.route {
            Route::Sse => {
                let cfg = self.sse_config(n);
                let h = cfg.bandwidth::<f64>()?;
                estimate_sse(&samples.abs(), &cfg, h, grid)
            }
            Route::Gsse | Route::GsseDecomposed => estimate_gsse(
                samples,
                &self.levy()?,
                &self.gsse_config(n),
                grid,
                self.route == Route::GsseDecomposed,
            ),
        }
    }
}

/// Quartiles with 1.5·IQR whiskers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub min: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data (type 7).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut s = values.to_vec();
        s.sort_by(|a, b| a.total_cmp(b));
        let (q1, median, q3) = (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.5), quantile_sorted(&s, 0.75));
        let iqr = q3 - q1;
        let whisker_low = *s.iter().find(|&&v| v >= q1 - 1.5 * iqr).unwrap_or(&s[0]);
        let whisker_high = *s.iter().rev().find(|&&v| v <= q3 + 1.5 * iqr).unwrap_or(&s[s.len() - 1]);
        Some(BoxStats {
            median,
            q1,
            q3,
            whisker_low,
            whisker_high,
            min: s[0],
            max: s[s.len() - 1],
        })
    }
}

/// Results at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRun {
    pub n: usize,
    pub losses: Vec<f64>,
    pub seeds: Vec<(u64, u64)>,
    /// Estimated density on the loss grid, one row per replication.
    pub curves: Vec<Vec<f64>>,
    pub summary: Option<BoxStats>,
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub x_grid: Vec<f64>,
    pub true_density: Vec<f64>,
    pub runs: Vec<SizeRun>,
    pub runtime_secs: f64,
}

impl ExperimentReport {
    /// `(n, median loss)` for every size with at least one replication.
    pub fn medians(&self) -> Vec<(usize, f64)> {
        self.runs
            .iter()
            .filter_map(|r| r.summary.map(|s| (r.n, s.median)))
            .collect()
    }
}

/// Runs every replication at every sample size.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let start = Instant::now();
    let x_grid = spec.loss_grid.grid();
    let true_density: Vec<f64> = x_grid.iter().map(|&x| spec.time_distribution.density(x)).collect();
    let mut runs = Vec::with_capacity(spec.n_list.len());
    for (i, &n) in spec.n_list.iter().enumerate() {
        let results: Vec<(f64, Vec<f64>)> = (0..spec.replications)
            .into_par_iter()
            .map(|rep| {
                let run = || -> Result<(f64, Vec<f64>)> {
                    let samples = spec.observations(i, n, rep)?;
                    let est = spec.estimate(&samples, n, &x_grid)?;
                    let loss = est
                        .values
                        .iter()
                        .zip(&true_density)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    Ok((loss, est.values))
                };
                run().map_err(|e| e.context(format!("experiment `{}`, n = {n}, replication {rep}", spec.name)))
            })
            .collect::<Result<_>>()?;
        let (losses, curves): (Vec<f64>, Vec<Vec<f64>>) = results.into_iter().unzip();
        log::info!(
            "{}: n = {n}, {} replications, median loss {:?}",
            spec.name,
            losses.len(),
            BoxStats::from_values(&losses).map(|s| s.median)
        );
        runs.push(SizeRun {
            n,
            seeds: (0..spec.replications).map(|k| spec.seeds(i, k)).collect(),
            summary: BoxStats::from_values(&losses),
            losses,
            curves,
        });
    }
    Ok(ExperimentReport {
        spec: spec.clone(),
        x_grid,
        true_density,
        runs,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Least-squares slope with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
}

/// Slope of `log median-loss` against `log n` across all reports.
pub fn rate_regression(reports: &[ExperimentReport]) -> Result<RateFit> {
    let points: Vec<(usize, f64)> = reports.iter().flat_map(|r| r.medians()).collect();
    rate_regression_points(&points)
}

/// Same fit from `(n, median loss)` pairs.
pub fn rate_regression_points(points: &[(usize, f64)]) -> Result<RateFit> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate regression needs at least 3 distinct n, got {}",
            distinct.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Domain(format!("median loss {} at n = {} is not positive", p.1, p.0)));
    }
    let x: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let stderr = if points.len() > 2 {
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(RateFit { slope, stderr })
}

/// Sample moments of standardized replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normality {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub pass: bool,
}

/// Passes iff `|skewness| < 0.5` and `|excess kurtosis| < 1`.
pub fn normality_diagnostic(values: &[f64]) -> Result<Normality> {
    if values.len() < 200 {
        return Err(Error::InsufficientData(format!(
            "normality diagnostic needs at least 200 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return Err(Error::Domain("values have zero variance".into()));
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    Ok(Normality {
        skewness,
        excess_kurtosis,
        pass: skewness.abs() < 0.5 && excess_kurtosis.abs() < 1.0,
    })
}

/// Replicated estimates at a single point `x` with sample size `n`.
pub fn point_replicates(spec: &ExperimentSpec, n: usize, x: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let samples = spec.observations(0, n, rep)?;
            Ok(spec.estimate(&samples, n, &[x])?.values[0])
        })
        .collect()
}

/// Writes the report files; returns their paths.
pub fn export_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("output directory {} does not exist", dir.display()),
        )));
    }
    let mut files = Vec::new();

    let mut losses = String::from("n,replication,sup_loss\n");
    for run in &report.runs {
        for (k, l) in run.losses.iter().enumerate() {
            let _ = writeln!(losses, "{},{},{}", run.n, k, l);
        }
    }
    files.push(write_file(dir.join("losses.csv"), &losses)?);

    let mut summary = String::from("n,replications,median,q1,q3,whisker_low,whisker_high,min,max\n");
    for run in &report.runs {
        if let Some(s) = run.summary {
            let _ = writeln!(
                summary,
                "{},{},{},{},{},{},{},{},{}",
                run.n,
                run.losses.len(),
                s.median,
                s.q1,
                s.q3,
                s.whisker_low,
                s.whisker_high,
                s.min,
                s.max
            );
        }
    }
    files.push(write_file(dir.join("summary.csv"), &summary)?);

    let reps = report.runs.iter().map(|r| r.curves.len()).max().unwrap_or(0);
    if reps > 0 {
        let curves = dir.join("curves");
        fs::create_dir_all(&curves)?;
        for k in 0..reps {
            let mut s = String::from("x,true");
            for run in &report.runs {
                let _ = write!(s, ",n_{}", run.n);
            }
            s.push('\n');
            for (i, x) in report.x_grid.iter().enumerate() {
                let _ = write!(s, "{},{}", x, report.true_density[i]);
                for run in &report.runs {
                    match run.curves.get(k) {
                        Some(c) => {
                            let _ = write!(s, ",{}", c[i]);
                        }
                        None => s.push(','),
                    }
                }
                s.push('\n');
            }
            files.push(write_file(curves.join(format!("rep_{k}.csv")), &s)?);
        }
    }

    files.push(write_file(dir.join("overlay.svg"), &overlay_svg(report))?);
    files.push(write_file(dir.join("boxplot.svg"), &boxplot_svg(report))?);
    Ok(files)
}

fn write_file(path: PathBuf, body: &str) -> Result<PathBuf> {
    fs::write(&path, body).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Ok(path)
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n\
         <line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>\n",
        W / 2.0,
        xml_escape(title),
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(xs: &[f64], ys: &[f64], (x0, x1): (f64, f64), (y0, y1): (f64, f64), style: &str) -> String {
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let px = PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let yc = y.clamp(y0, y1);
        let py = H - PAD - (yc - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let _ = write!(pts, "{px:.2},{py:.2} ");
    }
    format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", pts.trim_end())
}

fn overlay_svg(report: &ExperimentReport) -> String {
    let chosen = report
        .spec
        .overlay_n
        .and_then(|n| report.runs.iter().find(|r| r.n == n && !r.curves.is_empty()));
    let last = chosen.or_else(|| report.runs.iter().rev().find(|r| !r.curves.is_empty()));
    let title = match last {
        Some(r) => format!("{}: {} estimates at n = {}", report.spec.name, r.curves.len(), r.n),
        None => format!("{}: no estimates", report.spec.name),
    };
    let mut s = svg_open(&title);
    let xr = (
        report.x_grid.first().copied().unwrap_or(0.0),
        report.x_grid.last().copied().unwrap_or(1.0),
    );
    let top = report.true_density.iter().copied().fold(0.0, f64::max) * 1.6;
    let yr = (-0.1 * top.max(1e-12), top.max(1e-12));
    if let Some(r) = last {
        for c in &r.curves {
            s.push_str(&polyline(&report.x_grid, c, xr, yr, "stroke=\"#7f7f7f\" stroke-width=\"0.6\""));
        }
    }
    s.push_str(&polyline(
        &report.x_grid,
        &report.true_density,
        xr,
        yr,
        "stroke=\"#d62728\" stroke-width=\"2\"",
    ));
    s.push_str("</svg>\n");
    s
}

fn boxplot_svg(report: &ExperimentReport) -> String {
    let mut s = svg_open(&format!("{}: sup-loss by sample size", report.spec.name));
    let boxes: Vec<(usize, BoxStats)> = report.runs.iter().filter_map(|r| r.summary.map(|b| (r.n, b))).collect();
    let hi = boxes.iter().map(|b| b.1.max).fold(0.0, f64::max).max(1e-12) * 1.1;
    let y = |v: f64| H - PAD - v / hi * (H - 2.0 * PAD);
    let slot = (W - 2.0 * PAD) / boxes.len().max(1) as f64;
    for (i, (n, b)) in boxes.iter().enumerate() {
        let cx = PAD + slot * (i as f64 + 0.5);
        let half = slot * 0.25;
        let _ = write!(
            s,
            "<line x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#9ecae1\" stroke=\"black\"/>\n\
             <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>\n\
             <text x=\"{cx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">n={n}</text>\n",
            y(b.whisker_low),
            y(b.whisker_high),
            cx - half,
            y(b.q3),
            2.0 * half,
            (y(b.q1) - y(b.q3)).max(0.5),
            cx - half,
            y(b.median),
            cx + half,
            y(b.median),
            H - PAD + 16.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_stats_of_small_sample() {
        let b = BoxStats::from_values(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(b.median, 3.0);
        assert_eq!((b.q1, b.q3), (2.0, 4.0));
        assert_eq!(b.whisker_high, 4.0);
        assert_eq!(b.max, 100.0);
        assert!(BoxStats::from_values(&[]).is_none());
    }

    #[test]
    fn synthetic_rates() {
        let flat: Vec<(usize, f64)> = [100, 400, 1600].iter().map(|&n| (n, 0.3)).collect();
        assert!(rate_regression_points(&flat).unwrap().slope.abs() < 1e-14);
        let quarter: Vec<(usize, f64)> = [100, 400, 1600, 6400]
            .iter()
            .map(|&n| (n, 2.0 * (n as f64).powf(-0.25)))
            .collect();
        let fit = rate_regression_points(&quarter).unwrap();
        assert!((fit.slope + 0.25).abs() < 1e-12 && fit.stderr < 1e-12);
        assert!(matches!(
            rate_regression_points(&quarter[..2]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn normality_of_known_laws() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Exp1, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let z: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(normality_diagnostic(&z).unwrap().pass);
        let e: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut rng)).collect();
        let d = normality_diagnostic(&e).unwrap();
        assert!(!d.pass && (d.skewness - 2.0).abs() < 0.3);
        assert!(normality_diagnostic(&z[..100]).is_err());
    }
}
