//! Argument parsing and config resolution.
//!
//! Settings are merged in three layers: the JSON file given by `--config`,
//! then `--set key=value` overrides, then dedicated flags. The merged JSON
//! is deserialized with unknown keys rejected and then validated, so every
//! error names the offending key.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use mellin_deconv::gsse::LevyModel;
use mellin_deconv::harness::{ExperimentSpec, LossGrid, Route};
use mellin_deconv::simulate::{ObservationModel, TimeDistribution};
use mellin_deconv::SmoothnessMode;

/// Invalid invocation; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "mellin-deconv",
    version,
    about = "Estimate the density of a random time from stopped Brownian or Lévy samples",
    after_help = "Settings precedence: --config file < --set overrides < flags.\n\
                  Exit codes: 0 success, 1 runtime error, 2 usage error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// JSON settings file for the subcommand (a full --print-config echo is also accepted).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed (sample seed for `simulate`, master seed for `experiment`/`rates`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory [default: current directory].
    #[arg(short, long, global = true, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Worker threads [default: MELLIN_DECONV_THREADS, else all cores].
    #[arg(long, global = true, env = "MELLIN_DECONV_THREADS")]
    pub threads: Option<usize>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    /// Create the output directory if it does not exist.
    #[arg(long, global = true)]
    pub create: bool,
    /// Override a setting, e.g. `--set gamma_line=0.9` or `--set loss_grid.points=100`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Draw random times and (optionally) observations; writes samples.csv.
    Simulate {
        /// Time law: gamma:ALPHA | gig:LAMBDA,KAPPA,DELTA | heavy_tail_q:NU [default: gamma:2].
        #[arg(long)]
        dist: Option<String>,
        /// Observation model: subordinated_bm | variance_mean:MU,SIGMA | subordinated_stable:ALPHA | none [default: subordinated_bm].
        #[arg(long)]
        obs: Option<String>,
        /// Number of draws [default: 1000].
        #[arg(long)]
        n: Option<usize>,
    },
    /// Estimate p_T from a sample file; writes estimate.csv and estimate.csv.json.
    Estimate {
        /// Estimator: sse | gsse | gsse-decomposed [default: sse].
        #[arg(long)]
        route: Option<String>,
        /// Inversion line gamma [default: 0.8 for sse, 0.7 otherwise].
        #[arg(long)]
        gamma: Option<f64>,
        /// Smoothness index beta [default: pi/2].
        #[arg(long)]
        beta: Option<f64>,
        /// Smoothness class C or D [default: C].
        #[arg(long)]
        mode: Option<String>,
        /// Sample CSV (as written by `simulate`).
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Lévy exponent for gsse: brownian_drift:MU,SIGMA | stable:ALPHA [default: brownian_drift:1,1].
        #[arg(long)]
        levy: Option<String>,
    },
    /// Run a Monte Carlo experiment and export losses, curves and plots.
    Experiment {
        /// Replications per sample size (overrides the config).
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Fit the log-log slope of median loss against n.
    Rates {
        /// summary.csv files from earlier experiments; without them the --config experiment is run.
        #[arg(short, long)]
        input: Vec<PathBuf>,
    },
    /// Check the lower-bound fixtures and print a pass/fail table.
    FixturesCheck,
}

/// Subcommand tag stored in the resolved config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Simulate,
    Estimate,
    Experiment,
    Rates,
    FixturesCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSettings {
    pub dist: TimeDistribution,
    /// `None` writes the times themselves.
    pub observation: Option<ObservationModel>,
    pub n: usize,
    pub seed: u64,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        SimulateSettings {
            dist: TimeDistribution::Gamma { alpha: 2.0 },
            observation: Some(ObservationModel::SubordinatedBm),
            n: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSettings {
    pub route: Route,
    pub input: Option<PathBuf>,
    pub gamma_line: f64,
    pub beta: f64,
    pub smoothness_mode: SmoothnessMode,
    pub bandwidth_multiplier: f64,
    /// Explicit SSE bandwidth; the rule is used when absent.
    pub bandwidth: Option<f64>,
    pub epsilon: f64,
    pub a_multiplier: f64,
    pub u_multiplier: f64,
    pub levy_model: LevyModel,
    pub grid: LossGrid,
}

impl Default for EstimateSettings {
    fn default() -> Self {
        EstimateSettings {
            route: Route::Sse,
            input: None,
            gamma_line: 0.8,
            beta: FRAC_PI_2,
            smoothness_mode: SmoothnessMode::C,
            bandwidth_multiplier: 0.75,
            bandwidth: None,
            epsilon: 0.5,
            a_multiplier: 1.0,
            u_multiplier: 3.0,
            levy_model: LevyModel::BrownianDrift { mu: 1.0, sigma: 1.0 },
            grid: LossGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSettings {
    pub inputs: Vec<PathBuf>,
    pub experiment: Option<ExperimentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixturesSettings {
    pub nu: f64,
    pub poly_m: Vec<f64>,
    pub log_m: Vec<f64>,
    pub sup_m: Vec<f64>,
}

impl Default for FixturesSettings {
    fn default() -> Self {
        FixturesSettings {
            nu: 2.0,
            poly_m: vec![3.0, 4.0, 5.0, 6.0],
            log_m: vec![4.0, 6.0, 8.0],
            sup_m: vec![4.0, 6.0, 8.0, 10.0],
        }
    }
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub subcommand: CommandName,
    pub config_path: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub create: bool,
    pub print_config: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixtures: Option<FixturesSettings>,
}

/// Parses `argv` (including the program name) into a validated config.
///
/// `Ok(Err(e))` carries clap's own outcome (help, version or a syntax
/// error) for the caller to print.
pub fn parse_and_validate(argv: &[String]) -> Result<Result<CliConfig, clap::Error>, UsageError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    resolve(cli).map(Ok)
}

fn resolve(cli: Cli) -> Result<CliConfig, UsageError> {
    let g = cli.global;
    let name = match &cli.command {
        Command::Simulate { .. } => CommandName::Simulate,
        Command::Estimate { .. } => CommandName::Estimate,
        Command::Experiment { .. } => CommandName::Experiment,
        Command::Rates { .. } => CommandName::Rates,
        Command::FixturesCheck => CommandName::FixturesCheck,
    };
    let (file, echo) = match &g.config {
        Some(p) => {
            let (v, echo) = read_config_file(p, name)?;
            (Some(v), echo)
        }
        None => (None, None),
    };
    // Re-reading a `--print-config` echo keeps its bookkeeping fields, so
    // the echo of an echo is the same document.
    let echo_rates = echo.is_some();
    let (config_path, mut overrides, output_dir, seed, threads, create) = match echo {
        Some(e) => (e.config_path, e.overrides, Some(e.output_dir), e.seed, e.threads, e.create),
        None => (g.config.clone(), Vec::new(), None, None, None, false),
    };
    overrides.extend(g.overrides.iter().cloned());

    let mut cfg = CliConfig {
        subcommand: name,
        config_path,
        overrides,
        output_dir: g.output.clone().or(output_dir).unwrap_or_else(|| PathBuf::from(".")),
        seed: g.seed.or(seed),
        threads: g.threads.or(threads),
        create: g.create || create,
        print_config: g.print_config,
        simulate: None,
        estimate: None,
        experiment: None,
        rates: None,
        fixtures: None,
    };

    match cli.command {
        Command::Simulate { dist, obs, n } => {
            let mut v = layer(to_value(&SimulateSettings::default()), file, &g.overrides)?;
            if let Some(d) = dist {
                v["dist"] = to_value(&parse_dist(&d)?);
            }
            if let Some(o) = obs {
                v["observation"] = to_value(&parse_obs(&o)?);
            }
            if let Some(n) = n {
                v["n"] = n.into();
            }
            if let Some(s) = g.seed {
                v["seed"] = s.into();
            }
            let s: SimulateSettings = from_value(v)?;
            s.dist.validate().map_err(|e| UsageError(format!("dist: {e}")))?;
            if let Some(o) = &s.observation {
                o.validate().map_err(|e| UsageError(format!("observation: {e}")))?;
            }
            if s.n == 0 {
                return usage("n must be positive");
            }
            cfg.simulate = Some(s);
        }
        Command::Estimate {
            route,
            gamma,
            beta,
            mode,
            input,
            levy,
        } => {
            let mut base = to_value(&EstimateSettings::default());
            // The default line depends on the route.
            let route_hint = route.as_deref().map(parse_route).transpose()?;
            let mut v_route = route_hint;
            if v_route.is_none() {
                if let Some(Value::String(r)) = file.as_ref().and_then(|f| f.get("route")) {
                    v_route = Some(parse_route(r)?);
                }
            }
            if matches!(v_route, Some(Route::Gsse | Route::GsseDecomposed)) {
                base["gamma_line"] = 0.7.into();
            }
            let mut v = layer(base, file, &g.overrides)?;
            if let Some(r) = route_hint {
                v["route"] = to_value(&r);
            }
            if let Some(x) = gamma {
                v["gamma_line"] = x.into();
            }
            if let Some(x) = beta {
                v["beta"] = x.into();
            }
            if let Some(m) = mode {
                let m: SmoothnessMode = m
                    .parse()
                    .map_err(|_| UsageError(format!("mode must be C or D, got `{m}`")))?;
                v["smoothness_mode"] = to_value(&m);
            }
            if let Some(p) = input {
                v["input"] = to_value(&p);
            }
            if let Some(l) = levy {
                v["levy_model"] = to_value(&parse_levy(&l)?);
            }
            let s: EstimateSettings = from_value(v)?;
            validate_estimate(&s)?;
            cfg.estimate = Some(s);
        }
        Command::Experiment { replications } => {
            let Some(file) = file else {
                return usage("experiment needs --config <spec.json> (see crates/cli/presets)");
            };
            let mut v = layer(Value::Object(Map::new()), Some(file), &g.overrides)?;
            if let Some(r) = replications {
                v["replications"] = r.into();
            }
            if let Some(s) = g.seed {
                v["master_seed"] = s.into();
            }
            let spec: ExperimentSpec = from_value(v)?;
            validate_spec(&spec)?;
            cfg.experiment = Some(spec);
        }
        Command::Rates { input } => {
            // An echoed rates section carries its inputs and spec directly.
            let (file, mut inputs) = match (file, echo_rates) {
                (Some(f), true) => {
                    let r: RatesSettings = from_value(f)?;
                    (r.experiment.map(|e| to_value(&e)), r.inputs)
                }
                (f, _) => (f, Vec::new()),
            };
            if !input.is_empty() {
                inputs = input;
            }
            let experiment = if inputs.is_empty() {
                let Some(file) = file else {
                    return usage("rates needs --input <summary.csv>... or --config <spec.json>");
                };
                let mut v = layer(Value::Object(Map::new()), Some(file), &g.overrides)?;
                if let Some(s) = g.seed {
                    v["master_seed"] = s.into();
                }
                let spec: ExperimentSpec = from_value(v)?;
                validate_spec(&spec)?;
                if distinct(&spec.n_list) < 3 {
                    return usage("n_list must hold at least 3 distinct sample sizes for a rate fit");
                }
                Some(spec)
            } else {
                None
            };
            cfg.rates = Some(RatesSettings { inputs, experiment });
        }
        Command::FixturesCheck => {
            let v = layer(to_value(&FixturesSettings::default()), file, &g.overrides)?;
            let s: FixturesSettings = from_value(v)?;
            if !(s.nu > 1.0) {
                return usage(format!("nu must exceed 1, got {}", s.nu));
            }
            cfg.fixtures = Some(s);
        }
    }
    if cfg.threads == Some(0) {
        return usage("threads must be at least 1");
    }
    Ok(cfg)
}

fn distinct(v: &[usize]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

/// Reads a settings file; a `--print-config` echo contributes only the
/// section of the current subcommand.
fn read_config_file(path: &PathBuf, name: CommandName) -> Result<(Value, Option<CliConfig>), UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{} is not valid JSON: {e}", path.display())))?;
    if v.get("subcommand").is_some() {
        let echo: CliConfig = serde_json::from_value(v).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let section = match name {
            CommandName::Simulate => echo.simulate.as_ref().map(to_value),
            CommandName::Estimate => echo.estimate.as_ref().map(to_value),
            CommandName::Experiment => echo.experiment.as_ref().map(to_value),
            CommandName::Rates => echo.rates.as_ref().map(to_value),
            CommandName::FixturesCheck => echo.fixtures.as_ref().map(to_value),
        };
        let section =
            section.ok_or_else(|| UsageError(format!("{} holds no settings for this subcommand", path.display())))?;
        return Ok((section, Some(echo)));
    }
    Ok((v, None))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("settings serialize to JSON")
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, UsageError> {
    serde_json::from_value(v).map_err(|e| UsageError(format!("invalid settings: {e}")))
}

/// Applies the file, then the `key=value` overrides, on top of `base`.
fn layer(mut base: Value, file: Option<Value>, overrides: &[String]) -> Result<Value, UsageError> {
    if let Some(f) = file {
        merge(&mut base, f);
    }
    for o in overrides {
        let Some((key, raw)) = o.split_once('=') else {
            return usage(format!("override `{o}` is not of the form key=value"));
        };
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut base, key, value)?;
    }
    Ok(base)
}

fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<(), UsageError> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = cur else {
            return usage(format!("unknown key `{key}`"));
        };
        if !map.contains_key(*part) {
            return usage(format!("unknown key `{key}`"));
        }
        if i + 1 == parts.len() {
            map.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = map.get_mut(*part).expect("checked above");
    }
    usage(format!("unknown key `{key}`"))
}

fn parse_route(s: &str) -> Result<Route, UsageError> {
    s.parse().map_err(|_| UsageError(format!("route must be sse, gsse or gsse-decomposed, got `{s}`")))
}

fn numbers(spec: &str, what: &str, count: usize) -> Result<Vec<f64>, UsageError> {
    let v: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("{what}: `{spec}` is not a number list")))?;
    if v.len() != count {
        return usage(format!("{what} takes {count} parameter(s), got {}", v.len()));
    }
    Ok(v)
}

fn parse_dist(s: &str) -> Result<TimeDistribution, UsageError> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    let d = match kind {
        "gamma" => TimeDistribution::Gamma {
            alpha: numbers(params, "gamma", 1)?[0],
        },
        "gig" => {
            let p = numbers(params, "gig", 3)?;
            TimeDistribution::Gig {
                lambda: p[0],
                kappa: p[1],
                delta: p[2],
            }
        }
        "heavy_tail_q" => TimeDistribution::HeavyTailQ {
            nu: numbers(params, "heavy_tail_q", 1)?[0],
        },
        other => return usage(format!("dist: unknown law `{other}` (gamma, gig, heavy_tail_q)")),
    };
    d.validate().map_err(|e| UsageError(format!("dist: {e}")))?;
    Ok(d)
}

fn parse_obs(s: &str) -> Result<Option<ObservationModel>, UsageError> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    let m = match kind {
        "none" => return Ok(None),
        "subordinated_bm" => ObservationModel::SubordinatedBm,
        "variance_mean" => {
            let p = numbers(params, "variance_mean", 2)?;
            ObservationModel::VarianceMean { mu: p[0], sigma: p[1] }
        }
        "subordinated_stable" => ObservationModel::SubordinatedStable {
            alpha: numbers(params, "subordinated_stable", 1)?[0],
        },
        other => return usage(format!("obs: unknown model `{other}`")),
    };
    m.validate().map_err(|e| UsageError(format!("obs: {e}")))?;
    Ok(Some(m))
}

fn parse_levy(s: &str) -> Result<LevyModel, UsageError> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    let m = match kind {
        "brownian_drift" => {
            let p = numbers(params, "brownian_drift", 2)?;
            LevyModel::BrownianDrift { mu: p[0], sigma: p[1] }
        }
        "stable" => LevyModel::Stable {
            alpha: numbers(params, "stable", 1)?[0],
        },
        other => return usage(format!("levy: unknown model `{other}` (brownian_drift, stable)")),
    };
    m.validate().map_err(|e| UsageError(format!("levy: {e}")))?;
    Ok(m)
}

fn validate_line(route: Route, gamma: f64) -> Result<(), UsageError> {
    match route {
        Route::Sse if !(gamma > 0.75) => usage(format!("gamma_line must exceed 3/4 for sse route, got {gamma}")),
        Route::Gsse | Route::GsseDecomposed if !(gamma > 0.5 && gamma < 1.0) => usage(format!(
            "gamma_line must lie in (1/2, 1) for gsse routes, got {gamma}"
        )),
        _ => Ok(()),
    }
}

fn positive(key: &str, v: f64) -> Result<(), UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        usage(format!("{key} must be positive, got {v}"))
    }
}

fn validate_estimate(s: &EstimateSettings) -> Result<(), UsageError> {
    validate_line(s.route, s.gamma_line)?;
    positive("beta", s.beta)?;
    positive("bandwidth_multiplier", s.bandwidth_multiplier)?;
    positive("epsilon", s.epsilon)?;
    positive("a_multiplier", s.a_multiplier)?;
    positive("u_multiplier", s.u_multiplier)?;
    if let Some(h) = s.bandwidth {
        positive("bandwidth", h)?;
    }
    s.levy_model
        .validate()
        .map_err(|e| UsageError(format!("levy_model: {e}")))?;
    validate_grid(&s.grid)?;
    if s.input.is_none() {
        return usage("input: a sample file is required (--input FILE)");
    }
    Ok(())
}

fn validate_grid(g: &LossGrid) -> Result<(), UsageError> {
    if !(g.x_min > 0.0 && g.x_max > g.x_min && g.points >= 2) {
        return usage("grid must satisfy 0 < x_min < x_max and points >= 2");
    }
    Ok(())
}

fn validate_spec(spec: &ExperimentSpec) -> Result<(), UsageError> {
    validate_line(spec.route, spec.gamma_line)?;
    positive("beta", spec.beta)?;
    positive("bandwidth_multiplier", spec.bandwidth_multiplier)?;
    positive("epsilon", spec.epsilon)?;
    positive("a_multiplier", spec.a_multiplier)?;
    positive("u_multiplier", spec.u_multiplier)?;
    validate_grid(&spec.loss_grid)?;
    if spec.n_list.is_empty() {
        return usage("n_list must not be empty");
    }
    spec.validate().map_err(|e| UsageError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("mellin-deconv".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn low_gamma_for_sse_is_a_usage_error() {
        let e = parse_and_validate(&argv("estimate --route sse --gamma 0.5")).unwrap_err();
        assert!(e.0.contains("gamma_line must exceed 3/4"), "{e}");
    }

    #[test]
    fn unknown_override_key_is_rejected() {
        let e = parse_and_validate(&argv("simulate --set bogus=1")).unwrap_err();
        assert!(e.0.contains("unknown key `bogus`"));
    }

    #[test]
    fn flags_beat_overrides() {
        let c = parse_and_validate(&argv("simulate --set n=5 --n 7")).unwrap().unwrap();
        assert_eq!(c.simulate.unwrap().n, 7);
        let c = parse_and_validate(&argv("simulate --set n=5")).unwrap().unwrap();
        assert_eq!(c.simulate.unwrap().n, 5);
    }

    #[test]
    fn dist_syntax() {
        assert_eq!(parse_dist("gamma:2").unwrap(), TimeDistribution::Gamma { alpha: 2.0 });
        assert!(parse_dist("gamma:-1").is_err());
        assert!(parse_dist("gig:1,2").is_err());
        assert_eq!(parse_obs("none").unwrap(), None);
    }
}
