use std::fs;
use std::path::{Path, PathBuf};

use mellin_deconv::estimate::linear_grid;
use mellin_deconv::fixtures::{build_pair, log_slope, mellin_rho_m, pair_chi_square, PerturbedPair, Variant};
use mellin_deconv::gsse::{estimate_gsse, GsseConfig};
use mellin_deconv::harness::{export_report, rate_regression, rate_regression_points, run_experiment, Route};
use mellin_deconv::quad::{adaptive_half_line, QuadConfig};
use mellin_deconv::simulate::{read_samples, sample_observations, sample_times, write_samples};
use mellin_deconv::sse::{estimate_sse, SseConfig};
use mellin_deconv::{Error, Result, SampleSet};

use crate::config::{CliConfig, CommandName, EstimateSettings, FixturesSettings, SimulateSettings};

/// Runs the resolved command; data goes to stdout, progress to the log.
pub fn dispatch(cfg: &CliConfig) -> Result<()> {
    match cfg.subcommand {
        CommandName::Simulate => simulate(cfg, cfg.simulate.as_ref().expect("resolved")),
        CommandName::Estimate => estimate(cfg, cfg.estimate.as_ref().expect("resolved")),
        CommandName::Experiment => experiment(cfg),
        CommandName::Rates => rates(cfg),
        CommandName::FixturesCheck => fixtures_check(cfg.fixtures.as_ref().expect("resolved")),
    }
}

fn output_dir(cfg: &CliConfig) -> Result<PathBuf> {
    let dir = &cfg.output_dir;
    if !dir.is_dir() {
        if cfg.create {
            fs::create_dir_all(dir)?;
        } else {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("output directory {} does not exist (pass --create)", dir.display()),
            )));
        }
    }
    Ok(dir.clone())
}

fn simulate(cfg: &CliConfig, s: &SimulateSettings) -> Result<()> {
    let dir = output_dir(cfg)?;
    let times = sample_times::<f64>(&s.dist, s.n, s.seed)?;
    let (set, params) = match &s.observation {
        Some(m) => (
            sample_observations(&times, m, s.seed.wrapping_add(1))?,
            serde_json::json!({ "dist": s.dist, "observation": m, "n": s.n }),
        ),
        None => (times, serde_json::json!({ "dist": s.dist, "n": s.n })),
    };
    let path = dir.join("samples.csv");
    write_samples(&set, params, &path)?;
    log::info!("wrote {} draws", set.len());
    println!("{}", path.display());
    Ok(())
}

fn estimate(cfg: &CliConfig, s: &EstimateSettings) -> Result<()> {
    let dir = output_dir(cfg)?;
    let input = s.input.as_ref().expect("validated");
    let samples: SampleSet<f64> = read_samples(input).map_err(|e| e.context(format!("reading {}", input.display())))?;
    let n = samples.len();
    let grid = linear_grid(s.grid.x_min, s.grid.x_max, s.grid.points);
    let est = match s.route {
        Route::Sse => {
            let c = SseConfig {
                gamma_line: s.gamma_line,
                beta: s.beta,
                smoothness_mode: s.smoothness_mode,
                bandwidth_multiplier: s.bandwidth_multiplier,
                n,
                clip_nonnegative: false,
            };
            let h = match s.bandwidth {
                Some(h) => h,
                None => c.bandwidth::<f64>()?,
            };
            estimate_sse(&samples.abs(), &c, h, &grid)?
        }
        Route::Gsse | Route::GsseDecomposed => {
            let c = GsseConfig {
                gamma_line: s.gamma_line,
                beta: s.beta,
                epsilon: s.epsilon,
                smoothness_mode: s.smoothness_mode,
                a_multiplier: s.a_multiplier,
                u_multiplier: s.u_multiplier,
                n,
            };
            estimate_gsse(&samples, &s.levy_model, &c, &grid, s.route == Route::GsseDecomposed)?
        }
    };
    for p in est.write(&dir.join("estimate.csv"))? {
        println!("{}", p.display());
    }
    Ok(())
}

fn experiment(cfg: &CliConfig) -> Result<()> {
    let spec = cfg.experiment.as_ref().expect("resolved");
    let dir = output_dir(cfg)?;
    log::info!(
        "running `{}`: route {:?}, n = {:?}, {} replications",
        spec.name,
        spec.route,
        spec.n_list,
        spec.replications
    );
    let report = run_experiment(spec)?;
    log::info!("finished in {:.1}s", report.runtime_secs);
    for p in export_report(&report, &dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn rates(cfg: &CliConfig) -> Result<()> {
    let r = cfg.rates.as_ref().expect("resolved");
    let fit = if let Some(spec) = &r.experiment {
        let report = run_experiment(spec)?;
        let dir = output_dir(cfg)?;
        export_report(&report, &dir)?;
        rate_regression(&[report])?
    } else {
        let mut points = Vec::new();
        for p in &r.inputs {
            points.extend(read_summary(p)?);
        }
        rate_regression_points(&points)?
    };
    println!("slope,stderr");
    println!("{},{}", fit.slope, fit.stderr);
    Ok(())
}

/// `(n, median)` rows of a summary.csv.
fn read_summary(path: &Path) -> Result<Vec<(usize, f64)>> {
    let body = fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut lines = body.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::Param(format!("{}: no `{name}` column", path.display())))
    };
    let (cn, cm) = (col("n")?, col("median")?);
    lines
        .enumerate()
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || Error::Param(format!("{}: bad row {}", path.display(), i + 2));
            let n = f.get(cn).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let m = f.get(cm).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            Ok((n, m))
        })
        .collect()
}

struct Check {
    name: String,
    value: f64,
    target: String,
    pass: bool,
}

fn fixtures_check(s: &FixturesSettings) -> Result<()> {
    let mut checks = Vec::new();
    let at_one = mellin_rho_m(Variant::Poly, 3.0, num_complex_one())?.norm();
    checks.push(Check {
        name: "M[rho_M](1) = 0 (poly, M=3)".into(),
        value: at_one,
        target: "< 1e-8".into(),
        pass: at_one < 1e-8,
    });

    let cfg = QuadConfig::with_tolerances(1e-13, 1e-10);
    for (variant, m) in [(Variant::Poly, 5.0), (Variant::Log, 6.0)] {
        let pair = build_pair(variant, s.nu, m)?;
        let mass = integrate_q1(&pair, &cfg)?;
        checks.push(Check {
            name: format!("integral of q1 ({variant:?}, M={m})"),
            value: mass,
            target: "1 +- 1e-6".into(),
            pass: (mass - 1.0).abs() < 1e-6,
        });
    }

    let poly_target = -std::f64::consts::PI * (1.0 + 2.0 / s.nu);
    let slope = chi_slope(Variant::Poly, s.nu, &s.poly_m)?;
    checks.push(Check {
        name: format!("chi2 log-slope (poly, nu={})", s.nu),
        value: slope,
        target: format!("{poly_target:.4} +- 40%"),
        pass: within(slope, poly_target, 0.4),
    });
    let log_target = -std::f64::consts::FRAC_PI_2;
    let slope = chi_slope(Variant::Log, s.nu, &s.log_m)?;
    checks.push(Check {
        name: format!("chi2 log-slope (log, nu={})", s.nu),
        value: slope,
        target: format!("{log_target:.4} +- 40%"),
        pass: within(slope, log_target, 0.4),
    });

    let sup_target = -std::f64::consts::PI / s.nu;
    let sups: Vec<f64> = s
        .sup_m
        .iter()
        .map(|&m| sup_perturbation(&build_pair(Variant::Poly, s.nu, m)?))
        .collect::<Result<_>>()?;
    let slope = log_slope(&s.sup_m, &sups)?;
    checks.push(Check {
        name: "sup |q1 - q0| log-slope (poly)".into(),
        value: slope,
        target: format!("{sup_target:.4} +- 30%"),
        pass: within(slope, sup_target, 0.3),
    });

    println!("check,value,target,result");
    for c in &checks {
        println!("{},{:.6e},{},{}", c.name, c.value, c.target, if c.pass { "PASS" } else { "FAIL" });
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    log::info!("{} of {} fixture checks passed", checks.len() - failed, checks.len());
    Ok(())
}

fn num_complex_one() -> mellin_deconv::Complex64 {
    mellin_deconv::Complex64::new(1.0, 0.0)
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn integrate_q1(pair: &PerturbedPair, cfg: &QuadConfig<f64>) -> Result<f64> {
    let mut failure = None;
    let (v, _) = adaptive_half_line(
        |t| match pair.q1(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &QuadConfig {
            log_range: 30.0,
            ..*cfg
        },
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Log-linear slope of the χ² distance over `ms`.
pub fn chi_slope(variant: Variant, nu: f64, ms: &[f64]) -> Result<f64> {
    let chis: Vec<f64> = ms
        .iter()
        .map(|&m| pair_chi_square(&build_pair(variant, nu, m)?).map(|c| c.value))
        .collect::<Result<_>>()?;
    log_slope(ms, &chis)
}

/// `sup_x |q1 − q0|` on a log grid.
fn sup_perturbation(pair: &PerturbedPair) -> Result<f64> {
    let mut best: f64 = 0.0;
    for k in 0..=400 {
        let x = (-6.0 + 12.0 * k as f64 / 400.0).exp();
        best = best.max((pair.q1(x)? - pair.q0(x)).abs());
    }
    Ok(best)
}
