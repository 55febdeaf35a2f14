use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mellin-deconv"));
    c.env_remove("MELLIN_DECONV_THREADS").env("RUST_LOG", "info");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_exits_zero_and_lists_subcommands() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for cmd in ["simulate", "estimate", "experiment", "rates", "fixtures-check"] {
        assert!(text.contains(cmd), "missing {cmd} in help");
    }
    assert!(text.contains("MELLIN_DECONV_THREADS"));
}

#[test]
fn subcommand_help_documents_defaults() {
    let o = run(&["simulate", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("default: gamma:2"));
}

#[test]
fn low_sse_line_is_a_usage_error() {
    let o = run(&["estimate", "--route", "sse", "--gamma", "0.5", "-i", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma_line must exceed 3/4 for sse route"));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_subcommand_and_key_are_usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&["simulate", "--set", "nonsense=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nonsense"));
}

#[test]
fn unknown_key_in_config_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(preset("paper_fig2.json")).unwrap()).unwrap();
    v["typo_field"] = 1.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["experiment", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("typo_field"));
}

#[test]
fn missing_output_dir_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("absent");
    let o = run(&["simulate", "--n", "10", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"));
    assert!(!out.exists());

    let o = run(&["simulate", "--n", "10", "--create", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("samples.csv").exists());
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--dist", "gamma:2", "--n", "1000", "--seed", "7", "-o", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let samples = dir.path().join("samples.csv");
    assert_eq!(stdout(&o).trim(), samples.to_str().unwrap());
    // Diagnostics stay on stderr.
    assert!(stderr(&o).contains("wrote 1000 draws"));

    let body = std::fs::read_to_string(&samples).unwrap();
    assert!(body.starts_with("# {"));
    assert_eq!(body.lines().count(), 1002);

    let o = run(&["estimate", "-i", samples.to_str().unwrap(), "-o", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let est = std::fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    assert!(est.starts_with("x,value\n"));
    assert_eq!(est.lines().count(), 201);
    assert!(dir.path().join("estimate.csv.json").exists());
}

#[test]
fn simulate_is_seed_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["simulate", "--dist", "gig:1,1,1", "--obs", "variance_mean:1,1", "--n", "300", "--seed", "3", "-o", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("samples.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn gsse_estimate_on_drifted_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--obs", "variance_mean:1,1", "--n", "500", "--seed", "1", "-o", d]);
    assert_eq!(o.status.code(), Some(0));
    let samples = dir.path().join("samples.csv");
    let o = run(&[
        "estimate",
        "--route",
        "gsse-decomposed",
        "--levy",
        "brownian_drift:1,1",
        "--set",
        "grid.points=20",
        "-i",
        samples.to_str().unwrap(),
        "-o",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let est = std::fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    assert_eq!(est.lines().count(), 21);
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&[
        "experiment",
        "--config",
        preset("paper_fig3.json").to_str().unwrap(),
        "--set",
        "replications=3",
        "--seed",
        "99",
        "--print-config",
    ]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, &first.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["experiment"]["replications"], 3);
    assert_eq!(v["experiment"]["master_seed"], 99);
    assert_eq!(v["experiment"]["gamma_line"], 0.7);

    let second = run(&["experiment", "--config", echo.to_str().unwrap(), "--print-config"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn precedence_file_then_set_then_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    std::fs::write(&cfg, r#"{"n": 11, "seed": 4}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let get = |args: &[&str]| -> serde_json::Value {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        serde_json::from_slice(&o.stdout).unwrap()
    };
    let v = get(&["simulate", "--config", c, "--print-config"]);
    assert_eq!(v["simulate"]["n"], 11);
    let v = get(&["simulate", "--config", c, "--set", "n=12", "--print-config"]);
    assert_eq!(v["simulate"]["n"], 12);
    let v = get(&["simulate", "--config", c, "--set", "n=12", "--n", "13", "--print-config"]);
    assert_eq!(v["simulate"]["n"], 13);
    assert_eq!(v["simulate"]["seed"], 4);
}

#[test]
fn threads_env_is_a_fallback() {
    let o = bin()
        .args(["fixtures-check", "--print-config"])
        .env("MELLIN_DECONV_THREADS", "3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["threads"], 3);
    let o = bin()
        .args(["fixtures-check", "--print-config", "--threads", "2"])
        .env("MELLIN_DECONV_THREADS", "3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["threads"], 2);
}

#[test]
fn presets_parse() {
    for p in ["paper_fig2.json", "paper_fig3.json"] {
        let o = run(&["experiment", "--config", preset(p).to_str().unwrap(), "--print-config"]);
        assert_eq!(o.status.code(), Some(0), "{p}: {}", stderr(&o));
    }
}

#[test]
fn experiment_and_rates_small() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&[
        "experiment",
        "--config",
        preset("paper_fig2.json").to_str().unwrap(),
        "--replications",
        "3",
        "--set",
        "n_list=[200,400,800]",
        "--set",
        "overlay_n=400",
        "--threads",
        "2",
        "-o",
        d,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["losses.csv", "summary.csv", "overlay.svg", "boxplot.svg", "curves/rep_0.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let summary = dir.path().join("summary.csv");
    let o = run(&["rates", "-i", summary.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("slope,stderr"));
    let slope: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(slope.is_finite());
}

#[test]
fn rates_without_inputs_or_config_is_usage_error() {
    assert_eq!(run(&["rates"]).status.code(), Some(2));
    assert_eq!(run(&["experiment"]).status.code(), Some(2));
}

#[test]
fn fixtures_check_prints_table() {
    let o = run(&["fixtures-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("check,value,target,result\n"));
    assert!(out.lines().skip(1).all(|l| l.ends_with(",PASS") || l.ends_with(",FAIL")));
    assert!(out.contains("M[rho_M](1) = 0 (poly, M=3)"));
}
