mod commands;
mod config;

use std::process::ExitCode;

use config::parse_and_validate;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let argv: Vec<String> = std::env::args().collect();
    let cfg = match parse_and_validate(&argv) {
        Ok(Ok(cfg)) => cfg,
        Ok(Err(clap_err)) => {
            // Help and version go to stdout with status 0, syntax errors to
            // stderr with status 2.
            let code = if clap_err.use_stderr() { 2 } else { 0 };
            let _ = clap_err.print();
            return ExitCode::from(code);
        }
        Err(usage) => {
            eprintln!("error: {usage}");
            return ExitCode::from(2);
        }
    };
    if cfg.print_config {
        match serde_json::to_string_pretty(&cfg) {
            Ok(s) => {
                println!("{s}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
    }
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::dispatch(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
