//! Command-line harness for the quantum summation and integration
//! laboratory.
//!
//! Exit codes: 0 ok, 1 check failure, 2 config error, 3 resource cap.

mod config;
mod runner;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "qlab", version, about = "quantum summation/integration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV rows plus a JSON manifest.
    Run {
        /// Path to the TOML config file.
        config: String,
    },
    /// List the built-in problems and test functions with their ground-truth
    /// provenance.
    Catalog {
        /// Only print lines containing this substring.
        filter: Option<String>,
    },
    /// Run the acceptance suite (or one criterion) and report pass/fail.
    Check {
        /// Criterion number 1..=12; all when omitted.
        #[arg(long)]
        criterion: Option<u32>,
    },
    /// Print the package version.
    Version,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run(&config),
        Command::Catalog { filter } => {
            print!("{}", runner::catalog_listing(filter.as_deref()));
            ExitCode::SUCCESS
        }
        Command::Check { criterion } => check(criterion),
        Command::Version => {
            println!("qlab {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

fn run(config_path: &str) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {config_path}: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match runner::run_experiment(&cfg, &text) {
        Ok(artifacts) => {
            match &cfg.out_csv {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &artifacts.csv) {
                        eprintln!("cannot write {path}: {e}");
                        return ExitCode::from(1);
                    }
                    eprintln!("wrote {} row(s) to {path}", artifacts.rows);
                }
                None => print!("{}", artifacts.csv),
            }
            if let Some(path) = &cfg.out_manifest {
                if let Err(e) = std::fs::write(path, &artifacts.manifest) {
                    eprintln!("cannot write {path}: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn check(criterion: Option<u32>) -> ExitCode {
    let results = match criterion {
        Some(id) if (1..=12).contains(&id) => vec![qlab::acceptance::run_criterion(id)],
        Some(id) => {
            eprintln!("config error: criterion {id} out of range 1..=12");
            return ExitCode::from(2);
        }
        None => qlab::acceptance::run_all(),
    };
    let mut failed = 0;
    for r in &results {
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
