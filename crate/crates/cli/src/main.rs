// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

//! `unruh-preth`: run, list and validate simulation scenarios.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;
use unruh_preth::scenario::{bundled, run_scenario, Scenario, BUNDLED};

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "UNRUH_PRETH_OUT";
const DEFAULT_OUT: &str = "out";

#[derive(Parser)]
#[command(name = "unruh-preth", version, about = "Thermalization and prethermalization of accelerated atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print a one-line JSON summary.
    Run {
        /// Scenario JSON file, or the name of a bundled scenario.
        scenario: String,
        /// Output directory [default: $UNRUH_PRETH_OUT, else ./out].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweep points.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Parse and check a scenario without running it.
    Validate {
        scenario: String,
    },
}

fn load(arg: &str) -> unruh_preth::Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() || BUNDLED.iter().all(|(n, _)| *n != arg) {
        return Scenario::from_path(path);
    }
    bundled(arg)
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn run(scenario: &str, out: Option<PathBuf>, threads: Option<usize>) -> Result<(), String> {
    if let Some(k) = threads {
        if k == 0 {
            return Err("--threads must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let s = load(scenario).map_err(|e| format!("{scenario}: {e}"))?;
    let root = out_dir(out);
    eprintln!("running `{}` ({}) into {}", s.name, s.mode.label(), root.display());
    let start = Instant::now();
    let summary = run_scenario(&s, &root).map_err(|e| format!("{}: {e}", s.name))?;
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!("wrote {} files, {} rows in {elapsed:.2} s", summary.files.len(), summary.rows_written);
    let mut line = serde_json::to_value(&summary).map_err(|e| e.to_string())?;
    line["elapsed_s"] = json!(elapsed);
    println!("{line}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, threads } => run(&scenario, out, threads),
        Command::ListScenarios => {
            for (name, _) in BUNDLED {
                match bundled(name) {
                    Ok(s) => println!("{name}\t{}", s.mode.label()),
                    Err(e) => eprintln!("{name}: {e}"),
                }
            }
            Ok(())
        }
        Command::Validate { scenario } => load(&scenario)
            .map(|s| println!("{}", json!({ "scenario": s.name, "mode": s.mode, "valid": true })))
            .map_err(|e| format!("{scenario}: {e}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
