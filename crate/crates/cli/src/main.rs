// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Runs one chiral-ring experiment described by a TOML file.
#[derive(Debug, Parser)]
#[command(name = "chiralring", version, about)]
struct Args {
    /// Experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Artifact root (default: the config's `out`, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Adds dense-diagonalization cross-checks where the dimension allows.
    #[arg(long)]
    verify: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if args.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    match chiralring_cli::run_file(&args.config, args.seed, args.out, args.threads, args.verify) {
        Ok(report) => {
            println!("{}", report.dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            e.to_exit_code()
        }
    }
}
