use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hjlab::report::{parse_config, run, Command, RunOptions};

/// Certify barriers and constants, solve radial problems and check gradient estimates.
#[derive(Debug, Parser)]
#[command(name = "hjlab", version)]
struct Cli {
    /// One of: certify-barrier, certify-bochner, solve-hj, solve-pharmonic,
    /// check-estimates, liouville, harnack, ledger.
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Record failed estimate checks as findings.
    #[arg(long)]
    allow_findings: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match parse_config(&cli.config, Some(cli.command)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("hjlab: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions { allow_findings: cli.allow_findings, jobs: cli.jobs.map(|j| j as usize) };
    match run(&cfg, &opts) {
        Ok(report) => {
            eprintln!("hjlab {}: {} -> {}", cfg.command, report.summary, cfg.out_dir.display());
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("hjlab: {e}");
            ExitCode::from(2)
        }
    }
}
