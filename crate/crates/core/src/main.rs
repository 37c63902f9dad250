use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hermitian_grassmann::cli::{
    self, Scenario, ScenarioError, VerifyOptions, EXIT_FAIL, EXIT_INPUT, EXIT_PASS,
};

/// Numerical checks for grassmannians of hermitian forms.
#[derive(Parser)]
#[command(name = "hgr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeatable. Defaults to the scenario's list.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per suite (default 100).
        #[arg(long)]
        trials: Option<usize>,
        /// Tolerance for suites without a per-suite entry in the scenario.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Evaluate invariants of the named points and tangent vectors.
    Invariants {
        #[command(flatten)]
        common: Common,
    },
    /// Classify the named frames by stratum.
    Stratify {
        #[command(flatten)]
        common: Common,
    },
}

fn emit<T: serde::Serialize>(value: &T, out: &Option<PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn run(cli: Cli) -> Result<i32, ScenarioError> {
    match cli.command {
        Command::Verify {
            common,
            suites,
            seed,
            trials,
            tol,
        } => {
            let scenario = Scenario::load(&common.scenario)?;
            let report = cli::cmd_verify(
                &scenario,
                &VerifyOptions {
                    suites,
                    seed,
                    trials,
                    tolerance: tol,
                },
            )?;
            emit(&report, &common.out)?;
            for s in report.suites.iter().filter(|s| s.failures > 0) {
                eprintln!("suite {} failed {}/{} trials", s.name, s.failures, s.trials);
                for d in &s.diagnostics {
                    eprintln!("  {d}");
                }
            }
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Invariants { common } => {
            let scenario = Scenario::load(&common.scenario)?;
            emit(&cli::cmd_invariants(&scenario)?, &common.out)?;
            Ok(EXIT_PASS)
        }
        Command::Stratify { common } => {
            let scenario = Scenario::load(&common.scenario)?;
            emit(&cli::cmd_stratify(&scenario)?, &common.out)?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hgr: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
