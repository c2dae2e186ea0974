use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mkfix::cli::{cmd_report, cmd_solve, cmd_verify, ProblemConfig, EXIT_ERROR, EXIT_OK};

#[derive(Parser)]
#[command(name = "mkfix", version, about = "Fixed points of alpha-contractive maps: solvers and hypothesis checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check applicable to the configured problem
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory for verify_report.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured solver and write trace.csv and report.json
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a trace CSV
    Report { trace: PathBuf },
}

fn run(cli: Cli) -> mkfix::error::Result<u8> {
    match cli.command {
        Command::Verify { config, out } => {
            let cfg = ProblemConfig::load(&config)?;
            let report = cmd_verify(&cfg, out.as_deref())?;
            for check in &report.checks {
                let verdict = match (check.informational, check.passed) {
                    (true, _) => "info",
                    (false, true) => "pass",
                    (false, false) => "FAIL",
                };
                println!("{:<20} {verdict} ({} violations)", check.name, check.violations);
            }
            Ok(report.exit_code)
        }
        Command::Solve { config, out } => {
            let cfg = ProblemConfig::load(&config)?;
            let report = cmd_solve(&cfg, out.as_deref())?;
            match (&report.status, &report.error) {
                (_, Some(e)) => eprintln!("error: {e}"),
                (Some(s), None) => println!("status: {s}"),
                (None, None) => {}
            }
            if let Some(d) = &report.diagnostics {
                println!("iterations: {}\nresidual: {:e}", d.iterations, d.residual);
            }
            Ok(report.exit_code)
        }
        Command::Report { trace } => {
            print!("{}", cmd_report(&trace)?);
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
