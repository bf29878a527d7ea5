use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lanczos_cli::run::{run_experiment, Report};
use lanczos_cli::{
    battery, parse_config, CliError, Experiment, RunConfig, EXIT_CHECK_FAILED, EXIT_OK,
};

#[derive(Debug, Parser)]
#[command(
    name = "lanczos",
    version,
    about = "Spectral, kernel, picture and geodesic verification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV output (default: `output` from the config, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Permit a nonzero initial velocity for the static-condition law.
    #[arg(long, global = true)]
    allow_nonstatic: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest eigenpairs of the finite-difference Hamiltonian.
    Spectrum,
    /// Green's kernel and its Nyström spectrum.
    Kernel,
    /// Reciprocity certificate E_k mu_k = 1.
    Reciprocity,
    /// Schrödinger vs Heisenberg expectation values.
    Pictures,
    /// Static-condition law against the full geodesic.
    Geodesic,
    /// Radial Poisson solver for a uniform ball.
    Poisson,
    /// Full acceptance battery.
    VerifyAll,
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Spectrum => Experiment::Spectrum,
            Command::Kernel => Experiment::Kernel,
            Command::Reciprocity => Experiment::Reciprocity,
            Command::Pictures => Experiment::Pictures,
            Command::Geodesic => Experiment::Geodesic,
            Command::Poisson => Experiment::Poisson,
            Command::VerifyAll => return None,
        })
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)
        }
        None => Ok(RunConfig::default()),
    }
}

fn execute(cli: &Cli, stdout: &mut impl Write) -> Result<bool, CliError> {
    let cfg = load(cli)?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.command.experiment() {
        Some(exp) => {
            let report = run_experiment(exp, &cfg, &out, cli.allow_nonstatic)?;
            report.write_to(&mut *stdout)?;
            Ok(report.passed())
        }
        None => {
            let mut all = Report::default();
            for (id, title, report) in battery::run_all(&out)? {
                writeln!(stdout, "== criterion {id}: {title}")?;
                report.write_to(&mut *stdout)?;
                all.extend(report);
            }
            let failed = all.checks.iter().filter(|c| !c.passed()).count();
            writeln!(
                stdout,
                "verify-all: {} checks, {failed} failed",
                all.checks.len()
            )?;
            Ok(all.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let code = match execute(&cli, &mut stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = stdout.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
