use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ahlfors::config::RunConfig;
use ahlfors::report::{error_exit_code, execute, field_csv, Command, RunOutput};
use ahlfors::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ahlfors",
    version,
    about = "Spectral tensor calculus on periodic grids: identity suites, \
             TT decompositions, soliton fits and constraint residuals"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for CSV field dumps (one file per field component).
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run the identity suite on the configured metric.
    Verify(RunArgs),
    /// Split a configured trace-free tensor into S theta + TT.
    Decompose(RunArgs),
    /// Fit the almost-soliton structure of the configured metric.
    Soliton(RunArgs),
    /// Constraint residuals and splitting for configured initial data.
    Constraints(RunArgs),
    /// Generate a seeded transverse-traceless tensor.
    GenTt(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CliCommand::Verify(args) => (Command::Verify, args),
        CliCommand::Decompose(args) => (Command::Decompose, args),
        CliCommand::Soliton(args) => (Command::Soliton, args),
        CliCommand::Constraints(args) => (Command::Constraints, args),
        CliCommand::GenTt(args) => (Command::GenTt, args),
    };
    match run(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_exit_code(&err))
        }
    }
}

fn run(command: Command, args: &RunArgs) -> Result<bool> {
    let config = RunConfig::load(&args.config)?;
    let output = execute(command, &config)?;
    write_outputs(&config, &output, args)?;
    Ok(output.report.passed)
}

fn write_outputs(config: &RunConfig, output: &RunOutput, args: &RunArgs) -> Result<bool> {
    let json = output.report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| {
            Error::InvalidArgument(format!("cannot write report {}: {e}", path.display()))
        })?,
        None => print!("{json}"),
    }
    if let Some(dir) = &args.dump {
        std::fs::create_dir_all(dir).map_err(|e| {
            Error::InvalidArgument(format!("cannot create dump dir {}: {e}", dir.display()))
        })?;
        let grid = config.grid.build()?;
        for dump in &output.dumps {
            let path = dir.join(format!("{}.csv", dump.name));
            std::fs::write(&path, field_csv(&grid, &dump.field)).map_err(|e| {
                Error::InvalidArgument(format!("cannot write dump {}: {e}", path.display()))
            })?;
        }
    }
    Ok(output.report.passed)
}
