use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pauliflow_cli::{run, CliError, Command, Emission, Options, RunConfig};

/// Two-qubit dynamics in the Pauli basis.
#[derive(Parser, Debug)]
#[command(name = "pauliflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Time for `map`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    t: Option<f64>,

    /// Final time for `evolve`.
    #[arg(long = "t-max", global = true, allow_negative_numbers = true)]
    t_max: Option<f64>,

    /// Sampling step.
    #[arg(long, global = true, allow_negative_numbers = true)]
    dt: Option<f64>,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for generated baths and `oracle-check`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of random scenarios for `oracle-check`.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Trajectory CSV under one coupling or a schedule.
    Evolve,
    /// Reduced dynamical map as JSON.
    Map,
    /// Collision-model trajectory CSV.
    Collide,
    /// Schedule optimization result as JSON.
    Optimize,
    /// Time of maximal entanglement as JSON.
    Bell,
    /// Closed forms against brute-force matrices.
    OracleCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Evolve => Command::Evolve,
            Cmd::Map => Command::Map,
            Cmd::Collide => Command::Collide,
            Cmd::Optimize => Command::Optimize,
            Cmd::Bell => Command::Bell,
            Cmd::OracleCheck => Command::OracleCheck,
        }
    }
}

fn write(e: &Emission) -> Result<(), CliError> {
    match &e.path {
        Some(p) => std::fs::write(p, &e.contents)?,
        None => print!("{}", e.contents),
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let command = Command::from(cli.command);
    let cfg = match (&cli.config, command) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Command::OracleCheck) => RunConfig::default(),
        (None, _) => return Err(CliError::Config("--config FILE is required".into())),
    };
    let opts = Options {
        t: cli.t,
        t_max: cli.t_max,
        dt: cli.dt,
        out: cli.out,
        seed: cli.seed,
        samples: cli.samples,
        gnuplot: cli.gnuplot,
    };
    let report = run(command, &cfg, &opts)?;
    for e in &report.emissions {
        write(e)?;
    }
    report.failure.map_or(Ok(()), Err)
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pauliflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
