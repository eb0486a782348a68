use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfirob_cli::{run, Experiment};

#[derive(Parser)]
#[command(name = "qfirob", version, about = "Robustness of quantum metrology probes against quenched disorder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Moment-expansion report (report.json)
    Report(RunArgs),
    /// Monte Carlo marker sweep over σ (sweep.csv, report.json)
    SweepSigma(RunArgs),
    /// Closed-form single-qubit coefficients and β scan
    SingleQubit(RunArgs),
    /// C^(2) over a (τ0, η0) grid of the Kitaev chain (plane.csv)
    KitaevPlane(RunArgs),
    /// DEP/DSP crossover time of the single qubit (crossover.csv)
    Crossover(RunArgs),
    /// Monte Carlo marker against the moment-expansion prediction
    McValidate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// INI-style configuration file
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overrides `[run] seed`
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overrides `[run] output`
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("QFIROB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("QFIROB_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("qfirob: config error: {e}");
        return ExitCode::from(2);
    }
    let (experiment, args) = match cli.command {
        Command::Report(a) => (Experiment::Report, a),
        Command::SweepSigma(a) => (Experiment::SweepSigma, a),
        Command::SingleQubit(a) => (Experiment::SingleQubit, a),
        Command::KitaevPlane(a) => (Experiment::KitaevPlane, a),
        Command::Crossover(a) => (Experiment::Crossover, a),
        Command::McValidate(a) => (Experiment::McValidate, a),
    };
    match run(experiment, &args.config, args.seed, args.out) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qfirob: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
