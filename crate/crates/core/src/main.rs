use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};

use measinfo::cli::{self, CliError, Settings, SweepConfig};
use measinfo::receivers::Scheme;

#[derive(Parser)]
#[command(name = "measinfo", version, about = "Information budgets of binary coherent-state receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate receivers over a mean-photon-number grid and write CSV or JSON lines.
    Sweep(Common),
    /// Print the information breakdown of a single scenario.
    Report(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = PossibleValuesParser::new(Scheme::names()))]
    scheme: Option<String>,
    /// start:stop:step, or a single value.
    #[arg(long)]
    alpha2: Option<String>,
    /// Prior of |α⟩ (default 0.5).
    #[arg(long)]
    priors: Option<f64>,
    /// Displacement for photon counting: a number, `kennedy` or `opt` (default).
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    stages: Option<usize>,
    /// Fixed interaction angle(s), comma-separated per stage; optimized when absent.
    #[arg(long)]
    theta: Option<String>,
    /// Fock truncation; chosen from the amplitude when absent.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "jsonl"])]
    format: Option<String>,
    #[arg(long, value_parser = ["fig1a", "fig1b", "fig1c", "fig1d"])]
    preset: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for randomized accessible-information searches.
    #[arg(long)]
    seed: Option<u64>,
    /// Flat JSON object with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn settings(self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::from_json_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            scheme: self.scheme,
            preset: self.preset,
            alpha2: self.alpha2,
            priors: self.priors,
            beta: self.beta,
            stages: self.stages,
            theta: self.theta,
            n_max: self.n_max,
            out: self.out,
            format: self.format,
            workers: self.workers,
            seed: self.seed,
        };
        Ok(flags.or(file))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = SweepConfig::resolve(args.settings()?)?;
            cli::sweep(&cfg)?;
        }
        Command::Report(args) => {
            let cfg = SweepConfig::resolve_single(args.settings()?)?;
            print!("{}", cli::report(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("measinfo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
