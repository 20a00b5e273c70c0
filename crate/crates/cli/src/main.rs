use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use twoway_cli::{parse_config, run, CliError, Command};

/// Secret key rates of two-way CV-QKD with optical amplifiers at the receiver.
#[derive(Parser, Debug)]
#[command(name = "twoway-cvqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Configuration file (TOML); built-in defaults when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the CSV here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override one key, e.g. --set channel.excess_noise=0.05 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo sample count
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Key rate, mutual information and Holevo bound of the base configuration
    Keyrate,
    /// Key rate of every comparison configuration over the [sweep] grid
    Sweep,
    /// Largest PIA inherent noise that still pays off at the channel distance
    TolerableNoise,
    /// Tolerable noise over the [surface] (gain, distance) grid
    Surface,
    /// Distance at which each comparison configuration stops producing key
    MaxDistance,
    /// Monte Carlo cross-check of the covariance computation
    Validate,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Keyrate => Command::KeyRate,
            Cmd::Sweep => Command::Sweep,
            Cmd::TolerableNoise => Command::TolerableNoise,
            Cmd::Surface => Command::Surface,
            Cmd::MaxDistance => Command::MaxDistance,
            Cmd::Validate => Command::Validate,
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    let mut overrides = cli.set.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("montecarlo.seed={seed}"));
    }
    if let Some(n) = cli.samples {
        overrides.push(format!("montecarlo.samples={n}"));
    }
    let cfg = parse_config(&text, &overrides)?;
    let report = run(cli.command.into(), &cfg)?;
    let csv = report.table.render();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })?;
            for line in &report.summary {
                println!("{line}");
            }
        }
        None => {
            print!("{csv}");
            for line in &report.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(report.success)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
