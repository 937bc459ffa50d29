use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use risbeam_cli::commands::{self, ComplexityArgs, SimulateArgs, Source};
use risbeam_cli::presets::preset_names;
use risbeam_cli::CliError;

#[derive(Parser)]
#[command(name = "risbeam", version, about = "RIS-aided THz multi-user MIMO link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sum-rate sweep over transmit power.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        /// Output directory for CSVs, config snapshot and manifest.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Spacings, field boundary and per-user regime of a scenario.
    Geometry {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Beam search cost per scheme, as CSV.
    Complexity {
        /// Dictionary sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [3u64, 9, 27, 81, 243, 729])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 0.1)]
        error_radius: f64,
        #[arg(long, default_value_t = 3.0)]
        distance: f64,
        #[arg(long, default_value_t = 0.5)]
        resolution_deg: f64,
    },
    /// List built-in presets.
    Presets,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Scenario TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
}

impl SourceArgs {
    fn source(self) -> Source {
        match (self.config, self.preset) {
            (Some(path), _) => Source::File(path),
            (None, Some(name)) => Source::Preset(name),
            (None, None) => unreachable!("clap requires one of --config/--preset"),
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate {
            source,
            out,
            seed,
            trials,
        } => commands::simulate(&SimulateArgs {
            source: source.source(),
            out,
            seed,
            trials,
        }),
        Command::Geometry { source } => commands::geometry(&source.source()),
        Command::Complexity {
            n,
            error_radius,
            distance,
            resolution_deg,
        } => commands::complexity(
            &n,
            ComplexityArgs {
                error_radius,
                distance,
                resolution_deg,
            },
        ),
        Command::Presets => Ok(preset_names().map(|n| format!("{n}\n")).collect()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
