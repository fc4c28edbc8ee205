use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hubkin_cli::error::{exit, CliError};
use hubkin_cli::{bench, config, init_threads, manifold, output, run};

#[derive(Parser)]
#[command(
    name = "hubkin",
    version,
    about = "Kinetic simulation of the weakly interacting Hubbard chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write trajectory, snapshots and fits.
    Run {
        /// Scenario config, or the manifest of an earlier run.
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Predict the stationary state only.
    Predict {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Time single steps over a range of grid sizes.
    Bench {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Write energy-balance tables and on-grid collision contours.
    ExportManifold {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print a built-in scenario as JSON.
    Preset {
        #[arg(value_parser = config::PRESETS)]
        name: String,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Run { config, output_dir } => {
            let spec = run::load_spec(&config, output_dir)?;
            let manifest = run::run(&spec)?;
            println!(
                "{}: {} of {} steps in {:.3} s, output in {}",
                spec.name,
                manifest.steps_taken,
                manifest.steps_planned,
                manifest.total_seconds,
                spec.output_dir.display()
            );
            if let Some(reason) = manifest.failure() {
                return Err(CliError::RunFailed(reason));
            }
        }
        Command::Predict { config, output_dir } => {
            let spec = run::load_spec(&config, output_dir)?;
            let file = run::predict(&spec)?;
            println!(
                "a_up = {}\na_down = {}",
                output::num(file.a_up),
                output::num(file.a_down)
            );
        }
        Command::Bench { config, output_dir } => {
            let spec = run::load_spec(&config, output_dir)?;
            let report = bench::bench(&spec)?;
            for s in &report.sizes {
                println!(
                    "n = {:4}: {:.3e} s/step (median {:.3e}, {} steps)",
                    s.n, s.min_seconds, s.median_seconds, s.repetitions
                );
            }
            println!("exponent = {:.3}", report.exponent);
            output::write_json(&spec.output_dir.join("bench.json"), &report)?;
        }
        Command::ExportManifold { config, output_dir } => {
            let spec = run::load_spec(&config, output_dir)?;
            for name in manifold::export(&spec)? {
                println!("{}", spec.output_dir.join(name).display());
            }
        }
        Command::Preset { name } => {
            let spec = config::preset(&name).expect("validated by clap");
            println!(
                "{}",
                serde_json::to_string_pretty(&spec).expect("serializable")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::CONFIG as u8
            } else {
                0
            });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
