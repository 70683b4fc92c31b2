use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use drivosc::scenario::run_scenario_file;
use drivosc::verify::{verify, Level};

/// Driven quantum oscillator: evolve states and write wavefunction, Wigner
/// and tomogram CSV files.
#[derive(Parser)]
#[command(name = "drivosc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario file.
    Run {
        config: PathBuf,
        /// Output directory; overrides the scenario's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => match run_scenario_file(&config, out.as_deref()) {
            Ok(report) => {
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                println!("wrote {} files to {}", report.files.len(), report.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Verify { fast: _, full } => {
            let report = verify(if full { Level::Full } else { Level::Fast });
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
