use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use attribute_autonomy::cli::{cmd_classify, cmd_run, cmd_sweep};

#[derive(Parser)]
#[command(version, about = "Seeded simulator of agents autonomous with regard to an attribute")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation; writes report.txt and trace.tsv
    Run {
        scenario: PathBuf,
        /// Output directory (defaults to the scenario's output_dir)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run K simulations over consecutive seeds and print choice frequencies
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        runs: u64,
        /// First seed (defaults to the scenario's seed)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the model comparison table and the agent's attribute verdicts
    Classify { scenario: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run { scenario, out } => cmd_run(&scenario, out.as_deref()).map(|a| {
            eprintln!(
                "halted: {} after {} steps; wrote {} and {}",
                a.halt_reason,
                a.steps,
                a.report_path.display(),
                a.trace_path.display()
            );
        }),
        Command::Sweep { scenario, runs, seed } => cmd_sweep(&scenario, runs, seed).map(|t| print!("{t}")),
        Command::Classify { scenario } => cmd_classify(&scenario).map(|t| print!("{t}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
