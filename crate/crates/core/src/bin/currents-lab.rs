use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use currents_lab::runner::{list_builtin, run_file, summary_lines, write_reports, RunOptions};

#[derive(Parser)]
#[command(name = "currents-lab", version, about = "Run intersection scenarios for currents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV tables plus summary.json.
    Run {
        file: PathBuf,
        /// Output directory (default: ./out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized test forms.
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate everything on one thread.
        #[arg(long)]
        serial: bool,
        /// Tolerance applied to every task.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List bump profiles, chart kinds, task kinds and checks.
    ListBuiltin {
        #[arg(long)]
        json: bool,
    },
}

/// Applies CURRENTS_LAB_THREADS; returns true when it asks for serial runs.
fn configure_threads() -> Result<bool, String> {
    let Ok(v) = std::env::var("CURRENTS_LAB_THREADS") else {
        return Ok(false);
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CURRENTS_LAB_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    Ok(n == 1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListBuiltin { json } => {
            print!("{}", list_builtin(json));
            if json {
                println!();
            }
            ExitCode::SUCCESS
        }
        Command::Run { file, out, seed, serial, tol } => {
            let serial_env = match configure_threads() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(t) = tol {
                if !(t > 0.0) {
                    eprintln!("error: --tol must be positive");
                    return ExitCode::from(2);
                }
            }
            let opts = RunOptions { seed, serial: serial || serial_env, tol };
            let report = match run_file(&file, &opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&report.scenario));
            if let Err(e) = write_reports(&report, &dir) {
                eprintln!("error: cannot write reports to {}: {e}", dir.display());
                return ExitCode::from(2);
            }
            for line in summary_lines(&report) {
                println!("{line}");
            }
            println!("reports written to {}", dir.display());
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
