//! Runs a scenario file through the library instead of the command line and
//! prints its convergence tables.
//!
//!     cargo run --release --example run_scenario -- scenarios/tangency.json

use std::path::PathBuf;

use currents_lab::runner::{csv_table, run_file, summary_lines, RunOptions};

fn main() -> currents_lab::error::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "scenarios/kronecker.json".into());
    let report = run_file(&path, &RunOptions { seed: None, serial: false, tol: None })?;
    println!("{}: {}", report.scenario, report.comment);
    for t in &report.tasks {
        println!("\n{}", t.name);
        print!("{}", csv_table(&t.rows));
    }
    println!();
    for line in summary_lines(&report) {
        println!("{line}");
    }
    Ok(())
}
