//! Job-file driven command-line front end.

mod job;
mod render;
mod report;
mod run;
mod sample;

use std::io::Read;
use std::path::PathBuf;

use clap::Parser;

pub use job::{parse_job, Action, Construction, GridSpec, Job, JobError, ModelSpec, Selector};
pub use render::{fmt_num, render_potential, render_report};
pub use report::{reverify, Check, Diagnostics, Pair, PotentialRecord, Report, StateRecord};
pub use run::{run_job, sector_energies, RunError};
pub use sample::sample_grid;

#[derive(Debug, Parser)]
#[command(name = "qesdx", version, about = "Darboux-transformed sextic oscillator potentials")]
pub struct Args {
    /// Job file (JSON); read from standard input when absent.
    #[arg(long)]
    pub job: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a grid sample (CSV) here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Residual tolerance for pass/fail.
    #[arg(long, default_value_t = crate::oracle::RESIDUAL_TOL)]
    pub tolerance: f64,
}

fn read_input(args: &Args) -> Result<String, String> {
    match &args.job {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("standard input: {e}"))?;
            Ok(text)
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the command line and returns the process exit code.
///
/// The JSON report goes to `--out` (or the job's `out`), otherwise to
/// standard output. The rendered summary goes to standard output when the
/// report is written to a file and to standard error otherwise. A `sample`
/// job without a CSV destination prints the CSV on standard output.
pub fn execute(args: &Args) -> i32 {
    if !(args.tolerance > 0.0 && args.tolerance.is_finite()) {
        eprintln!("error: --tolerance must be positive");
        return 1;
    }
    let text = match read_input(args) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let job = match parse_job(&text) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let report = match run_job(&job, args.tolerance) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };

    let out = args.out.clone().or_else(|| job.out.clone());
    let csv = args.csv.clone().or_else(|| job.csv.clone());
    let csv_to_stdout = csv.is_none() && job.action == Action::Sample;
    if csv.is_some() || csv_to_stdout {
        let table = match sample_grid(&job.grid, &report) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: sampling failed: {e}");
                return 2;
            }
        };
        match &csv {
            Some(path) => {
                if let Err(e) = write_file(path, &table) {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
            None => print!("{table}"),
        }
    }

    let json = serde_json::to_string_pretty(&report).expect("reports serialize");
    let summary = render_report(&report);
    match &out {
        Some(path) => {
            if let Err(e) = write_file(path, &(json + "\n")) {
                eprintln!("error: {e}");
                return 1;
            }
            if csv_to_stdout {
                eprint!("{summary}");
            } else {
                print!("{summary}");
            }
        }
        None => {
            if !csv_to_stdout {
                println!("{json}");
            }
            eprint!("{summary}");
        }
    }
    report.exit_code()
}
