//! Command-line front end: argument and config-file handling, job
//! execution and reports.

pub mod args;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

use std::io::Write;

use args::{Cli, Command, JobArgs, ZooAction};
use config::{Job, RunConfig};
use convexcert_core::zoo::ZooRegistry;
use report::{ReportDocument, EXIT_ERROR, EXIT_OK};

pub use error::CliError;

/// Runs one parsed command line and returns the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    let (job, args) = match cli.command {
        Command::Zoo { action: ZooAction::List } => {
            for line in ZooRegistry::standard().list_lines() {
                println!("{line}");
            }
            return EXIT_OK;
        }
        Command::Certify(a) => (Job::Certify, a),
        Command::Conjugate(a) => (Job::Conjugate, a),
        Command::Duality(a) => (Job::Duality, a),
    };
    run_job(job, &args)
}

fn run_job(job: Job, args: &JobArgs) -> i32 {
    let report = match RunConfig::load(job, args) {
        Ok((cfg, subject)) => run::execute(&cfg, &subject),
        Err(e) => {
            let mut r = ReportDocument::new(None);
            r.error = Some(e.to_string());
            r.exit_status = EXIT_ERROR;
            r
        }
    };
    let out = report
        .config
        .as_ref()
        .and_then(|c| c.out.clone())
        .or_else(|| args.out.clone());
    let mut status = report.exit_status;
    if let Some(path) = out {
        if let Err(e) = run::write_report(&report, &path) {
            eprintln!("error: {e}");
            status = EXIT_ERROR;
        }
    }
    // Stdout carries the table when a conjugate job has no --csv.
    let table_on_stdout = report
        .config
        .as_ref()
        .is_some_and(|c| c.job == Job::Conjugate && c.csv.is_none());
    let summary = report.summary();
    if table_on_stdout || report.error.is_some() {
        eprint!("{summary}");
    } else {
        print!("{summary}");
        let _ = std::io::stdout().flush();
    }
    status
}
