//! Job execution: certify, conjugate and duality runs producing a report.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use convexcert_core::certify::{check, Claims};
use convexcert_core::conjugate::{engine, GridFunction};
use convexcert_core::duality::verify_entry;
use serde::Serialize;

use crate::config::{Job, RunConfig, Subject};
use crate::error::CliError;
use crate::report::{ConjugateSummary, ReportDocument, EXIT_ERROR, EXIT_OK, EXIT_VIOLATED};

/// Runs a resolved job. Evaluation errors are recorded in the report with
/// exit status 2 rather than returned.
pub fn execute(cfg: &RunConfig, subject: &Subject) -> ReportDocument {
    let mut report = ReportDocument::new(Some(cfg.clone()));
    let start = Instant::now();
    let outcome = match cfg.job {
        Job::Certify => certify(cfg, subject, &mut report),
        Job::Duality => duality(cfg, subject, &mut report),
        Job::Conjugate => conjugate(cfg, subject, &mut report),
    };
    report.timing.insert("total".into(), start.elapsed().as_secs_f64());
    match outcome {
        Ok(status) => report.exit_status = status,
        Err(e) => {
            report.error = Some(e.to_string());
            report.exit_status = EXIT_ERROR;
        }
    }
    report
}

fn certify(cfg: &RunConfig, subject: &Subject, report: &mut ReportDocument) -> Result<i32, CliError> {
    let oracle = subject.oracle();
    let known = subject.constants();
    let claims = Claims {
        mu: cfg.mu.or(known.known_mu.filter(|m| *m > 0.0)),
        l: cfg.l.or(known.known_l),
        f_min: known.known_min_value,
    };
    let plan = cfg.plan()?;
    let mut status = EXIT_OK;
    for &id in &cfg.checks {
        let t = Instant::now();
        let v = check(id, &oracle, &claims, subject.zoo(), &plan)?;
        report.timing.insert(id.as_str().to_string(), t.elapsed().as_secs_f64());
        if !v.holds {
            status = EXIT_VIOLATED;
        }
        report.verdicts.push(v);
    }
    Ok(status)
}

fn duality(cfg: &RunConfig, subject: &Subject, report: &mut ReportDocument) -> Result<i32, CliError> {
    let mut entry = subject.as_entry(&cfg.domain());
    if cfg.mu.is_some() {
        entry.constants.known_mu = cfg.mu;
    }
    if cfg.l.is_some() {
        entry.constants.known_l = cfg.l;
    }
    let reports = verify_entry(&entry, &cfg.plan()?)?;
    let status = if reports.iter().all(|r| r.bound_satisfied) {
        EXIT_OK
    } else {
        EXIT_VIOLATED
    };
    report.duality = reports;
    Ok(status)
}

/// Slopes lo, lo + step, … up to hi; empty when lo > hi.
pub fn slope_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if lo > hi {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|k| lo + k as f64 * step).collect()
}

#[derive(Serialize)]
struct Sidecar<'a> {
    #[serde(rename = "box")]
    bounds: [f64; 2],
    grid_n: usize,
    engine: &'a str,
    n_slopes: usize,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn conjugate(cfg: &RunConfig, subject: &Subject, report: &mut ReportDocument) -> Result<i32, CliError> {
    let [lo, hi] = cfg.bounds[0];
    let [s_lo, s_hi] = cfg.slopes.expect("set for conjugate jobs");
    let grid_n = cfg.grid.expect("set for conjugate jobs");
    let name = cfg.engine.as_deref().expect("set for conjugate jobs");
    let slopes = slope_range(s_lo, s_hi, cfg.step.expect("set for conjugate jobs"));
    let g = GridFunction::sample(&subject.oracle(), lo, hi, grid_n)?;
    let t = Instant::now();
    let table = engine(name)?.transform(&g, &slopes)?;
    report.timing.insert("transform".into(), t.elapsed().as_secs_f64());
    let boundary = table
        .argmax_index
        .iter()
        .filter(|&&i| i == 0 || i + 1 == grid_n)
        .count();
    match &cfg.csv {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            table.write_csv(BufWriter::new(file))?;
            let side = Sidecar {
                bounds: [lo, hi],
                grid_n,
                engine: name,
                n_slopes: slopes.len(),
            };
            let json = serde_json::to_string_pretty(&side).expect("sidecar serializes");
            let sp = sidecar_path(path);
            std::fs::write(&sp, json + "\n").map_err(|e| CliError::io(&sp, e))?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    report.conjugate = Some(ConjugateSummary {
        engine: name.to_string(),
        grid_n,
        n_slopes: slopes.len(),
        boundary_maximizers: boundary,
        csv: cfg.csv.as_ref().map(|p| p.display().to_string()),
    });
    Ok(EXIT_OK)
}

/// Writes the JSON report to `path`.
pub fn write_report(report: &ReportDocument, path: &Path) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(f, "{}", report.to_json()).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_ranges() {
        assert_eq!(slope_range(-1.0, 1.0, 0.5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(slope_range(0.0, 0.3, 0.1).len(), 4);
        assert_eq!(slope_range(2.0, 2.0, 0.1), vec![2.0]);
        assert!(slope_range(1.0, -1.0, 0.1).is_empty());
    }

    #[test]
    fn sidecar_sits_next_to_the_table() {
        assert_eq!(sidecar_path(Path::new("out/t.csv")), PathBuf::from("out/t.csv.json"));
    }
}
