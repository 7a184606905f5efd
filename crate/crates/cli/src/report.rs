//! The JSON report and its one-screen text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use convexcert_core::certify::CertVerdict;
use convexcert_core::duality::{Direction, DualityReport};
use serde::Serialize;

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateSummary {
    pub engine: String,
    pub grid_n: usize,
    pub n_slopes: usize,
    /// Slopes whose maximizer sits on the edge of the primal grid: there
    /// the table is a truncated conjugate.
    pub boundary_maximizers: usize,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Option<RunConfig>,
    pub verdicts: Vec<CertVerdict>,
    pub duality: Vec<DualityReport>,
    pub conjugate: Option<ConjugateSummary>,
    pub error: Option<String>,
    pub exit_status: i32,
    /// Wall-clock seconds per stage; the only nondeterministic field.
    pub timing: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(config: Option<RunConfig>) -> Self {
        ReportDocument {
            tool: "convexcert",
            version: env!("CARGO_PKG_VERSION"),
            config,
            verdicts: Vec::new(),
            duality: Vec::new(),
            conjugate: None,
            error: None,
            exit_status: EXIT_OK,
            timing: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        if let Some(cfg) = &self.config {
            let _ = writeln!(s, "{} {} on {:?}, seed {}", cfg.job, cfg.function, cfg.bounds, cfg.seed);
        }
        for v in &self.verdicts {
            let status = if v.holds { "holds" } else { "VIOLATED" };
            let _ = write!(
                s,
                "{:<16} {:<8} worst margin {:>12.4e}  ({} evaluated, {} skipped)",
                v.condition_id.as_str(),
                status,
                v.worst_margin,
                v.n_evaluated,
                v.n_skipped
            );
            if let (false, Some(w)) = (v.holds, &v.witness) {
                let _ = write!(s, "  at x={:?} y={:?} alpha={}", w.x.as_slice(), w.y.as_slice(), w.alpha);
            }
            s.push('\n');
        }
        for d in &self.duality {
            let (name, value) = match (d.l_conj, d.mu_conj) {
                (Some(l), _) => ("L*", l),
                (None, Some(m)) => ("mu*", m),
                _ => ("-", f64::NAN),
            };
            let _ = writeln!(
                s,
                "{} {}: {name} = {value:.6}, bound {:.6}, {}",
                match d.direction {
                    Direction::ScToSmooth => "SC -> smooth",
                    Direction::SmoothToSc => "smooth -> SC",
                },
                d.entry,
                d.bound,
                if d.bound_satisfied { "satisfied" } else { "NOT satisfied" }
            );
        }
        if let Some(c) = &self.conjugate {
            let _ = writeln!(
                s,
                "conjugate: {} slopes, grid {}, engine {}, {} boundary maximizers",
                c.n_slopes, c.grid_n, c.engine, c.boundary_maximizers
            );
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "error: {e}");
        }
        s
    }
}
