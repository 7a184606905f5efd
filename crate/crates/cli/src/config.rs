//! Run configuration: flags and a flat `key = value` file, merged with
//! flags taking precedence, then resolved into a [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use convexcert_core::certify::{ConditionId, Family};
use convexcert_core::expr::{parse_expression, Expression};
use convexcert_core::oracle::ScalarConstants;
use convexcert_core::zoo::{ZooEntry, ZooParams, ZooRegistry};
use convexcert_core::{AxisBox, FunctionOracle, SamplingPlan};
use serde::Serialize;

use crate::args::JobArgs;
use crate::error::CliError;

pub const SEED_ENV: &str = "CONVEXCERT_SEED";
pub const DEFAULT_PAIRS: usize = 1000;
pub const DEFAULT_ALPHAS: usize = 3;
pub const DEFAULT_SLOPES: [f64; 2] = [-3.0, 3.0];
pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_GRID: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Job {
    Certify,
    Conjugate,
    Duality,
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Job::Certify => "certify",
            Job::Conjugate => "conjugate",
            Job::Duality => "duality",
        })
    }
}

/// Every setting as optionally given by one source.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Settings {
    pub func: Option<String>,
    pub dim: Option<usize>,
    pub zoo: Option<String>,
    pub diag: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub bounds: Option<Vec<[f64; 2]>>,
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub n: Option<usize>,
    pub alphas: Option<usize>,
    pub seed: Option<u64>,
    pub fd_step: Option<f64>,
    pub checks: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub slopes: Option<[f64; 2]>,
    pub step: Option<f64>,
    pub grid: Option<usize>,
    pub engine: Option<String>,
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Settings {
    pub fn from_args(a: &JobArgs) -> Settings {
        Settings {
            func: a.func.clone(),
            dim: a.dim,
            zoo: a.zoo.clone(),
            diag: nonempty(a.diag.clone()),
            delta: a.delta,
            bounds: nonempty(a.bounds.chunks(2).map(|c| [c[0], c[1]]).collect()),
            mu: a.mu,
            l: a.l,
            n: a.n,
            alphas: a.alphas,
            seed: a.seed,
            fd_step: a.fd_step,
            checks: nonempty(a.checks.clone()),
            out: a.out.clone(),
            csv: a.csv.clone(),
            slopes: (a.slopes.len() == 2).then(|| [a.slopes[0], a.slopes[1]]),
            step: a.step,
            grid: a.grid,
            engine: a.engine.clone(),
        }
    }

    /// Values present in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            func: over.func.or(self.func),
            dim: over.dim.or(self.dim),
            zoo: over.zoo.or(self.zoo),
            diag: over.diag.or(self.diag),
            delta: over.delta.or(self.delta),
            bounds: over.bounds.or(self.bounds),
            mu: over.mu.or(self.mu),
            l: over.l.or(self.l),
            n: over.n.or(self.n),
            alphas: over.alphas.or(self.alphas),
            seed: over.seed.or(self.seed),
            fd_step: over.fd_step.or(self.fd_step),
            checks: over.checks.or(self.checks),
            out: over.out.or(self.out),
            csv: over.csv.or(self.csv),
            slopes: over.slopes.or(self.slopes),
            step: over.step.or(self.step),
            grid: over.grid.or(self.grid),
            engine: over.engine.or(self.engine),
        }
    }

    pub fn parse_file(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::config(line_no, format!("expected `key = value`, got `{line}`")))?;
            if value.is_empty() {
                return Err(CliError::config(line_no, format!("`{key}` has no value")));
            }
            s.set(key, value).map_err(|m| CliError::config(line_no, m))?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn once<T>(slot: &mut Option<T>, key: &str, v: T) -> Result<(), String> {
            if slot.is_some() {
                return Err(format!("duplicate key `{key}`"));
            }
            *slot = Some(v);
            Ok(())
        }
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse()
                .map_err(|_| format!("`{key}` expects a number, got `{v}`"))
        }
        fn pair(key: &str, v: &str) -> Result<[f64; 2], String> {
            let parts: Vec<&str> = v.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(format!("`{key}` expects `LO HI`, got `{v}`"));
            }
            Ok([num(key, parts[0])?, num(key, parts[1])?])
        }
        match key {
            "func" => once(&mut self.func, key, value.to_string()),
            "dim" => once(&mut self.dim, key, num(key, value)?),
            "zoo" => once(&mut self.zoo, key, value.to_string()),
            "diag" => {
                let d = value
                    .split(',')
                    .map(|p| num(key, p.trim()))
                    .collect::<Result<Vec<f64>, _>>()?;
                once(&mut self.diag, key, d)
            }
            "delta" => once(&mut self.delta, key, num(key, value)?),
            "box" => {
                self.bounds.get_or_insert_with(Vec::new).push(pair(key, value)?);
                Ok(())
            }
            "mu" => once(&mut self.mu, key, num(key, value)?),
            "L" | "l" => once(&mut self.l, key, num(key, value)?),
            "n" => once(&mut self.n, key, num(key, value)?),
            "alphas" => once(&mut self.alphas, key, num(key, value)?),
            "seed" => once(&mut self.seed, key, num(key, value)?),
            "fd_step" => once(&mut self.fd_step, key, num(key, value)?),
            "check" => {
                let list = self.checks.get_or_insert_with(Vec::new);
                list.extend(
                    value
                        .split([',', ' '])
                        .filter(|p| !p.is_empty())
                        .map(str::to_string),
                );
                Ok(())
            }
            "out" => once(&mut self.out, key, PathBuf::from(value)),
            "csv" => once(&mut self.csv, key, PathBuf::from(value)),
            "slopes" => once(&mut self.slopes, key, pair(key, value)?),
            "step" => once(&mut self.step, key, num(key, value)?),
            "grid" => once(&mut self.grid, key, num(key, value)?),
            "engine" => once(&mut self.engine, key, value.to_string()),
            other => Err(format!("unknown key `{other}`")),
        }
    }
}

/// Where the function comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSource {
    Expression { text: String, dim: usize },
    Zoo {
        name: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        diag: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

impl fmt::Display for FunctionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSource::Expression { text, .. } => write!(f, "`{text}`"),
            FunctionSource::Zoo { name, .. } => write!(f, "zoo:{name}"),
        }
    }
}

/// Fully resolved configuration, echoed in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub job: Job,
    pub function: FunctionSource,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub n: usize,
    pub alphas: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub checks: Vec<ConditionId>,
    pub mu: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slopes: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
}

/// The function a job runs on.
#[derive(Debug, Clone)]
pub enum Subject {
    Expression(Expression),
    Zoo(ZooEntry),
}

impl Subject {
    pub fn oracle(&self) -> FunctionOracle {
        match self {
            Subject::Expression(e) => e.oracle(),
            Subject::Zoo(z) => z.oracle.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.oracle().dim()
    }

    pub fn zoo(&self) -> Option<&ZooEntry> {
        match self {
            Subject::Zoo(z) => Some(z),
            Subject::Expression(_) => None,
        }
    }

    pub fn constants(&self) -> ScalarConstants {
        self.zoo().map(|z| z.constants.clone()).unwrap_or_default()
    }

    /// An entry for the duality job: zoo entries as stored, expressions
    /// with no conjugate and convexity from the curvature rules.
    pub fn as_entry(&self, domain: &AxisBox) -> ZooEntry {
        match self {
            Subject::Zoo(z) => ZooEntry {
                default_box: domain.clone(),
                ..z.clone()
            },
            Subject::Expression(e) => ZooEntry {
                name: e.to_string(),
                oracle: e.oracle(),
                constants: ScalarConstants::default(),
                conjugate: None,
                conjugate_domain: None,
                convex: e.curvature().is_convex(),
                default_box: domain.clone(),
            },
        }
    }
}

fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| invalid(format!("${SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::invalid(message)
}

/// Checks run when none are requested: the convexity forms, plus the strong
/// convexity forms when μ is known, plus the smoothness forms when L is.
fn default_checks(mu: Option<f64>, l: Option<f64>, smooth: bool) -> Vec<ConditionId> {
    let mut out = ConditionId::of_family(Family::Convexity);
    if mu.is_some() {
        out = ConditionId::of_family(Family::StrongConvexity);
    }
    if l.is_some() && smooth {
        if mu.is_none() {
            out.clear();
        }
        out.extend(ConditionId::of_family(Family::Smoothness));
    }
    out
}

impl RunConfig {
    /// Reads the config file (if any), overlays the flags and resolves
    /// defaults, building the function on the way.
    pub fn load(job: Job, args: &JobArgs) -> Result<(RunConfig, Subject), CliError> {
        let file = match &args.config {
            Some(path) => Settings::parse_file(&read_config(path)?)
                .map_err(|e| e.in_file(path))?,
            None => Settings::default(),
        };
        RunConfig::resolve(job, file.overlay(Settings::from_args(args)))
    }

    pub fn resolve(job: Job, s: Settings) -> Result<(RunConfig, Subject), CliError> {
        let registry = ZooRegistry::standard();
        let (function, subject) = match (&s.func, &s.zoo) {
            (Some(_), Some(_)) => return Err(invalid("give either `func` or `zoo`, not both")),
            (None, None) => return Err(invalid("no function: give `func` (with `dim`) or `zoo`")),
            (Some(text), None) => {
                let dim = s.dim.unwrap_or(1);
                let expr = parse_expression(text, dim)?;
                (
                    FunctionSource::Expression {
                        text: text.clone(),
                        dim,
                    },
                    Subject::Expression(expr),
                )
            }
            (None, Some(name)) => {
                let params = ZooParams {
                    diag: s.diag.clone(),
                    delta: s.delta,
                    dim: s.dim,
                };
                let entry = registry.build(name, &params)?;
                (
                    FunctionSource::Zoo {
                        name: name.clone(),
                        diag: s.diag.clone(),
                        delta: s.delta,
                        dim: s.dim,
                    },
                    Subject::Zoo(entry),
                )
            }
        };
        let dim = subject.dim();
        let bounds = match (&s.bounds, subject.zoo()) {
            (Some(b), _) if b.len() == dim => b.clone(),
            (Some(b), _) if b.len() == 1 => vec![b[0]; dim],
            (Some(b), _) => {
                return Err(invalid(format!(
                    "{} box axes given for a {dim}-dimensional function",
                    b.len()
                )))
            }
            (None, Some(z)) => (0..dim)
                .map(|i| [z.default_box.lo()[i], z.default_box.hi()[i]])
                .collect(),
            (None, None) => return Err(invalid("an expression needs `box`")),
        };
        let pairs: Vec<(f64, f64)> = bounds.iter().map(|b| (b[0], b[1])).collect();
        AxisBox::from_bounds(&pairs)?;

        let constants = subject.constants();
        for (name, v) in [("mu", s.mu), ("L", s.l)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(format!("`{name}` must be > 0, got {v}")));
                }
            }
        }
        let mu = s.mu.or(constants.known_mu.filter(|m| *m > 0.0));
        let l = s.l.or(constants.known_l);

        let checks = match (&s.checks, job) {
            (Some(list), _) => list
                .iter()
                .map(|c| {
                    ConditionId::from_str(c).map_err(|_| invalid(format!("unknown check `{c}`")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, Job::Certify) => default_checks(mu, l, subject.oracle().is_smooth()),
            (None, _) => Vec::new(),
        };
        if job != Job::Certify && !checks.is_empty() {
            return Err(invalid(format!("`check` only applies to certify, not {job}")));
        }

        let seed = match s.seed {
            Some(v) => v,
            None => seed_from_env()?.unwrap_or(0),
        };
        let conjugate = job == Job::Conjugate;
        if conjugate && dim != 1 {
            return Err(invalid("the conjugate table needs a 1-dimensional function"));
        }
        let cfg = RunConfig {
            job,
            function,
            bounds,
            n: s.n.unwrap_or(DEFAULT_PAIRS),
            alphas: s.alphas.unwrap_or(DEFAULT_ALPHAS),
            seed,
            fd_step: s.fd_step.unwrap_or(convexcert_core::oracle::DEFAULT_FD_STEP),
            checks,
            mu: s.mu,
            l: s.l,
            out: s.out,
            csv: s.csv,
            slopes: conjugate.then(|| s.slopes.unwrap_or(DEFAULT_SLOPES)),
            step: conjugate.then(|| s.step.unwrap_or(DEFAULT_STEP)),
            grid: conjugate.then(|| s.grid.unwrap_or(DEFAULT_GRID)),
            engine: conjugate.then(|| s.engine.unwrap_or_else(|| "llt".to_string())),
        };
        cfg.plan()?.validate()?;
        if let Some(step) = cfg.step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(invalid(format!("`step` must be > 0, got {step}")));
            }
        }
        if let Some(grid) = cfg.grid {
            if grid < 2 {
                return Err(invalid("`grid` must be >= 2"));
            }
        }
        if let Some(engine) = &cfg.engine {
            convexcert_core::conjugate::engine(engine)
                .map_err(|_| invalid(format!("unknown engine `{engine}` (llt, brute)")))?;
        }
        Ok((cfg, subject))
    }

    pub fn domain(&self) -> AxisBox {
        let pairs: Vec<(f64, f64)> = self.bounds.iter().map(|b| (b[0], b[1])).collect();
        AxisBox::from_bounds(&pairs).expect("validated at resolution")
    }

    pub fn plan(&self) -> Result<SamplingPlan, CliError> {
        let mut plan = SamplingPlan::new(self.domain(), self.n, self.seed).with_alphas(self.alphas);
        plan.fd_step = self.fd_step;
        Ok(plan)
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let s = Settings::parse_file(
            "# comment\nzoo = quadratic\ndiag = 1, 4\nbox = -5 5\nbox = -1 1\ncheck = SM_0, SM_1\ncheck = SM_2\nL = 4\n",
        )
        .unwrap();
        assert_eq!(s.zoo.as_deref(), Some("quadratic"));
        assert_eq!(s.diag, Some(vec![1.0, 4.0]));
        assert_eq!(s.bounds, Some(vec![[-5.0, 5.0], [-1.0, 1.0]]));
        assert_eq!(s.checks.unwrap().len(), 3);
        assert_eq!(s.l, Some(4.0));
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let err = Settings::parse_file("zoo = sin\n\nn = many\n").unwrap_err();
        assert_eq!(err.to_string(), "config line 3: `n` expects a number, got `many`");
        let err = Settings::parse_file("colour = red").unwrap_err();
        assert!(err.to_string().contains("line 1: unknown key `colour`"));
        let err = Settings::parse_file("seed = 1\nseed = 2").unwrap_err();
        assert!(err.to_string().contains("line 2: duplicate key"));
        let err = Settings::parse_file("just words").unwrap_err();
        assert!(err.to_string().contains("expected `key = value`"));
    }

    #[test]
    fn flags_override_the_file() {
        let file = Settings::parse_file("zoo = sin\nn = 10\nseed = 3").unwrap();
        let flags = Settings {
            n: Some(20),
            ..Settings::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.n, Some(20));
        assert_eq!(merged.seed, Some(3));
    }

    #[test]
    fn resolution_defaults() {
        let s = Settings {
            func: Some("x1^2".into()),
            mu: Some(2.0),
            bounds: Some(vec![[-5.0, 5.0]]),
            seed: Some(7),
            ..Settings::default()
        };
        let (cfg, _) = RunConfig::resolve(Job::Certify, s).unwrap();
        assert_eq!(cfg.checks, ConditionId::of_family(Family::StrongConvexity));
        assert_eq!(cfg.n, DEFAULT_PAIRS);

        let (cfg, _) = RunConfig::resolve(
            Job::Certify,
            Settings {
                zoo: Some("quadratic".into()),
                diag: Some(vec![1.0, 4.0]),
                bounds: Some(vec![[-1.0, 1.0]]),
                seed: Some(0),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.bounds, vec![[-1.0, 1.0], [-1.0, 1.0]]);
        assert_eq!(cfg.checks.len(), 12);
    }

    #[test]
    fn invalid_configurations() {
        let both = Settings {
            func: Some("x1".into()),
            zoo: Some("sin".into()),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Job::Certify, both).is_err());
        assert!(RunConfig::resolve(Job::Certify, Settings::default()).is_err());
        let no_box = Settings {
            func: Some("x1".into()),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Job::Certify, no_box).is_err());
        let bad_check = Settings {
            zoo: Some("sin".into()),
            checks: Some(vec!["SM_9".into()]),
            seed: Some(0),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Job::Certify, bad_check).is_err());
        let bad_dim = Settings {
            zoo: Some("quadratic".into()),
            diag: Some(vec![1.0, 2.0]),
            seed: Some(0),
            ..Settings::default()
        };
        assert!(RunConfig::resolve(Job::Conjugate, bad_dim).is_err());
    }
}
