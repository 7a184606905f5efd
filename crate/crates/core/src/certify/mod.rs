//! Sampled certification of convexity, strong convexity, smoothness and
//! conjugate relations.
//!
//! Every check evaluates one inequality template (see [`ConditionRegistry`])
//! on the triples of a [`SamplingPlan`] and reduces them to a
//! [`CertVerdict`]: the worst margin `lhs − rhs`, where it occurred, and
//! whether it is within tolerance. These are necessary-condition checks —
//! a violation is a concrete counterexample, a pass is evidence.

mod conditions;
mod estimate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use conditions::{ConditionRegistry, Inequality, Params, Shape, Sides};
pub use estimate::{
    estimate_l, estimate_l_on_pairs, estimate_mu, estimate_mu_on_pairs, minimize_on_box,
};

use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, SelectionRule};
use crate::point::{dist, Point};
use crate::sampling::SamplingPlan;
use crate::zoo::ZooEntry;

pub const ATOL: f64 = 1e-9;
pub const RTOL: f64 = 1e-7;
/// Pairs closer than this are discarded and counted.
pub const DEGENERATE_DIST: f64 = 1e-9;

/// Tolerance for a worst margin given the largest side magnitude seen.
pub fn tolerance(scale: f64) -> f64 {
    ATOL + RTOL * scale
}

macro_rules! condition_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum ConditionId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl ConditionId {
            pub const ALL: [ConditionId; [$($name),*].len()] = [$(ConditionId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(ConditionId::$variant => $name,)*
                }
            }
        }
    };
}

condition_ids! {
    CvxJensen => "CVX_JENSEN",
    CvxFirstOrder => "CVX_FIRST_ORDER",
    CvxMonotone => "CVX_MONOTONE",
    ScDef => "SC_DEF",
    ScJensen => "SC_JENSEN",
    ScFirstOrder => "SC_FIRST_ORDER",
    ScMonotone => "SC_MONOTONE",
    SciPl => "SCI_PL",
    SciGradnorm => "SCI_GRADNORM",
    SciUpper => "SCI_UPPER",
    SciCocoercive => "SCI_COCOERCIVE",
    Sm0 => "SM_0",
    Sm1 => "SM_1",
    Sm2 => "SM_2",
    Sm3 => "SM_3",
    Sm4 => "SM_4",
    Sm5 => "SM_5",
    Sm6 => "SM_6",
    Sm7 => "SM_7",
    Conj12 => "CONJ_12",
    Conj23 => "CONJ_23",
}

/// Which family of constants a condition is stated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Convexity,
    StrongConvexity,
    Implication,
    Smoothness,
    Conjugate,
}

impl ConditionId {
    pub fn family(self) -> Family {
        use ConditionId::*;
        match self {
            CvxJensen | CvxFirstOrder | CvxMonotone => Family::Convexity,
            ScDef | ScJensen | ScFirstOrder | ScMonotone => Family::StrongConvexity,
            SciPl | SciGradnorm | SciUpper | SciCocoercive => Family::Implication,
            Sm0 | Sm1 | Sm2 | Sm3 | Sm4 | Sm5 | Sm6 | Sm7 => Family::Smoothness,
            Conj12 | Conj23 => Family::Conjugate,
        }
    }

    pub fn of_family(family: Family) -> Vec<ConditionId> {
        ConditionId::ALL
            .into_iter()
            .filter(|c| c.family() == family)
            .collect()
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        ConditionId::ALL
            .into_iter()
            .find(|c| c.as_str() == upper)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// The sample at which the worst margin occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    pub alpha: f64,
    /// Position in the plan's sample list (lattice first).
    pub sample_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertVerdict {
    pub condition_id: ConditionId,
    pub holds: bool,
    /// min over evaluations of lhs − rhs; +∞ when nothing was evaluated.
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    pub n_evaluated: usize,
    /// Degenerate pairs and samples outside the condition's domain.
    pub n_skipped: usize,
    pub tolerance: f64,
    pub selection_rule: SelectionRule,
    /// The constant the condition was checked at (μ or L), if any.
    pub parameter: Option<f64>,
    pub f_min: Option<f64>,
    pub f_min_estimated: bool,
    /// For violated verdicts: the witness re-evaluated to a violation.
    pub reverified: Option<bool>,
}

/// Evaluates `id` on every sample of `plan`.
///
/// Interpolation templates run at each sample's own α and at every weight
/// of the plan's α-grid. The worst margin is kept with the lowest sample
/// index on ties.
pub fn run_condition(
    id: ConditionId,
    oracle: &FunctionOracle,
    params: &Params,
    plan: &SamplingPlan,
) -> Result<CertVerdict> {
    let registry = ConditionRegistry::standard();
    let ineq = registry.get(id);
    if ineq.needs_smooth() && !oracle.is_smooth() {
        return Err(Error::contract(format!(
            "{id} references the gradient; the oracle is not smooth"
        )));
    }
    if plan.domain.dim() != oracle.dim() {
        return Err(Error::contract(format!(
            "box has dimension {}, oracle has {}",
            plan.domain.dim(),
            oracle.dim()
        )));
    }
    let subject = ineq.subject(oracle, params);
    let alphas = plan.alpha_grid();
    let mut worst: Option<(f64, Witness)> = None;
    let mut scale = 0.0f64;
    let (mut evaluated, mut skipped) = (0usize, 0usize);
    for (index, sample) in plan.samples()?.into_iter().enumerate() {
        let shape = ineq.shape();
        if shape != Shape::Point && dist(&sample.x, &sample.y) <= DEGENERATE_DIST {
            skipped += 1;
            continue;
        }
        let weights: Vec<f64> = match shape {
            Shape::Interpolation => std::iter::once(sample.alpha).chain(alphas.iter().copied()).collect(),
            _ => vec![sample.alpha],
        };
        for alpha in weights {
            let Some(sides) = ineq.sides(&subject, params, &sample.x, &sample.y, alpha)? else {
                skipped += 1;
                continue;
            };
            evaluated += 1;
            scale = scale.max(sides.scale);
            let margin = sides.margin();
            if margin.is_nan() {
                return Err(Error::eval(&sample.x, format!("{id} margin is NaN")));
            }
            if worst.as_ref().is_none_or(|(w, _)| margin < *w) {
                worst = Some((
                    margin,
                    Witness {
                        x: sample.x.clone(),
                        y: sample.y.clone(),
                        alpha,
                        sample_index: index,
                    },
                ));
            }
        }
    }
    let tol = tolerance(scale);
    let (worst_margin, witness) = match worst {
        Some((m, w)) => (m, Some(w)),
        None => (f64::INFINITY, None),
    };
    let holds = worst_margin >= -tol;
    let reverified = match (&witness, holds) {
        (Some(w), false) => {
            let again = ineq.sides(&ineq.subject(oracle, params), params, &w.x, &w.y, w.alpha)?;
            Some(again.is_some_and(|s| s.margin() == worst_margin || s.margin() < -tol))
        }
        _ => None,
    };
    let parameter = match id.family() {
        Family::StrongConvexity | Family::Implication => Some(params.mu),
        Family::Smoothness => Some(params.l),
        _ => None,
    };
    Ok(CertVerdict {
        condition_id: id,
        holds,
        worst_margin,
        witness,
        n_evaluated: evaluated,
        n_skipped: skipped,
        tolerance: tol,
        selection_rule: oracle.selection_rule(),
        parameter,
        f_min: (id == ConditionId::SciPl).then_some(params.f_min),
        f_min_estimated: false,
        reverified,
    })
}

/// lhs − rhs of `id` at one explicit triple, for re-verifying witnesses.
pub fn margin_at(
    id: ConditionId,
    oracle: &FunctionOracle,
    params: &Params,
    x: &[f64],
    y: &[f64],
    alpha: f64,
) -> Result<Option<f64>> {
    let registry = ConditionRegistry::standard();
    let ineq = registry.get(id);
    let subject = ineq.subject(oracle, params);
    Ok(ineq.sides(&subject, params, x, y, alpha)?.map(|s| s.margin()))
}

fn expect_family(id: ConditionId, family: Family) -> Result<()> {
    if id.family() != family {
        return Err(Error::contract(format!("{id} is not a {family:?} condition")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::contract(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

pub fn check_convexity(
    oracle: &FunctionOracle,
    plan: &SamplingPlan,
    which: ConditionId,
) -> Result<CertVerdict> {
    expect_family(which, Family::Convexity)?;
    run_condition(which, oracle, &Params::default(), plan)
}

pub fn check_strong_convexity(
    oracle: &FunctionOracle,
    mu: f64,
    plan: &SamplingPlan,
    which: ConditionId,
) -> Result<CertVerdict> {
    expect_family(which, Family::StrongConvexity)?;
    positive("mu", mu)?;
    let params = Params {
        mu,
        ..Params::default()
    };
    run_condition(which, oracle, &params, plan)
}

/// Checks one implication of strong convexity at `mu`.
///
/// SCI_PL needs the minimum value of f; when `f_min` is `None` it is
/// estimated by [`minimize_on_box`] and the verdict is flagged.
pub fn check_sc_implication(
    oracle: &FunctionOracle,
    mu: f64,
    f_min: Option<f64>,
    plan: &SamplingPlan,
    which: ConditionId,
) -> Result<CertVerdict> {
    expect_family(which, Family::Implication)?;
    positive("mu", mu)?;
    let (f_min, estimated) = match (which, f_min) {
        (ConditionId::SciPl, None) => (minimize_on_box(oracle, &plan.domain, plan.seed)?.0, true),
        (_, v) => (v.unwrap_or(0.0), false),
    };
    let params = Params {
        mu,
        f_min,
        ..Params::default()
    };
    let mut verdict = run_condition(which, oracle, &params, plan)?;
    verdict.f_min_estimated = estimated && which == ConditionId::SciPl;
    Ok(verdict)
}

pub fn check_smoothness(
    oracle: &FunctionOracle,
    l: f64,
    plan: &SamplingPlan,
    which: ConditionId,
) -> Result<CertVerdict> {
    expect_family(which, Family::Smoothness)?;
    positive("L", l)?;
    let params = Params {
        l,
        ..Params::default()
    };
    run_condition(which, oracle, &params, plan)
}

/// CONJ_12 (Fenchel–Young equality at s = selected subgradient) or CONJ_23
/// (x is a subgradient of f* at s) against the entry's stored conjugate.
pub fn check_conjugate_relations(
    entry: &ZooEntry,
    plan: &SamplingPlan,
    which: ConditionId,
) -> Result<CertVerdict> {
    expect_family(which, Family::Conjugate)?;
    if entry.conjugate.is_none() {
        return Err(Error::contract(format!("`{}` has no stored conjugate", entry.name)));
    }
    let params = Params {
        entry: Some(entry),
        ..Params::default()
    };
    run_condition(which, &entry.oracle, &params, plan)
}

/// Claimed constants for [`check`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Claims {
    pub mu: Option<f64>,
    pub l: Option<f64>,
    pub f_min: Option<f64>,
}

/// Dispatches any condition id to its check, pulling the constant it needs
/// from `claims`.
pub fn check(
    id: ConditionId,
    oracle: &FunctionOracle,
    claims: &Claims,
    entry: Option<&ZooEntry>,
    plan: &SamplingPlan,
) -> Result<CertVerdict> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::contract(format!("{id} needs a claimed {name}")))
    };
    match id.family() {
        Family::Convexity => check_convexity(oracle, plan, id),
        Family::StrongConvexity => check_strong_convexity(oracle, need(claims.mu, "mu")?, plan, id),
        Family::Implication => {
            check_sc_implication(oracle, need(claims.mu, "mu")?, claims.f_min, plan, id)
        }
        Family::Smoothness => check_smoothness(oracle, need(claims.l, "L")?, plan, id),
        Family::Conjugate => {
            let entry = entry.ok_or_else(|| {
                Error::contract(format!("{id} needs a zoo function with a stored conjugate"))
            })?;
            check_conjugate_relations(entry, plan, id)
        }
    }
}
