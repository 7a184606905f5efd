//! Strong convexity of f against smoothness of f*, checked numerically.
//!
//! Part (i): μ-strongly convex f ⇒ ∇f* is (1/μ)-Lipschitz.
//! Part (ii): L-smooth convex f ⇒ f* is (1/L)-strongly convex.
//!
//! Conjugate-side constants are estimated on the image box: the bounding
//! box of the selected subgradients over the primal samples, shrunk by 5%
//! per side so that the conjugate's maximizer stays interior.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::certify::{
    check_sc_implication, check_convexity, check_smoothness, check_strong_convexity,
    estimate_l, estimate_l_on_pairs, estimate_mu, estimate_mu_on_pairs, margin_at, tolerance,
    CertVerdict, ConditionId, Params, ATOL, RTOL,
};
use crate::conjugate::{conjugate_gradient, llt_1d, GridFunction};
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, Objective};
use crate::point::{linspace, AxisBox, Point};
use crate::sampling::SamplingPlan;
use crate::zoo::{make_huber, make_pl_nonconvex, make_sin, ConjugateDomain, ZooEntry};

pub const IMAGE_SHRINK: f64 = 0.05;
/// Primal grid size for the linear-time cross-check in one dimension.
pub const NUMERIC_GRID: usize = 100_001;
/// Slope grid size for finite-difference curvature of the numerical f*.
pub const SLOPE_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "SC_to_smooth")]
    ScToSmooth,
    #[serde(rename = "smooth_to_SC")]
    SmoothToSc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateSource {
    ClosedForm,
    /// ∇f*(s) as the maximizer of sᵀx − f(x) over the primal box.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub entry: String,
    pub direction: Direction,
    pub mu_f: Option<f64>,
    pub l_f: Option<f64>,
    pub mu_conj: Option<f64>,
    pub l_conj: Option<f64>,
    /// 1/μ_f for part (i), 1/L_f for part (ii).
    pub bound: f64,
    pub bound_satisfied: bool,
    /// 1/μ_f − L_conj for part (i), μ_conj − 1/L_f for part (ii).
    pub slack: f64,
    pub primal_box: AxisBox,
    pub conjugate_box: AxisBox,
    pub conjugate_source: ConjugateSource,
    pub n_pairs_used: usize,
    /// Same constant from finite differences of the linear-time conjugate (1-D).
    pub numerical_estimate: Option<f64>,
    pub discrepancy: Option<f64>,
}

/// f* through [`conjugate_gradient`]: value sᵀx̂ − f(x̂), selection x̂.
struct NumericalConjugate {
    primal: FunctionOracle,
    domain: AxisBox,
}

impl NumericalConjugate {
    fn argmax(&self, s: &[f64]) -> Result<Point> {
        let s = Point::new(s.to_vec())?;
        conjugate_gradient(&self.primal, &s, &self.domain)
            .map(|a| a.point)
            .map_err(|e| match e {
                Error::NumericFailure { message, best } => Error::NumericFailure {
                    message: format!("conjugate of `{}` at s = {s:?}: {message}", self.primal.label()),
                    best,
                },
                other => other,
            })
    }
}

impl Objective for NumericalConjugate {
    fn dim(&self) -> usize {
        self.primal.dim()
    }

    fn value(&self, s: &[f64]) -> Result<f64> {
        let x = self.argmax(s)?;
        Ok(crate::point::dot(s, &x) - self.primal.value(&x)?)
    }

    fn grad_select(&self, s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.argmax(s)?.into_vec())
    }

    fn is_smooth(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("{}* (numerical)", self.primal.label())
    }
}

fn conjugate_oracle(entry: &ZooEntry, plan: &SamplingPlan) -> (FunctionOracle, ConjugateSource) {
    match &entry.conjugate {
        Some(c) => (c.clone(), ConjugateSource::ClosedForm),
        None => (
            FunctionOracle::new(NumericalConjugate {
                primal: entry.oracle.clone(),
                domain: plan.domain.clone(),
            }),
            ConjugateSource::Numerical,
        ),
    }
}

/// Bounding box of the selected subgradients over the plan, shrunk by
/// [`IMAGE_SHRINK`] per side and clipped to a box-shaped conjugate domain.
pub fn image_box(entry: &ZooEntry, plan: &SamplingPlan) -> Result<AxisBox> {
    let mut grads = Vec::new();
    for s in plan.samples()? {
        grads.push(entry.oracle.grad_at(&s.x)?);
        grads.push(entry.oracle.grad_at(&s.y)?);
    }
    let bounds = AxisBox::bounding(grads.iter().map(|g| g.as_slice()));
    let bounds = bounds.ok_or_else(|| Error::contract("plan has no samples"))?;
    let shrunk = bounds.shrink(IMAGE_SHRINK).map_err(|_| {
        Error::contract(format!(
            "subgradient image of `{}` is degenerate on this box",
            entry.name
        ))
    })?;
    match &entry.conjugate_domain {
        Some(ConjugateDomain::Box(d)) => {
            let pairs: Vec<(f64, f64)> = (0..d.dim())
                .map(|i| (shrunk.lo()[i].max(d.lo()[i]), shrunk.hi()[i].min(d.hi()[i])))
                .collect();
            AxisBox::from_bounds(&pairs)
        }
        _ => Ok(shrunk),
    }
}

/// Sampled slope pairs in the image box, projected into the conjugate domain.
fn slope_pairs(entry: &ZooEntry, plan: &SamplingPlan, image: &AxisBox) -> Result<Vec<(Point, Point)>> {
    let samples = plan.with_domain(image.clone()).samples()?;
    let project = |p: &Point| match &entry.conjugate_domain {
        Some(d) => d.project(p),
        None => Some(p.clone()),
    };
    Ok(samples
        .iter()
        .filter_map(|s| Some((project(&s.x)?, project(&s.y)?)))
        .collect())
}

/// Second differences of the linear-time conjugate on the image interval:
/// (min, max) curvature of f*.
fn numeric_curvature(entry: &ZooEntry, plan: &SamplingPlan, image: &AxisBox) -> Result<(f64, f64)> {
    let d = &plan.domain;
    let grid = GridFunction::sample(&entry.oracle, d.lo()[0], d.hi()[0], NUMERIC_GRID)?;
    let slopes = linspace(image.lo()[0], image.hi()[0], SLOPE_GRID);
    let h = slopes[1] - slopes[0];
    let conj = llt_1d(&grid, &slopes)?;
    let curv: Vec<f64> = conj
        .values
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h))
        .collect();
    let lo = curv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = curv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo.max(0.0), hi))
}

/// Part (i): L of ∇f* against 1/μ.
pub fn verify_part_i(entry: &ZooEntry, plan: &SamplingPlan) -> Result<DualityReport> {
    if !entry.convex {
        return Err(Error::contract(format!("`{}` is not convex", entry.name)));
    }
    let mu_f = match entry.constants.known_mu {
        Some(mu) if mu > 0.0 => mu,
        _ => estimate_mu(&entry.oracle, plan)?,
    };
    if mu_f <= 0.0 {
        return Err(Error::contract(format!(
            "`{}` has no strong convexity constant on this box",
            entry.name
        )));
    }
    let l_f = match entry.constants.known_l {
        Some(l) => Some(l),
        None if entry.oracle.is_smooth() => Some(estimate_l(&entry.oracle, plan)?),
        None => None,
    };
    let image = image_box(entry, plan)?;
    let pairs = slope_pairs(entry, plan, &image)?;
    let (conj, source) = conjugate_oracle(entry, plan);
    let l_conj = estimate_l_on_pairs(&conj, &pairs)?;
    let bound = 1.0 / mu_f;
    let numerical_estimate = if entry.dim() == 1 {
        Some(numeric_curvature(entry, plan, &image)?.1)
    } else {
        None
    };
    Ok(DualityReport {
        entry: entry.name.clone(),
        direction: Direction::ScToSmooth,
        mu_f: Some(mu_f),
        l_f,
        mu_conj: None,
        l_conj: Some(l_conj),
        bound,
        bound_satisfied: l_conj <= bound * (1.0 + RTOL) + ATOL,
        slack: bound - l_conj,
        primal_box: plan.domain.clone(),
        conjugate_box: image,
        conjugate_source: source,
        n_pairs_used: pairs.len(),
        numerical_estimate,
        discrepancy: numerical_estimate.map(|n| (n - l_conj).abs()),
    })
}

/// Part (ii): μ of f* against 1/L.
pub fn verify_part_ii(entry: &ZooEntry, plan: &SamplingPlan) -> Result<DualityReport> {
    if !entry.convex {
        return Err(Error::contract(format!("`{}` is not convex", entry.name)));
    }
    if !entry.oracle.is_smooth() {
        return Err(Error::contract(format!("`{}` is not smooth", entry.name)));
    }
    let l_f = match entry.constants.known_l {
        Some(l) => l,
        None => estimate_l(&entry.oracle, plan)?,
    };
    if l_f <= 0.0 {
        return Err(Error::contract(format!("`{}` has L = 0 on this box", entry.name)));
    }
    let image = image_box(entry, plan)?;
    let pairs = slope_pairs(entry, plan, &image)?;
    let (conj, source) = conjugate_oracle(entry, plan);
    let mu_conj = estimate_mu_on_pairs(&conj, &pairs)?;
    let bound = 1.0 / l_f;
    let numerical_estimate = if entry.dim() == 1 {
        Some(numeric_curvature(entry, plan, &image)?.0)
    } else {
        None
    };
    Ok(DualityReport {
        entry: entry.name.clone(),
        direction: Direction::SmoothToSc,
        mu_f: entry.constants.known_mu,
        l_f: Some(l_f),
        mu_conj: Some(mu_conj),
        l_conj: None,
        bound,
        bound_satisfied: mu_conj >= bound * (1.0 - RTOL) - ATOL,
        slack: mu_conj - bound,
        primal_box: plan.domain.clone(),
        conjugate_box: image,
        conjugate_source: source,
        n_pairs_used: pairs.len(),
        numerical_estimate,
        discrepancy: numerical_estimate.map(|n| (n - mu_conj).abs()),
    })
}

/// Every part that applies to the entry: (i) when μ > 0 is known, (ii) when
/// the entry is smooth with known L.
pub fn verify_entry(entry: &ZooEntry, plan: &SamplingPlan) -> Result<Vec<DualityReport>> {
    let mut out = Vec::new();
    if entry.constants.known_mu.is_some_and(|mu| mu > 0.0) {
        out.push(verify_part_i(entry, plan)?);
    }
    if entry.oracle.is_smooth() && entry.constants.known_l.is_some() {
        out.push(verify_part_ii(entry, plan)?);
    }
    if out.is_empty() {
        return Err(Error::contract(format!(
            "`{}` has neither a known mu > 0 nor a known L with a smooth oracle",
            entry.name
        )));
    }
    Ok(out)
}

/// A fixed triple re-evaluated directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimWitness {
    pub condition_id: ConditionId,
    pub x: Point,
    pub y: Point,
    pub alpha: f64,
    /// lhs − rhs at the witness (at the first violating parameter).
    pub margin: f64,
    /// Direct re-evaluation violates at every violating parameter.
    pub reverified: bool,
}

/// One condition holds on a function while another fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub label: String,
    pub claim: String,
    pub function: String,
    pub holding: CertVerdict,
    pub violating: Vec<CertVerdict>,
    pub witness: ClaimWitness,
}

impl Claim {
    /// Holding verdict holds, every violating verdict fails, and the
    /// witness re-verifies.
    pub fn established(&self) -> bool {
        self.holding.holds
            && !self.violating.is_empty()
            && self.violating.iter().all(|v| !v.holds)
            && self.witness.reverified
    }
}

pub const SUITE_PAIRS: usize = 2000;
pub const SUITE_SEED: u64 = 1;
pub const HUBER_MUS: [f64; 4] = [1e-3, 1e-2, 0.1, 1.0];

fn suite_plan(lo: f64, hi: f64) -> SamplingPlan {
    SamplingPlan::new(
        AxisBox::cube(1, lo, hi).expect("static box"),
        SUITE_PAIRS,
        SUITE_SEED,
    )
}

fn pinned(
    id: ConditionId,
    oracle: &FunctionOracle,
    params: &[Params],
    x: f64,
    y: f64,
    alpha: f64,
) -> Result<ClaimWitness> {
    let mut margins = Vec::with_capacity(params.len());
    for p in params {
        let m = margin_at(id, oracle, p, &[x], &[y], alpha)?
            .ok_or_else(|| Error::contract(format!("{id} witness outside its domain")))?;
        margins.push(m);
    }
    Ok(ClaimWitness {
        condition_id: id,
        x: Point::scalar(x)?,
        y: Point::scalar(y)?,
        alpha,
        margin: margins[0],
        reverified: margins.iter().all(|m| *m < -tolerance(m.abs())),
    })
}

/// The separating instances:
///
/// (a) sin on [0, π]: SM_0 holds at L = 1, SM_5 fails at (0, π) by π + 2.
/// (b) x² + 3 sin² x: PL at μ = 1/32 on [−10, 10], yet not convex on [−3, 3].
/// (c) Huber(1): SM_2 holds at L = 1, SC_MONOTONE fails for every tested μ,
///     with both witness points in the linear region.
pub fn counterexample_suite() -> Result<Vec<Claim>> {
    let mut claims = Vec::with_capacity(3);

    let sin = make_sin();
    let holding = check_smoothness(&sin.oracle, 1.0, &suite_plan(0.0, 2.0 * PI), ConditionId::Sm0)?;
    let violating = check_smoothness(&sin.oracle, 1.0, &suite_plan(0.0, PI), ConditionId::Sm5)?;
    let l1 = Params {
        l: 1.0,
        ..Params::default()
    };
    let mut witness = pinned(ConditionId::Sm5, &sin.oracle, &[l1], 0.0, PI, 0.5)?;
    witness.reverified &= violating.worst_margin <= witness.margin;
    claims.push(Claim {
        label: "a".into(),
        claim: "SM_0 holds at L=1 but SM_5 fails: SM_5 does not follow from SM_0 without convexity".into(),
        function: "sin(x)".into(),
        holding,
        violating: vec![violating],
        witness,
    });

    let pl = make_pl_nonconvex();
    let mu = 1.0 / 32.0;
    let holding = check_sc_implication(
        &pl.oracle,
        mu,
        pl.constants.known_min_value,
        &suite_plan(-10.0, 10.0),
        ConditionId::SciPl,
    )?;
    let violating = check_convexity(&pl.oracle, &suite_plan(-3.0, 3.0), ConditionId::CvxJensen)?;
    let w = violating
        .witness
        .clone()
        .ok_or_else(|| Error::contract("convexity check evaluated nothing"))?;
    let witness = pinned(
        ConditionId::CvxJensen,
        &pl.oracle,
        &[Params::default()],
        w.x[0],
        w.y[0],
        w.alpha,
    )?;
    claims.push(Claim {
        label: "b".into(),
        claim: "SCI_PL holds at mu=1/32 but CVX_JENSEN fails: PL is weaker than strong convexity"
            .into(),
        function: "x^2+3sin^2(x)".into(),
        holding,
        violating: vec![violating],
        witness,
    });

    let huber = make_huber(1.0)?;
    let plan = suite_plan(-3.0, 3.0);
    let holding = check_smoothness(&huber.oracle, 1.0, &plan, ConditionId::Sm2)?;
    let violating = HUBER_MUS
        .iter()
        .map(|mu| check_strong_convexity(&huber.oracle, *mu, &plan, ConditionId::ScMonotone))
        .collect::<Result<Vec<_>>>()?;
    let params: Vec<Params> = HUBER_MUS
        .iter()
        .map(|mu| Params {
            mu: *mu,
            ..Params::default()
        })
        .collect();
    let witness = pinned(ConditionId::ScMonotone, &huber.oracle, &params, 1.5, 3.0, 0.5)?;
    claims.push(Claim {
        label: "c".into(),
        claim: "SM_2 holds at L=1 but SC_MONOTONE fails for every tested mu >= 1e-3: smooth convex is not strongly convex".into(),
        function: "huber(1)".into(),
        holding,
        violating,
        witness,
    });

    Ok(claims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_logsumexp, make_quadratic, make_quadratic_abs};

    fn plan(entry: &ZooEntry, n: usize) -> SamplingPlan {
        SamplingPlan::new(entry.default_box.clone(), n, 1)
    }

    #[test]
    fn scaled_square_is_tight_in_both_directions() {
        let q = make_quadratic(&[2.0]).unwrap();
        let i = verify_part_i(&q, &plan(&q, 300)).unwrap();
        assert!(i.bound_satisfied && i.slack.abs() <= 1e-9, "{i:?}");
        let ii = verify_part_ii(&q, &plan(&q, 300)).unwrap();
        assert!(ii.bound_satisfied && ii.slack.abs() <= 1e-9, "{ii:?}");
        assert!(i.discrepancy.unwrap() < 1e-4, "{i:?}");
        assert!(ii.discrepancy.unwrap() < 1e-4, "{ii:?}");
    }

    #[test]
    fn diagonal_quadratic_round_trip() {
        let q = make_quadratic(&[1.0, 4.0]).unwrap();
        let r = verify_entry(&q, &plan(&q, 300)).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].l_conj.unwrap() * r[0].mu_f.unwrap() - 1.0).abs() < 1e-6);
        assert!((r[1].mu_conj.unwrap() * r[1].l_f.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nonsmooth_strongly_convex_through_the_numerical_conjugate() {
        let e = make_quadratic_abs();
        let r = verify_part_i(&e, &plan(&e, 300)).unwrap();
        assert_eq!(r.conjugate_source, ConjugateSource::Numerical);
        assert!(r.bound_satisfied, "{r:?}");
        assert!(r.numerical_estimate.unwrap() <= 1.0 + 1e-3, "{r:?}");
        assert!(verify_part_ii(&e, &plan(&e, 10)).is_err());
    }

    #[test]
    fn huber_and_logsumexp_conjugates_are_strongly_convex() {
        let h = make_huber(1.0).unwrap();
        let r = verify_part_ii(&h, &plan(&h, 500)).unwrap();
        assert!(r.bound_satisfied && r.slack.abs() < 1e-9, "{r:?}");
        let e = make_logsumexp(2).unwrap();
        let r = verify_part_ii(&e, &plan(&e, 500)).unwrap();
        assert!(r.bound_satisfied && r.mu_conj.unwrap() >= 1.0, "{r:?}");
    }

    #[test]
    fn nonconvex_entries_are_rejected() {
        assert!(verify_part_i(&make_sin(), &plan(&make_sin(), 10)).is_err());
    }

    #[test]
    fn suite_establishes_every_claim() {
        let claims = counterexample_suite().unwrap();
        assert_eq!(claims.len(), 3);
        for c in &claims {
            assert!(c.established(), "{c:?}");
        }
        assert!((claims[0].witness.margin + PI + 2.0).abs() < 1e-12);
        let w = &claims[2].witness;
        assert!(w.x[0].abs() > 1.0 && w.y[0].abs() > 1.0);
    }
}
