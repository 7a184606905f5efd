//! Function oracles: the subject of every check in the crate.
//!
//! An oracle returns values and one selected element of the subdifferential
//! per point. For smooth functions that element is the gradient.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{dot, norm_sq, Point};

/// How `grad_select` picks its element of ∂f(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// The function is differentiable; the selection is the gradient.
    Gradient,
    /// abs′(0) = 0 inside a recognized convex composition; always in ∂f.
    ConvexSubgradient,
    /// One-sided or conventional derivative at kinks, not known to lie in ∂f.
    Heuristic,
}

impl fmt::Display for SelectionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionRule::Gradient => "gradient",
            SelectionRule::ConvexSubgradient => "convex subgradient",
            SelectionRule::Heuristic => "selection heuristic",
        })
    }
}

/// A deterministic real function on ℝⁿ with a subgradient selection.
///
/// Implementations must be pure: equal inputs give equal outputs, and calls
/// from several threads at once are allowed.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// One element of ∂f(x) (the gradient where f is differentiable).
    fn grad_select(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn is_smooth(&self) -> bool;

    fn selection_rule(&self) -> SelectionRule {
        if self.is_smooth() {
            SelectionRule::Gradient
        } else {
            SelectionRule::Heuristic
        }
    }

    /// True when f(x) = Σ fᵢ(xᵢ); lets coordinate solvers finish in one sweep.
    fn is_separable(&self) -> bool {
        self.dim() == 1
    }

    fn label(&self) -> String {
        "anonymous".to_string()
    }
}

/// Shared handle to an [`Objective`].
#[derive(Clone)]
pub struct FunctionOracle(Arc<dyn Objective>);

impl FunctionOracle {
    pub fn new<O: Objective + 'static>(objective: O) -> Self {
        FunctionOracle(Arc::new(objective))
    }

    /// Oracle from a value closure and a selection closure.
    pub fn from_fns<V, G>(dim: usize, smooth: bool, value: V, grad: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        FunctionOracle::new(FnObjective {
            dim,
            smooth,
            separable: dim == 1,
            rule: None,
            label: "closure".to_string(),
            value: Box::new(value),
            grad: Box::new(grad),
        })
    }

    pub fn builder<V, G>(dim: usize, value: V, grad: G) -> FnObjectiveBuilder
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        FnObjectiveBuilder {
            inner: FnObjective {
                dim,
                smooth: true,
                separable: dim == 1,
                rule: None,
                label: "closure".to_string(),
                value: Box::new(value),
                grad: Box::new(grad),
            },
        }
    }

    pub fn value_at(&self, x: &Point) -> Result<f64> {
        self.check_dim(x)?;
        self.0.value(x)
    }

    pub fn grad_at(&self, x: &Point) -> Result<Point> {
        self.check_dim(x)?;
        let g = self.0.grad_select(x)?;
        Point::new(g).map_err(|_| Error::eval(x, "non-finite subgradient"))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.0.dim() {
            return Err(Error::contract(format!(
                "point has dimension {}, oracle expects {}",
                x.len(),
                self.0.dim()
            )));
        }
        Ok(())
    }
}

impl std::ops::Deref for FunctionOracle {
    type Target = dyn Objective;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionOracle")
            .field("label", &self.0.label())
            .field("dim", &self.0.dim())
            .field("smooth", &self.0.is_smooth())
            .finish()
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

pub struct FnObjective {
    dim: usize,
    smooth: bool,
    separable: bool,
    rule: Option<SelectionRule>,
    label: String,
    value: ValueFn,
    grad: GradFn,
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let v = (self.value)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::eval(x, format!("{} returned {v}", self.label)))
        }
    }

    fn grad_select(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = (self.grad)(x);
        if g.len() != self.dim {
            return Err(Error::contract(format!(
                "{}: selection has dimension {}, expected {}",
                self.label,
                g.len(),
                self.dim
            )));
        }
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(Error::eval(x, format!("{}: non-finite subgradient", self.label)))
        }
    }

    fn is_smooth(&self) -> bool {
        self.smooth
    }

    fn selection_rule(&self) -> SelectionRule {
        self.rule.unwrap_or(if self.smooth {
            SelectionRule::Gradient
        } else {
            SelectionRule::Heuristic
        })
    }

    fn is_separable(&self) -> bool {
        self.separable
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

pub struct FnObjectiveBuilder {
    inner: FnObjective,
}

impl FnObjectiveBuilder {
    pub fn nonsmooth(mut self, rule: SelectionRule) -> Self {
        self.inner.smooth = false;
        self.inner.rule = Some(rule);
        self
    }

    pub fn separable(mut self, separable: bool) -> Self {
        self.inner.separable = separable;
        self
    }

    pub fn label(mut self, label: impl Into<String>) -> Self {
        self.inner.label = label.into();
        self
    }

    pub fn build(self) -> FunctionOracle {
        FunctionOracle::new(self.inner)
    }
}

struct Tilted {
    inner: FunctionOracle,
    slope: Vec<f64>,
}

impl Objective for Tilted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.inner.value(x)? - dot(&self.slope, x))
    }

    fn grad_select(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.inner.grad_select(x)?;
        for (gi, si) in g.iter_mut().zip(&self.slope) {
            *gi -= si;
        }
        Ok(g)
    }

    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    fn selection_rule(&self) -> SelectionRule {
        self.inner.selection_rule()
    }

    fn is_separable(&self) -> bool {
        self.inner.is_separable()
    }

    fn label(&self) -> String {
        format!("tilt({})", self.inner.label())
    }
}

/// The tilted function φ(z) = f(z) − slopeᵀz, with selection ∂f(z) − slope.
///
/// Tilting preserves every curvature constant and moves the point whose
/// selected subgradient equals `slope` to a stationary point of φ.
pub fn tilt(oracle: &FunctionOracle, slope: &Point) -> Result<FunctionOracle> {
    if slope.dim() != oracle.dim() {
        return Err(Error::contract(format!(
            "tilt slope has dimension {}, oracle has {}",
            slope.dim(),
            oracle.dim()
        )));
    }
    Ok(FunctionOracle::new(Tilted {
        inner: oracle.clone(),
        slope: slope.to_vec(),
    }))
}

/// `sign · f(x) + (curvature / 2) · ‖x‖²`.
pub(crate) struct QuadraticShift {
    pub inner: FunctionOracle,
    pub sign: f64,
    pub curvature: f64,
}

impl Objective for QuadraticShift {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.sign * self.inner.value(x)? + 0.5 * self.curvature * norm_sq(x))
    }

    fn grad_select(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.inner.grad_select(x)?;
        Ok(g.iter()
            .zip(x)
            .map(|(gi, xi)| self.sign * gi + self.curvature * xi)
            .collect())
    }

    fn is_smooth(&self) -> bool {
        self.inner.is_smooth()
    }

    fn selection_rule(&self) -> SelectionRule {
        self.inner.selection_rule()
    }

    fn is_separable(&self) -> bool {
        self.inner.is_separable()
    }

    fn label(&self) -> String {
        format!(
            "{}*{} + {}/2*|x|^2",
            self.sign,
            self.inner.label(),
            self.curvature
        )
    }
}

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference gradient, component i = (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h.
///
/// The caller keeps `x` at least `h` inside the region where `f` is finite.
pub fn fd_gradient(oracle: &FunctionOracle, x: &Point, h: f64) -> Result<Point> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::contract(format!("finite-difference step {h} must be > 0")));
    }
    if x.dim() != oracle.dim() {
        return Err(Error::contract(format!(
            "point has dimension {}, oracle expects {}",
            x.dim(),
            oracle.dim()
        )));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        probe[i] = x[i] + h;
        let up = oracle.value(&probe)?;
        probe[i] = x[i] - h;
        let down = oracle.value(&probe)?;
        probe[i] = x[i];
        grad.push((up - down) / (2.0 * h));
    }
    Point::new(grad).map_err(|_| Error::eval(x, "non-finite finite difference"))
}

/// Constants known analytically for a function, when any are.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarConstants {
    pub known_mu: Option<f64>,
    pub known_l: Option<f64>,
    pub known_min_value: Option<f64>,
    pub known_minimizer: Option<Point>,
}

impl ScalarConstants {
    pub fn new(
        known_mu: Option<f64>,
        known_l: Option<f64>,
        known_min_value: Option<f64>,
        known_minimizer: Option<Point>,
    ) -> Result<Self> {
        for v in known_mu.iter().chain(known_l.iter()) {
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(Error::contract(format!("curvature constant {v} must be >= 0")));
            }
        }
        if let (Some(mu), Some(l)) = (known_mu, known_l) {
            if mu > l {
                return Err(Error::contract(format!("mu = {mu} exceeds L = {l}")));
            }
        }
        Ok(ScalarConstants {
            known_mu,
            known_l,
            known_min_value,
            known_minimizer,
        })
    }
}
