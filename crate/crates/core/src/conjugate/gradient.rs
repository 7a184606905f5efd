//! ∇f*(s) as the maximizer of sᵀx − f(x) over a box.
//!
//! Projected coordinate bisection: each coordinate solves
//! ∂ₖf(x) = sₖ by safeguarded bisection on its box interval, holding the
//! others fixed; sweeps repeat until the projected residual vanishes. For
//! separable functions the first sweep already solves the problem.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::FunctionOracle;
use crate::point::{AxisBox, Point};

pub const RESIDUAL_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 10_000;
const MAX_BISECTIONS: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxPoint {
    pub point: Point,
    /// Residual ‖∂f(x̂) − s‖ with components at active box bounds zeroed.
    pub residual: f64,
    pub on_boundary: bool,
    /// Some coordinate stopped on a collapsed sign-change bracket: s is
    /// between the one-sided derivatives there (a kink of f).
    pub at_kink: bool,
    /// The objective is flat along some direction at x̂, so the maximizer
    /// is not unique and x̂ is one element of the set.
    pub non_unique: bool,
    pub sweeps: usize,
}

struct CoordinateSolve {
    value: f64,
    at_kink: bool,
}

fn residual_along(
    oracle: &FunctionOracle,
    x: &mut [f64],
    k: usize,
    t: f64,
    s: f64,
) -> Result<f64> {
    x[k] = t;
    Ok(oracle.grad_select(x)?[k] - s)
}

fn solve_coordinate(
    oracle: &FunctionOracle,
    x: &mut [f64],
    k: usize,
    s: f64,
    lo: f64,
    hi: f64,
) -> Result<CoordinateSolve> {
    let r_lo = residual_along(oracle, x, k, lo, s)?;
    if r_lo >= 0.0 {
        return Ok(CoordinateSolve {
            value: lo,
            at_kink: false,
        });
    }
    let r_hi = residual_along(oracle, x, k, hi, s)?;
    if r_hi <= 0.0 {
        return Ok(CoordinateSolve {
            value: hi,
            at_kink: false,
        });
    }
    let (mut a, mut b) = (lo, hi);
    let (mut ra, mut rb) = (r_lo, r_hi);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let r = residual_along(oracle, x, k, mid, s)?;
        if r == 0.0 {
            return Ok(CoordinateSolve {
                value: mid,
                at_kink: false,
            });
        }
        if r < 0.0 {
            a = mid;
            ra = r;
        } else {
            b = mid;
            rb = r;
        }
    }
    let (value, r) = if ra.abs() <= rb.abs() { (a, ra) } else { (b, rb) };
    Ok(CoordinateSolve {
        value,
        at_kink: r.abs() > RESIDUAL_TOL,
    })
}

fn projected_residual(
    oracle: &FunctionOracle,
    x: &[f64],
    s: &[f64],
    domain: &AxisBox,
) -> Result<(f64, bool)> {
    let g = oracle.grad_select(x)?;
    let mut sq = 0.0;
    let mut on_boundary = false;
    for k in 0..x.len() {
        let r = g[k] - s[k];
        let at_hi = x[k] >= domain.hi()[k];
        let at_lo = x[k] <= domain.lo()[k];
        on_boundary |= at_hi || at_lo;
        let active = (at_hi && r <= 0.0) || (at_lo && r >= 0.0);
        if !active {
            sq += r * r;
        }
    }
    Ok((sq.sqrt(), on_boundary))
}

/// Smallest eigenvalue of a finite-difference Hessian of the selection,
/// relative to the largest, below which the maximizer is reported non-unique.
const FLAT_RATIO: f64 = 1e-7;

fn is_flat(oracle: &FunctionOracle, x: &[f64]) -> Result<bool> {
    let n = x.len();
    let mut hess = DMatrix::<f64>::zeros(n, n);
    let mut probe = x.to_vec();
    for k in 0..n {
        let h = 1e-5 * x[k].abs().max(1.0);
        probe[k] = x[k] + h;
        let up = oracle.grad_select(&probe)?;
        probe[k] = x[k] - h;
        let down = oracle.grad_select(&probe)?;
        probe[k] = x[k];
        for j in 0..n {
            hess[(j, k)] = (up[j] - down[j]) / (2.0 * h);
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(min <= FLAT_RATIO * max.max(1.0))
}

pub fn conjugate_gradient(
    oracle: &FunctionOracle,
    s: &Point,
    domain: &AxisBox,
) -> Result<ArgmaxPoint> {
    let n = oracle.dim();
    if s.dim() != n || domain.dim() != n {
        return Err(Error::contract(format!(
            "slope dimension {}, box dimension {}, oracle dimension {n}",
            s.dim(),
            domain.dim()
        )));
    }
    let mut x = domain.midpoint().into_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for sweep in 1..=MAX_SWEEPS {
        let mut kink = false;
        let mut moved = 0.0f64;
        for k in 0..n {
            let before = x[k];
            let solved = solve_coordinate(oracle, &mut x, k, s[k], domain.lo()[k], domain.hi()[k])?;
            x[k] = solved.value;
            kink |= solved.at_kink;
            moved = moved.max((x[k] - before).abs());
        }
        let (residual, on_boundary) = projected_residual(oracle, &x, s, domain)?;
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, x.clone()));
        }
        let settled = moved <= 1e-14 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if residual <= RESIDUAL_TOL || (kink && (settled || oracle.is_separable())) {
            let non_unique = residual <= RESIDUAL_TOL
                && oracle.is_smooth()
                && !on_boundary
                && is_flat(oracle, &x)?;
            return Ok(ArgmaxPoint {
                point: Point::new(x).map_err(|_| Error::eval(s, "non-finite maximizer"))?,
                residual,
                on_boundary,
                at_kink: kink,
                non_unique,
                sweeps: sweep,
            });
        }
    }
    let (residual, best) = best.expect("at least one sweep ran");
    Err(Error::NumericFailure {
        message: format!(
            "conjugate gradient did not converge in {MAX_SWEEPS} sweeps (residual {residual:e})"
        ),
        best,
    })
}
