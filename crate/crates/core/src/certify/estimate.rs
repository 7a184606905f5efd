//! Sampled curvature constants and a box-constrained minimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::FunctionOracle;
use crate::point::{dist, dot, norm, norm_sq, sub, AxisBox, Point};
use crate::sampling::SamplingPlan;

use super::DEGENERATE_DIST;

fn plan_pairs(plan: &SamplingPlan) -> Result<Vec<(Point, Point)>> {
    Ok(plan.samples()?.into_iter().map(|s| (s.x, s.y)).collect())
}

fn quotients<F>(oracle: &FunctionOracle, pairs: &[(Point, Point)], mut q: F) -> Result<usize>
where
    F: FnMut(&[f64], &[f64], f64),
{
    let mut valid = 0;
    for (x, y) in pairs {
        let d = dist(x, y);
        if d <= DEGENERATE_DIST {
            continue;
        }
        let ds = sub(&oracle.grad_select(y)?, &oracle.grad_select(x)?);
        q(&ds, &sub(y, x), d);
        valid += 1;
    }
    if valid == 0 {
        return Err(Error::contract("no non-degenerate pairs to estimate from"));
    }
    Ok(valid)
}

/// inf over pairs of (s_y − s_x)ᵀ(y − x) / ‖y − x‖², clamped below at 0.
pub fn estimate_mu_on_pairs(oracle: &FunctionOracle, pairs: &[(Point, Point)]) -> Result<f64> {
    let mut best = f64::INFINITY;
    quotients(oracle, pairs, |ds, d, len| {
        best = best.min(dot(ds, d) / (len * len));
    })?;
    Ok(best.max(0.0))
}

/// sup over pairs of ‖s_y − s_x‖ / ‖y − x‖.
pub fn estimate_l_on_pairs(oracle: &FunctionOracle, pairs: &[(Point, Point)]) -> Result<f64> {
    let mut best = 0.0f64;
    quotients(oracle, pairs, |ds, _, len| {
        best = best.max(norm(ds) / len);
    })?;
    Ok(best)
}

pub fn estimate_mu(oracle: &FunctionOracle, plan: &SamplingPlan) -> Result<f64> {
    estimate_mu_on_pairs(oracle, &plan_pairs(plan)?)
}

pub fn estimate_l(oracle: &FunctionOracle, plan: &SamplingPlan) -> Result<f64> {
    estimate_l_on_pairs(oracle, &plan_pairs(plan)?)
}

const RANDOM_STARTS: usize = 16;
const DESCENT_ITERS: usize = 500;

fn project(domain: &AxisBox, x: &mut [f64]) {
    for (i, v) in x.iter_mut().enumerate() {
        *v = v.clamp(domain.lo()[i], domain.hi()[i]);
    }
}

/// Projected gradient descent with backtracking from one start.
fn descend(oracle: &FunctionOracle, domain: &AxisBox, start: Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let mut x = start;
    let mut fx = oracle.value(&x)?;
    let mut step = 1.0;
    for _ in 0..DESCENT_ITERS {
        let g = oracle.grad_select(&x)?;
        let mut accepted = false;
        while step > 1e-16 {
            let mut c: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            project(domain, &mut c);
            let moved = norm_sq(&sub(&c, &x));
            if moved == 0.0 {
                return Ok((fx, x));
            }
            let fc = oracle.value(&c)?;
            if fc <= fx - 1e-4 * moved / step {
                x = c;
                fx = fc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((fx, x))
}

/// Multi-start local minimization over the box: corners, the midpoint and
/// seeded random starts. Returns the smallest value found and its location.
pub fn minimize_on_box(oracle: &FunctionOracle, domain: &AxisBox, seed: u64) -> Result<(f64, Point)> {
    if oracle.dim() != domain.dim() {
        return Err(Error::contract("box and oracle dimensions differ"));
    }
    let mut starts = domain.corners();
    starts.push(domain.midpoint());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STARTS {
        let u: Vec<f64> = (0..domain.dim()).map(|_| rng.gen::<f64>()).collect();
        starts.push(domain.from_unit(&u));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let (v, x) = descend(oracle, domain, s.into_vec())?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x));
        }
    }
    let (v, x) = best.expect("at least one start");
    Ok((v, Point::new(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_huber, make_pl_nonconvex, make_quadratic, make_quartic};

    fn plan(lo: f64, hi: f64, dim: usize, n: usize) -> SamplingPlan {
        SamplingPlan::new(AxisBox::cube(dim, lo, hi).unwrap(), n, 1)
    }

    #[test]
    fn square_constants() {
        let f = FunctionOracle::from_fns(1, true, |x| x[0] * x[0], |x| vec![2.0 * x[0]]);
        let p = plan(-5.0, 5.0, 1, 200);
        assert!((estimate_mu(&f, &p).unwrap() - 2.0).abs() < 1e-9);
        assert!((estimate_l(&f, &p).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn diagonal_quadratic_from_lattice() {
        let q = make_quadratic(&[1.0, 4.0]).unwrap();
        let p = plan(-5.0, 5.0, 2, 100);
        assert!((estimate_mu(&q.oracle, &p).unwrap() - 1.0).abs() < 1e-6);
        assert!((estimate_l(&q.oracle, &p).unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn huber_has_no_strong_convexity() {
        let h = make_huber(1.0).unwrap();
        let mu = estimate_mu(&h.oracle, &plan(-3.0, 3.0, 1, 500)).unwrap();
        assert!(mu.abs() < 1e-6);
    }

    #[test]
    fn quartic_l_grows_with_the_box() {
        let q = make_quartic();
        let small = estimate_l(&q.oracle, &plan(-1.0, 1.0, 1, 1000)).unwrap();
        let large = estimate_l(&q.oracle, &plan(-3.0, 3.0, 1, 1000)).unwrap();
        assert!(small <= 12.0 && small > 10.0, "{small}");
        assert!(large <= 108.0 && large > 90.0, "{large}");
    }

    #[test]
    fn degenerate_only_is_an_error() {
        let q = make_quadratic(&[1.0]).unwrap();
        let x = Point::scalar(1.0).unwrap();
        assert!(estimate_mu_on_pairs(&q.oracle, &[(x.clone(), x)]).is_err());
        assert!(estimate_l_on_pairs(&q.oracle, &[]).is_err());
    }

    #[test]
    fn minimizer_finds_global_minimum() {
        let e = make_pl_nonconvex();
        let (v, x) = minimize_on_box(&e.oracle, &AxisBox::cube(1, -10.0, 10.0).unwrap(), 3).unwrap();
        assert!(v < 1e-12, "{v}");
        assert!(x[0].abs() < 1e-5);
    }
}
