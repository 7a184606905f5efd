//! Linear-time discrete Legendre transform.
//!
//! 1. Lower convex hull of `(xs, values)` by a monotone chain driven by
//!    floating-point edge slopes, so the kept edge slopes are strictly
//!    increasing as computed.
//! 2. Points dropped within rounding distance of their hull edge are kept
//!    in per-edge "near" lists.
//! 3. A single pointer walks the hull while the sorted query slopes
//!    advance. Around the selected vertex, neighbouring vertices and near
//!    lists are rescanned only when their scores can still reach the best
//!    score; for any slope not within rounding distance of an edge slope this
//!    is O(1).
//!
//! The result is the exact floating-point maximum of `s * x - v` over the
//! input samples, i.e. bit-identical to brute force.

use super::{ConjugateResult, GridFunction};
use crate::error::{Error, Result};

#[inline]
pub(crate) fn score(s: f64, x: f64, v: f64) -> f64 {
    s * x - v
}

struct Hull {
    /// Indices of hull vertices, increasing.
    vertices: Vec<usize>,
    /// `edge_slopes[k]` is the slope from vertex k to vertex k+1.
    edge_slopes: Vec<f64>,
    /// Near-collinear dropped points of edge k: `near[near_start[k]..near_start[k+1]]`.
    near: Vec<usize>,
    near_start: Vec<usize>,
}

fn slope(xs: &[f64], vs: &[f64], a: usize, b: usize) -> f64 {
    (vs[b] - vs[a]) / (xs[b] - xs[a])
}

fn lower_hull(xs: &[f64], vs: &[f64], tau: f64) -> Hull {
    let mut vertices: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while vertices.len() >= 2 {
            let a = vertices[vertices.len() - 2];
            let b = vertices[vertices.len() - 1];
            if slope(xs, vs, a, b) >= slope(xs, vs, b, i) {
                vertices.pop();
            } else {
                break;
            }
        }
        vertices.push(i);
    }
    let edge_slopes: Vec<f64> = vertices
        .windows(2)
        .map(|w| slope(xs, vs, w[0], w[1]))
        .collect();
    let mut near = Vec::new();
    let mut near_start = Vec::with_capacity(edge_slopes.len() + 1);
    for (k, w) in vertices.windows(2).enumerate() {
        near_start.push(near.len());
        let (a, b) = (w[0], w[1]);
        for i in a + 1..b {
            let gap = vs[i] - (vs[a] + edge_slopes[k] * (xs[i] - xs[a]));
            if gap <= tau {
                near.push(i);
            }
        }
    }
    near_start.push(near.len());
    Hull {
        vertices,
        edge_slopes,
        near,
        near_start,
    }
}

/// Edge slopes of the lower convex hull, strictly increasing as computed.
pub(crate) fn hull_slopes(xs: &[f64], vs: &[f64]) -> Vec<f64> {
    lower_hull(xs, vs, 0.0).edge_slopes
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn llt_1d(input: &GridFunction, slopes: &[f64]) -> Result<ConjugateResult> {
    if slopes.iter().any(|s| !s.is_finite()) {
        return Err(Error::contract("slopes must be finite"));
    }
    if let Some(w) = slopes.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::contract(format!(
            "slopes not sorted at index {}",
            w + 1
        )));
    }
    if slopes.is_empty() {
        return Ok(ConjugateResult::empty());
    }
    let xs = input.xs();
    let vs = input.values();

    // Rounding scale: a bound on the error of any computed score or gap,
    // inflated generously. Points farther than `tau` above their hull edge
    // can never be the floating-point maximum.
    let x_scale = max_abs(xs);
    let v_scale = max_abs(vs);
    let s_scale = max_abs(slopes);
    // Hull edge slopes lie within the range of consecutive difference quotients.
    let a_scale = (0..xs.len() - 1)
        .map(|i| slope(xs, vs, i, i + 1).abs())
        .fold(0.0, f64::max);
    let tau = 16.0 * f64::EPSILON * ((s_scale + a_scale) * x_scale + v_scale);
    let margin = 2.0 * tau;
    let hull = lower_hull(xs, vs, tau);

    let verts = &hull.vertices;
    let h = verts.len();
    let mut values = Vec::with_capacity(slopes.len());
    let mut argmax = Vec::with_capacity(slopes.len());
    let mut k = 0usize;
    for &s in slopes {
        while k + 1 < h && hull.edge_slopes[k] < s {
            k += 1;
        }
        let sc = |i: usize| score(s, xs[i], vs[i]);
        let mut best = (sc(verts[k]), verts[k]);
        let consider = |i: usize, best: &mut (f64, usize)| {
            let v = sc(i);
            if v > best.0 || (v == best.0 && i < best.1) {
                *best = (v, i);
            }
        };

        // Edges to the right of vertex k: scores fall from the left endpoint.
        let mut e = k;
        while e + 1 < h {
            let (left, right) = (verts[e], verts[e + 1]);
            let left_score = sc(left);
            if left_score.max(sc(right)) + margin < best.0 {
                break;
            }
            let list = &hull.near[hull.near_start[e]..hull.near_start[e + 1]];
            if let Some(&first) = list.first() {
                let drop = (hull.edge_slopes[e] - s).max(0.0) * (xs[first] - xs[left]);
                if left_score - drop + margin >= best.0 {
                    for &i in list {
                        consider(i, &mut best);
                    }
                }
            }
            consider(right, &mut best);
            e += 1;
        }
        // Edges to the left: scores fall from the right endpoint.
        let mut e = k;
        while e > 0 {
            let (left, right) = (verts[e - 1], verts[e]);
            let right_score = sc(right);
            if right_score.max(sc(left)) + margin < best.0 {
                break;
            }
            let list = &hull.near[hull.near_start[e - 1]..hull.near_start[e]];
            if let Some(&last) = list.last() {
                let drop = (s - hull.edge_slopes[e - 1]).max(0.0) * (xs[right] - xs[last]);
                if right_score - drop + margin >= best.0 {
                    for &i in list {
                        consider(i, &mut best);
                    }
                }
            }
            consider(left, &mut best);
            e -= 1;
        }
        values.push(best.0);
        argmax.push(best.1);
    }
    Ok(ConjugateResult {
        slopes: slopes.to_vec(),
        values,
        argmax_index: argmax,
    })
}
