//! Points of ℝⁿ and axis-aligned boxes.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite point (or vector) of ℝⁿ with n ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::contract("point must have dimension >= 1"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::contract(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Point::new(vec![v])
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `alpha * x + (1 - alpha) * y`, coordinatewise.
pub fn combine(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
        .collect()
}

/// An axis-aligned box `[lo, hi]` with `lo[i] < hi[i]` on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lo: Point,
    hi: Point,
}

impl AxisBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::contract(format!(
                "box corners have dimensions {} and {}",
                lo.dim(),
                hi.dim()
            )));
        }
        for (i, (a, b)) in lo.iter().zip(hi.iter()).enumerate() {
            if a >= b {
                return Err(Error::contract(format!(
                    "degenerate box on axis {i}: [{a}, {b}]"
                )));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("box dimension must be >= 1"));
        }
        AxisBox::new(Point::new(vec![lo; dim])?, Point::new(vec![hi; dim])?)
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let lo = bounds.iter().map(|b| b.0).collect();
        let hi = bounds.iter().map(|b| b.1).collect();
        AxisBox::new(Point::new(lo)?, Point::new(hi)?)
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn midpoint(&self) -> Point {
        Point::from_vec_unchecked(
            self.lo
                .iter()
                .zip(self.hi.iter())
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )
    }

    /// All 2ⁿ corners, ordered by the binary expansion of their index
    /// (bit i set ⇒ upper bound on axis i).
    pub fn corners(&self) -> Vec<Point> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                Point::from_vec_unchecked(
                    (0..n)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                self.hi[i]
                            } else {
                                self.lo[i]
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Shrinks every side by `fraction` of its width at both ends.
    pub fn shrink(&self, fraction: f64) -> Result<Self> {
        let lo = (0..self.dim())
            .map(|i| self.lo[i] + fraction * self.width(i))
            .collect();
        let hi = (0..self.dim())
            .map(|i| self.hi[i] - fraction * self.width(i))
            .collect();
        AxisBox::new(Point::new(lo)?, Point::new(hi)?)
    }

    /// Maps `u ∈ [0,1]ⁿ` affinely onto the box.
    pub fn from_unit(&self, u: &[f64]) -> Point {
        Point::from_vec_unchecked(
            u.iter()
                .enumerate()
                .map(|(i, t)| self.lo[i] + t * self.width(i))
                .collect(),
        )
    }

    /// Smallest box containing all `points`; `None` if it would be degenerate.
    pub fn bounding<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut lo: Vec<f64> = Vec::new();
        let mut hi: Vec<f64> = Vec::new();
        for p in points {
            if lo.is_empty() {
                lo = p.to_vec();
                hi = p.to_vec();
                continue;
            }
            for (i, v) in p.iter().enumerate() {
                lo[i] = lo[i].min(*v);
                hi[i] = hi[i].max(*v);
            }
        }
        AxisBox::new(Point::new(lo).ok()?, Point::new(hi).ok()?).ok()
    }
}

/// `n` evenly spaced values from `lo` to `hi`, both endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
