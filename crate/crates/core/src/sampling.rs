//! Deterministic realization of "for all x, y" and "for all α ∈ [0,1]".
//!
//! A plan yields a fixed lattice (box corners plus midpoint, all ordered
//! pairs of distinct lattice points) followed by seeded pseudorandom
//! triples. Odd-indexed random triples are local: `y` is drawn around `x`
//! with a log-uniform radius, so short pairs are always represented.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::DEFAULT_FD_STEP;
use crate::point::{AxisBox, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub domain: AxisBox,
    pub n_pairs: usize,
    pub n_alphas: usize,
    pub seed: u64,
    pub fd_step: f64,
    /// Prepend the corner/midpoint lattice to the random triples.
    pub lattice: bool,
}

impl SamplingPlan {
    pub fn new(domain: AxisBox, n_pairs: usize, seed: u64) -> Self {
        SamplingPlan {
            domain,
            n_pairs,
            n_alphas: 3,
            seed,
            fd_step: DEFAULT_FD_STEP,
            lattice: true,
        }
    }

    pub fn with_alphas(mut self, n_alphas: usize) -> Self {
        self.n_alphas = n_alphas;
        self
    }

    pub fn with_lattice(mut self, lattice: bool) -> Self {
        self.lattice = lattice;
        self
    }

    pub fn with_domain(&self, domain: AxisBox) -> Self {
        SamplingPlan {
            domain,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_alphas == 0 {
            return Err(Error::contract("n_alphas must be >= 1"));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::contract("fd_step must be a positive finite number"));
        }
        Ok(())
    }

    /// Interior interpolation weights k/(n_alphas+1), k = 1..=n_alphas.
    pub fn alpha_grid(&self) -> Vec<f64> {
        let m = self.n_alphas;
        (1..=m).map(|k| k as f64 / (m + 1) as f64).collect()
    }

    /// Lattice triples (if enabled) followed by the random triples.
    pub fn samples(&self) -> Result<Vec<Sample>> {
        self.validate()?;
        let mut out = if self.lattice {
            lattice_samples(&self.domain)
        } else {
            Vec::new()
        };
        out.extend(sample_points(self)?);
        Ok(out)
    }
}

/// One `(x, y, α)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Point,
    pub y: Point,
    pub alpha: f64,
}

/// Exactly `plan.n_pairs` seeded pseudorandom triples inside `plan.domain`.
pub fn sample_points(plan: &SamplingPlan) -> Result<Vec<Sample>> {
    let domain = &plan.domain;
    let dim = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut out = Vec::with_capacity(plan.n_pairs);
    for k in 0..plan.n_pairs {
        let u: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let x = domain.from_unit(&u);
        let y = if k % 2 == 1 {
            // Local pair: radius in [1e-3, 1] box widths, log-uniform.
            let radius = 10f64.powf(-3.0 * rng.gen::<f64>());
            let coords = (0..dim)
                .map(|i| {
                    let step = radius * domain.width(i) * (2.0 * rng.gen::<f64>() - 1.0);
                    (x[i] + step).clamp(domain.lo()[i], domain.hi()[i])
                })
                .collect();
            Point::from_vec_unchecked(coords)
        } else {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
            domain.from_unit(&v)
        };
        let alpha = rng.gen::<f64>();
        out.push(Sample { x, y, alpha });
    }
    Ok(out)
}

/// All ordered pairs of distinct points among the 2ⁿ corners and the midpoint.
pub fn lattice_samples(domain: &AxisBox) -> Vec<Sample> {
    let mut points = domain.corners();
    points.push(domain.midpoint());
    let mut out = Vec::with_capacity(points.len() * (points.len() - 1));
    for (i, x) in points.iter().enumerate() {
        for (j, y) in points.iter().enumerate() {
            if i != j {
                out.push(Sample {
                    x: x.clone(),
                    y: y.clone(),
                    alpha: 0.5,
                });
            }
        }
    }
    out
}
