//! Numerical Fenchel conjugation: f*(s) = sup_x (sᵀx − f(x)).
//!
//! Grid transforms are exposed through the [`Conjugator`] trait so the
//! linear-time engine and the exhaustive reference can be swapped by name.

mod gradient;
mod grid;
mod llt;

pub use gradient::{conjugate_gradient, ArgmaxPoint, RESIDUAL_TOL};
pub use grid::GridFunction;
pub use llt::llt_1d;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::FunctionOracle;
use crate::point::{dot, linspace, AxisBox, Point};

/// Conjugate samples at the query slopes, with the maximizing input index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugateResult {
    pub slopes: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax_index: Vec<usize>,
}

impl ConjugateResult {
    pub fn empty() -> Self {
        ConjugateResult {
            slopes: Vec::new(),
            values: Vec::new(),
            argmax_index: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    /// The conjugate as a grid function over the slopes (needs ≥ 2 distinct slopes).
    pub fn to_grid(&self) -> Result<GridFunction> {
        GridFunction::new(self.slopes.clone(), self.values.clone())
    }

    /// Writes `s,fstar` CSV; an empty result gives a header-only file.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["s", "fstar"])?;
        for (s, v) in self.slopes.iter().zip(&self.values) {
            w.write_record([format!("{s:?}"), format!("{v:?}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A discrete Legendre transform of a sampled 1-D function.
pub trait Conjugator: Send + Sync {
    fn name(&self) -> &'static str;

    fn transform(&self, input: &GridFunction, slopes: &[f64]) -> Result<ConjugateResult>;
}

/// Hull + merge, O(n + m).
pub struct LinearTime;

impl Conjugator for LinearTime {
    fn name(&self) -> &'static str {
        "llt"
    }

    fn transform(&self, input: &GridFunction, slopes: &[f64]) -> Result<ConjugateResult> {
        llt_1d(input, slopes)
    }
}

/// Exhaustive maximization, O(n·m).
pub struct BruteForce;

impl Conjugator for BruteForce {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn transform(&self, input: &GridFunction, slopes: &[f64]) -> Result<ConjugateResult> {
        let mut values = Vec::with_capacity(slopes.len());
        let mut argmax_index = Vec::with_capacity(slopes.len());
        for &s in slopes {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (i, (x, v)) in input.xs().iter().zip(input.values()).enumerate() {
                let sc = llt::score(s, *x, *v);
                if sc > best.0 {
                    best = (sc, i);
                }
            }
            values.push(best.0);
            argmax_index.push(best.1);
        }
        Ok(ConjugateResult {
            slopes: slopes.to_vec(),
            values,
            argmax_index,
        })
    }
}

/// Looks up a grid conjugation engine by name (`llt` or `brute`).
pub fn engine(name: &str) -> Result<Box<dyn Conjugator>> {
    match name {
        "llt" => Ok(Box::new(LinearTime)),
        "brute" => Ok(Box::new(BruteForce)),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

pub const ENGINES: [&str; 2] = ["llt", "brute"];

const MAX_BRUTE_DIM: usize = 3;

/// max over the tensor grid (`grid_n` points per axis) of sᵀx − f(x).
pub fn conjugate_brute(
    oracle: &FunctionOracle,
    domain: &AxisBox,
    grid_n: usize,
    s: &Point,
) -> Result<f64> {
    let n = oracle.dim();
    if n > MAX_BRUTE_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if domain.dim() != n || s.dim() != n {
        return Err(Error::contract("box, slope and oracle dimensions differ"));
    }
    if grid_n < 2 {
        return Err(Error::contract("grid_n must be >= 2"));
    }
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| linspace(domain.lo()[i], domain.hi()[i], grid_n))
        .collect();
    let mut index = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        for i in 0..n {
            x[i] = axes[i][index[i]];
        }
        let v = dot(s, &x) - oracle.value(&x)?;
        if v > best {
            best = v;
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == n {
                return Ok(best);
            }
            index[axis] += 1;
            if index[axis] < grid_n {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// max over the grid of |f**(x) − f(x)| for a 1-D oracle, with f** computed
/// by two successive linear-time transforms.
///
/// The intermediate slopes are the hull edge slopes, where f* has its
/// breakpoints, so f** is the discrete lower convex envelope exactly.
pub fn biconjugate_gap(oracle: &FunctionOracle, domain: &AxisBox, grid_n: usize) -> Result<f64> {
    if oracle.dim() != 1 {
        return Err(Error::UnsupportedDimension(oracle.dim()));
    }
    let grid = GridFunction::sample(oracle, domain.lo()[0], domain.hi()[0], grid_n)?;
    let (xs, vs) = (grid.xs(), grid.values());
    let slopes = llt::hull_slopes(xs, vs);
    let conj = llt_1d(&grid, &slopes)?;
    let envelope: Vec<f64> = if conj.len() == 1 {
        xs.iter()
            .map(|x| conj.slopes[0] * x - conj.values[0])
            .collect()
    } else {
        llt_1d(&conj.to_grid()?, xs)?.values
    };
    Ok(envelope
        .iter()
        .zip(vs)
        .map(|(e, v)| (e - v).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{make_abs, make_huber, make_neg_square, make_quadratic, make_quartic};

    fn pt(v: f64) -> Point {
        Point::scalar(v).unwrap()
    }

    #[test]
    fn brute_half_square_is_self_conjugate() {
        let q = make_quadratic(&[1.0]).unwrap();
        let b = AxisBox::cube(1, -10.0, 10.0).unwrap();
        let v = conjugate_brute(&q.oracle, &b, 20001, &pt(2.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn brute_scaled_square() {
        let q = make_quadratic(&[2.0]).unwrap();
        let b = AxisBox::cube(1, -10.0, 10.0).unwrap();
        let v = conjugate_brute(&q.oracle, &b, 20001, &pt(3.0)).unwrap();
        assert!((v - 2.25).abs() < 1e-12);
    }

    #[test]
    fn brute_abs_inside_unit_slopes() {
        let a = make_abs();
        let b = AxisBox::cube(1, -10.0, 10.0).unwrap();
        let v = conjugate_brute(&a.oracle, &b, 20001, &pt(0.5)).unwrap();
        assert!(v.abs() < 1e-4);
    }

    #[test]
    fn brute_huber() {
        let h = make_huber(1.0).unwrap();
        let b = AxisBox::cube(1, -50.0, 50.0).unwrap();
        let v = conjugate_brute(&h.oracle, &b, 100_001, &pt(0.5)).unwrap();
        assert!((v - 0.125).abs() < 1e-6);
    }

    #[test]
    fn brute_rejects_high_dimension() {
        let q = make_quadratic(&[1.0; 4]).unwrap();
        let b = AxisBox::cube(4, -1.0, 1.0).unwrap();
        let s = Point::new(vec![0.0; 4]).unwrap();
        assert_eq!(
            conjugate_brute(&q.oracle, &b, 3, &s).unwrap_err(),
            Error::UnsupportedDimension(4)
        );
    }

    #[test]
    fn brute_two_dimensional() {
        let q = make_quadratic(&[1.0, 4.0]).unwrap();
        let b = AxisBox::cube(2, -2.0, 2.0).unwrap();
        let s = Point::new(vec![1.0, 1.0]).unwrap();
        let v = conjugate_brute(&q.oracle, &b, 401, &s).unwrap();
        assert!((v - 0.5 * (1.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn biconjugate_examples() {
        let unit = AxisBox::cube(1, -1.0, 1.0).unwrap();
        let quartic = biconjugate_gap(&make_quartic().oracle, &unit, 4001).unwrap();
        assert!(quartic <= 1e-5, "{quartic}");
        let concave = biconjugate_gap(&make_neg_square().oracle, &unit, 4001).unwrap();
        assert!((concave - 1.0).abs() <= 1e-6, "{concave}");
        let half = make_quadratic(&[1.0]).unwrap();
        let gap = biconjugate_gap(&half.oracle, &AxisBox::cube(1, -5.0, 5.0).unwrap(), 4001).unwrap();
        assert!(gap <= 1e-9, "{gap}");
    }

    #[test]
    fn biconjugate_of_affine() {
        let f = FunctionOracle::from_fns(1, true, |x| 2.0 * x[0] + 1.0, |_| vec![2.0]);
        let gap = biconjugate_gap(&f, &AxisBox::cube(1, 0.0, 1.0).unwrap(), 3).unwrap();
        assert!(gap <= 1e-15);
    }

    #[test]
    fn engines_by_name() {
        assert_eq!(engine("llt").unwrap().name(), "llt");
        assert_eq!(engine("brute").unwrap().name(), "brute");
        assert!(engine("fft").is_err());
    }

    #[test]
    fn result_csv_header_only_when_empty() {
        let mut buf = Vec::new();
        ConjugateResult::empty().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "s,fstar\n");
    }
}
