//! Benchmark functions with analytically known constants and conjugates.
//!
//! Families are registered by name in a [`ZooRegistry`] and built from
//! [`ZooParams`], so front ends can select them at runtime.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, ScalarConstants, SelectionRule};
use crate::point::{AxisBox, Point};

/// Where a conjugate is finite. Outside it the conjugate is +∞ and checks
/// skip the point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateDomain {
    Box(AxisBox),
    /// The probability simplex {p ≥ 0, Σ p = 1} in ℝⁿ.
    Simplex { dim: usize },
}

const SIMPLEX_TOL: f64 = 1e-12;

impl ConjugateDomain {
    pub fn contains(&self, s: &[f64]) -> bool {
        match self {
            ConjugateDomain::Box(b) => b.contains(s),
            ConjugateDomain::Simplex { dim } => {
                s.len() == *dim
                    && s.iter().all(|p| *p >= 0.0)
                    && (s.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL
            }
        }
    }

    /// Maps a point of the bounding box into the domain, if possible.
    /// For the simplex the last coordinate is replaced by 1 − Σ(others).
    pub fn project(&self, s: &[f64]) -> Option<Point> {
        match self {
            ConjugateDomain::Box(b) => b.contains(s).then(|| Point::new(s.to_vec()).ok())?,
            ConjugateDomain::Simplex { dim } => {
                if s.len() != *dim {
                    return None;
                }
                let mut p = s.to_vec();
                let head: f64 = p[..dim - 1].iter().sum();
                p[dim - 1] = 1.0 - head;
                p.iter().all(|v| *v > 0.0).then(|| Point::new(p).ok())?
            }
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            ConjugateDomain::Box(b) => b.clone(),
            ConjugateDomain::Simplex { dim } => {
                AxisBox::cube(*dim, 0.0, 1.0).expect("unit cube is valid")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: String,
    pub oracle: FunctionOracle,
    pub constants: ScalarConstants,
    pub conjugate: Option<FunctionOracle>,
    pub conjugate_domain: Option<ConjugateDomain>,
    pub convex: bool,
    /// Primal box used when the caller does not supply one.
    pub default_box: AxisBox,
}

impl ZooEntry {
    pub fn dim(&self) -> usize {
        self.oracle.dim()
    }

    /// Whether the conjugate is finite at `s`.
    pub fn conjugate_defined_at(&self, s: &[f64]) -> bool {
        self.conjugate.is_some()
            && self
                .conjugate_domain
                .as_ref()
                .is_none_or(|d| d.contains(s))
    }
}

/// Parameters for parameterized families; unused fields are ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZooParams {
    pub diag: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub dim: Option<usize>,
}

/// A named family of benchmark functions.
pub trait ZooFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn build(&self, params: &ZooParams) -> Result<ZooEntry>;
}

struct FnFamily {
    name: &'static str,
    summary: &'static str,
    build: BuildFn,
}

impl ZooFamily for FnFamily {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn build(&self, params: &ZooParams) -> Result<ZooEntry> {
        (self.build)(params)
    }
}

type BuildFn = fn(&ZooParams) -> Result<ZooEntry>;

pub struct ZooRegistry {
    families: Vec<Box<dyn ZooFamily>>,
}

impl ZooRegistry {
    pub fn empty() -> Self {
        ZooRegistry {
            families: Vec::new(),
        }
    }

    /// Registry with every built-in family.
    pub fn standard() -> Self {
        let mut r = ZooRegistry::empty();
        let builtins: [(&'static str, &'static str, BuildFn); 9] = [
            ("quadratic", "1/2 sum d_i x_i^2 (--diag)", |p| {
                make_quadratic(p.diag.as_deref().unwrap_or(&[1.0]))
            }),
            ("huber", "Huber loss with threshold delta (--delta)", |p| {
                make_huber(p.delta.unwrap_or(1.0))
            }),
            ("pl_nonconvex", "x^2 + 3 sin^2 x", |_| Ok(make_pl_nonconvex())),
            ("logsumexp", "log sum exp x_i (--dim)", |p| {
                make_logsumexp(p.dim.unwrap_or(2))
            }),
            ("abs", "|x|", |_| Ok(make_abs())),
            ("quadratic_abs", "1/2 x^2 + |x|", |_| Ok(make_quadratic_abs())),
            ("sin", "sin x", |_| Ok(make_sin())),
            ("quartic", "x^4", |_| Ok(make_quartic())),
            ("neg_square", "-x^2", |_| Ok(make_neg_square())),
        ];
        for (name, summary, build) in builtins {
            r.register(Box::new(FnFamily {
                name,
                summary,
                build,
            }));
        }
        r
    }

    /// Adds a family; a later registration under the same name wins.
    pub fn register(&mut self, family: Box<dyn ZooFamily>) {
        self.families.retain(|f| f.name() != family.name());
        self.families.push(family);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.iter().map(|f| f.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn ZooFamily> {
        self.families
            .iter()
            .find(|f| f.name() == name)
            .map(|f| f.as_ref())
    }

    pub fn build(&self, name: &str, params: &ZooParams) -> Result<ZooEntry> {
        self.get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?
            .build(params)
    }

    /// One tab-separated line per family, built with default parameters:
    /// name, dimension, mu, L, min value.
    pub fn list_lines(&self) -> Vec<String> {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
        self.families
            .iter()
            .map(|f| match f.build(&ZooParams::default()) {
                Ok(e) => format!(
                    "{}\t{}\tmu={}\tL={}\tfmin={}",
                    f.name(),
                    e.dim(),
                    fmt(e.constants.known_mu),
                    fmt(e.constants.known_l),
                    fmt(e.constants.known_min_value),
                ),
                Err(err) => format!("{}\t-\terror: {err}", f.name()),
            })
            .collect()
    }
}

impl Default for ZooRegistry {
    fn default() -> Self {
        ZooRegistry::standard()
    }
}

fn cube(dim: usize, lo: f64, hi: f64) -> AxisBox {
    AxisBox::cube(dim, lo, hi).expect("static box is valid")
}

fn origin(dim: usize) -> Option<Point> {
    Some(Point::zeros(dim))
}

/// f(x) = ½ Σ dᵢ xᵢ², μ = min dᵢ, L = max dᵢ, f*(s) = ½ Σ sᵢ² / dᵢ.
pub fn make_quadratic(diag: &[f64]) -> Result<ZooEntry> {
    if diag.is_empty() {
        return Err(Error::contract("quadratic needs at least one diagonal entry"));
    }
    if let Some(bad) = diag.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::contract(format!(
            "quadratic diagonal entries must be > 0, got {bad}"
        )));
    }
    let n = diag.len();
    let mu = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let l = diag.iter().copied().fold(0.0, f64::max);
    let (d1, d2, d3, d4) = (diag.to_vec(), diag.to_vec(), diag.to_vec(), diag.to_vec());
    let oracle = FunctionOracle::builder(
        n,
        move |x| 0.5 * x.iter().zip(&d1).map(|(xi, di)| di * xi * xi).sum::<f64>(),
        move |x| x.iter().zip(&d2).map(|(xi, di)| di * xi).collect(),
    )
    .separable(true)
    .label(format!("quadratic{diag:?}"))
    .build();
    let conjugate = FunctionOracle::builder(
        n,
        move |s| 0.5 * s.iter().zip(&d3).map(|(si, di)| si * si / di).sum::<f64>(),
        move |s| s.iter().zip(&d4).map(|(si, di)| si / di).collect(),
    )
    .separable(true)
    .label(format!("quadratic{diag:?}*"))
    .build();
    Ok(ZooEntry {
        name: "quadratic".into(),
        oracle,
        constants: ScalarConstants::new(Some(mu), Some(l), Some(0.0), origin(n))?,
        conjugate: Some(conjugate),
        conjugate_domain: None,
        convex: true,
        default_box: cube(n, -5.0, 5.0),
    })
}

/// Huber loss: ½x² on |x| ≤ δ, δ|x| − ½δ² beyond. L = 1, μ = 0,
/// f*(s) = ½s² on [−δ, δ].
pub fn make_huber(delta: f64) -> Result<ZooEntry> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::contract(format!("huber delta must be > 0, got {delta}")));
    }
    let oracle = FunctionOracle::builder(
        1,
        move |x| {
            let a = x[0].abs();
            if a <= delta {
                0.5 * x[0] * x[0]
            } else {
                delta * a - 0.5 * delta * delta
            }
        },
        move |x| vec![x[0].clamp(-delta, delta)],
    )
    .label(format!("huber({delta})"))
    .build();
    let conjugate = FunctionOracle::builder(1, |s| 0.5 * s[0] * s[0], |s| vec![s[0]])
        .label(format!("huber({delta})*"))
        .build();
    Ok(ZooEntry {
        name: "huber".into(),
        oracle,
        constants: ScalarConstants::new(Some(0.0), Some(1.0), Some(0.0), origin(1))?,
        conjugate: Some(conjugate),
        conjugate_domain: Some(ConjugateDomain::Box(cube(1, -delta, delta))),
        convex: true,
        default_box: cube(1, -3.0, 3.0),
    })
}

/// x² + 3 sin² x: nonconvex, minimum 0 at 0, |f″| ≤ 8.
///
/// No strong-convexity constant is stored; its PL constant is established
/// numerically by the certification layer.
pub fn make_pl_nonconvex() -> ZooEntry {
    let oracle = FunctionOracle::builder(
        1,
        |x| {
            let s = x[0].sin();
            x[0] * x[0] + 3.0 * s * s
        },
        |x| vec![2.0 * x[0] + 3.0 * (2.0 * x[0]).sin()],
    )
    .label("x^2+3sin^2(x)")
    .build();
    ZooEntry {
        name: "pl_nonconvex".into(),
        oracle,
        constants: ScalarConstants::new(None, Some(8.0), Some(0.0), origin(1))
            .expect("static constants"),
        conjugate: None,
        conjugate_domain: None,
        convex: false,
        default_box: cube(1, -3.0, 3.0),
    }
}

/// log Σ exp xᵢ. L = 1, μ = 0; the conjugate is the negative entropy
/// Σ pᵢ ln pᵢ on the probability simplex.
pub fn make_logsumexp(n: usize) -> Result<ZooEntry> {
    if n == 0 {
        return Err(Error::contract("logsumexp needs n >= 1"));
    }
    let softmax = |x: &[f64]| -> Vec<f64> {
        let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = e.iter().sum();
        e.into_iter().map(|v| v / z).collect()
    };
    let oracle = FunctionOracle::builder(
        n,
        |x| {
            let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + x.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
        },
        softmax,
    )
    .separable(n == 1)
    .label(format!("logsumexp({n})"))
    .build();
    let domain = ConjugateDomain::Simplex { dim: n };
    let (d1, d2) = (domain.clone(), domain.clone());
    let conjugate = FunctionOracle::builder(
        n,
        move |p| {
            if !d1.contains(p) {
                return f64::INFINITY;
            }
            p.iter()
                .map(|v| if *v > 0.0 { v * v.ln() } else { 0.0 })
                .sum()
        },
        move |p| {
            if !d2.contains(p) {
                return vec![f64::NAN; p.len()];
            }
            p.iter().map(|v| v.ln() + 1.0).collect()
        },
    )
    .label(format!("logsumexp({n})*"))
    .build();
    Ok(ZooEntry {
        name: "logsumexp".into(),
        oracle,
        constants: ScalarConstants::new(Some(0.0), Some(1.0), None, None)?,
        conjugate: Some(conjugate),
        conjugate_domain: Some(domain),
        convex: true,
        default_box: cube(n, -2.0, 2.0),
    })
}

fn sign_select(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// |x| with selection sign(x), 0 at the kink. μ = 0, no L; f* = 0 on [−1, 1].
pub fn make_abs() -> ZooEntry {
    let oracle = FunctionOracle::builder(1, |x| x[0].abs(), |x| vec![sign_select(x[0])])
        .nonsmooth(SelectionRule::ConvexSubgradient)
        .label("abs")
        .build();
    let conjugate = FunctionOracle::builder(1, |_| 0.0, |_| vec![0.0])
        .label("abs*")
        .build();
    ZooEntry {
        name: "abs".into(),
        oracle,
        constants: ScalarConstants::new(Some(0.0), None, Some(0.0), origin(1))
            .expect("static constants"),
        conjugate: Some(conjugate),
        conjugate_domain: Some(ConjugateDomain::Box(cube(1, -1.0, 1.0))),
        convex: true,
        default_box: cube(1, -2.0, 2.0),
    }
}

/// ½x² + |x|: strongly convex with μ = 1 and nonsmooth at 0. No conjugate is
/// stored so that duality checks go through the numerical conjugate.
pub fn make_quadratic_abs() -> ZooEntry {
    let oracle = FunctionOracle::builder(
        1,
        |x| 0.5 * x[0] * x[0] + x[0].abs(),
        |x| vec![x[0] + sign_select(x[0])],
    )
    .nonsmooth(SelectionRule::ConvexSubgradient)
    .label("x^2/2+|x|")
    .build();
    ZooEntry {
        name: "quadratic_abs".into(),
        oracle,
        constants: ScalarConstants::new(Some(1.0), None, Some(0.0), origin(1))
            .expect("static constants"),
        conjugate: None,
        conjugate_domain: None,
        convex: true,
        default_box: cube(1, -5.0, 5.0),
    }
}

/// sin x: 1-smooth, not convex.
pub fn make_sin() -> ZooEntry {
    let oracle = FunctionOracle::builder(1, |x| x[0].sin(), |x| vec![x[0].cos()])
        .label("sin")
        .build();
    ZooEntry {
        name: "sin".into(),
        oracle,
        constants: ScalarConstants::new(None, Some(1.0), Some(-1.0), None)
            .expect("static constants"),
        conjugate: None,
        conjugate_domain: None,
        convex: false,
        default_box: cube(1, 0.0, 2.0 * PI),
    }
}

/// x⁴: convex, smooth, neither strongly convex nor globally L-smooth.
pub fn make_quartic() -> ZooEntry {
    let oracle = FunctionOracle::builder(1, |x| x[0].powi(4), |x| vec![4.0 * x[0].powi(3)])
        .label("x^4")
        .build();
    ZooEntry {
        name: "quartic".into(),
        oracle,
        constants: ScalarConstants::new(Some(0.0), None, Some(0.0), origin(1))
            .expect("static constants"),
        conjugate: None,
        conjugate_domain: None,
        convex: true,
        default_box: cube(1, -1.0, 1.0),
    }
}

/// −x²: concave, 2-smooth.
pub fn make_neg_square() -> ZooEntry {
    let oracle = FunctionOracle::builder(1, |x| -x[0] * x[0], |x| vec![-2.0 * x[0]])
        .label("-x^2")
        .build();
    ZooEntry {
        name: "neg_square".into(),
        oracle,
        constants: ScalarConstants::new(None, Some(2.0), None, None).expect("static constants"),
        conjugate: None,
        conjugate_domain: None,
        convex: false,
        default_box: cube(1, -1.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_constants_and_conjugate() {
        let q = make_quadratic(&[1.0, 4.0]).unwrap();
        assert_eq!(q.constants.known_mu, Some(1.0));
        assert_eq!(q.constants.known_l, Some(4.0));
        let c = q.conjugate.as_ref().unwrap();
        assert_eq!(c.value(&[2.0, 4.0]).unwrap(), 0.5 * (4.0 + 16.0 / 4.0));

        let q2 = make_quadratic(&[2.0]).unwrap();
        assert_eq!(q2.oracle.value(&[3.0]).unwrap(), 9.0);
        assert_eq!(q2.conjugate.unwrap().value(&[3.0]).unwrap(), 2.25);
    }

    #[test]
    fn quadratic_rejects_nonpositive() {
        assert!(make_quadratic(&[1.0, 0.0]).is_err());
        assert!(make_quadratic(&[-1.0]).is_err());
        assert!(make_quadratic(&[]).is_err());
    }

    #[test]
    fn unit_quadratic_is_self_conjugate() {
        let q = make_quadratic(&[1.0]).unwrap();
        let c = q.conjugate.unwrap();
        let worst = crate::point::linspace(-5.0, 5.0, 1001)
            .into_iter()
            .map(|s| (c.value(&[s]).unwrap() - q.oracle.value(&[s]).unwrap()).abs())
            .fold(0.0, f64::max);
        assert_eq!(worst, 0.0);
    }

    #[test]
    fn huber_branches() {
        let h = make_huber(1.0).unwrap();
        assert_eq!(h.oracle.value(&[2.0]).unwrap(), 1.5);
        assert_eq!(h.oracle.grad_select(&[3.0]).unwrap(), vec![1.0]);
        assert_eq!(h.oracle.grad_select(&[-0.25]).unwrap(), vec![-0.25]);
        assert!(make_huber(0.0).is_err());
        assert!(h.conjugate_defined_at(&[1.0]));
        assert!(!h.conjugate_defined_at(&[1.5]));
    }

    #[test]
    fn pl_nonconvex_values() {
        let e = make_pl_nonconvex();
        assert_eq!(e.oracle.value(&[0.0]).unwrap(), 0.0);
        assert_eq!(e.oracle.grad_select(&[0.0]).unwrap(), vec![0.0]);
        assert!((e.oracle.value(&[1.0]).unwrap() - 3.124_220_254_820_713_6).abs() < 1e-12);
        assert!(!e.convex);
        assert!(e.constants.known_mu.is_none());
    }

    #[test]
    fn logsumexp_values() {
        let e = make_logsumexp(2).unwrap();
        assert!((e.oracle.value(&[0.0, 0.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(e.oracle.grad_select(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        let c = e.conjugate.as_ref().unwrap();
        // Fenchel–Young equality at the matching pair x = 0, p = softmax(0).
        let fy = e.oracle.value(&[0.0, 0.0]).unwrap() + c.value(&[0.5, 0.5]).unwrap();
        assert!(fy.abs() < 1e-15);
        assert!(c.value(&[0.7, 0.7]).is_err());
        assert!(make_logsumexp(0).is_err());
    }

    #[test]
    fn abs_examples() {
        let e = make_abs();
        assert_eq!(e.oracle.value(&[-2.0]).unwrap(), 2.0);
        assert_eq!(e.oracle.grad_select(&[-2.0]).unwrap(), vec![-1.0]);
        assert_eq!(e.oracle.grad_select(&[0.0]).unwrap(), vec![0.0]);
        // subgradient inequality at the kink: f(1) >= f(0) + 0 * (1 - 0)
        assert!(e.oracle.value(&[1.0]).unwrap() >= 0.0);
        assert_eq!(e.oracle.selection_rule(), SelectionRule::ConvexSubgradient);
    }

    #[test]
    fn simplex_projection() {
        let d = ConjugateDomain::Simplex { dim: 3 };
        let p = d.project(&[0.2, 0.3, 0.9]).unwrap();
        assert!((p[2] - 0.5).abs() < 1e-15);
        assert!(d.contains(&p));
        assert!(d.project(&[0.7, 0.6, 0.0]).is_none());
    }

    #[test]
    fn registry_lookup_and_listing() {
        let r = ZooRegistry::standard();
        assert!(r.names().contains(&"quadratic"));
        let q = r
            .build(
                "quadratic",
                &ZooParams {
                    diag: Some(vec![1.0, 4.0]),
                    ..Default::default()
                },
            )
            .unwrap();
        assert_eq!(q.dim(), 2);
        assert!(matches!(
            r.build("nope", &ZooParams::default()),
            Err(Error::UnknownName(_))
        ));
        let lines = r.list_lines();
        assert_eq!(lines.len(), r.names().len());
        assert!(lines.iter().any(|l| l == "quadratic\t1\tmu=1\tL=1\tfmin=0"));
        assert!(lines.iter().all(|l| l.split('\t').count() == 5));
    }
}
