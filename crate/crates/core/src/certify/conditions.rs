//! One inequality template per [`ConditionId`], oriented as `lhs ≥ rhs`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, QuadraticShift};
use crate::point::{combine, dot, norm, norm_sq, sub};
use crate::zoo::ZooEntry;

use super::ConditionId;

/// What a template consumes from a sample `(x, y, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Uses `x` only.
    Point,
    /// Uses `x` and `y`; degenerate pairs are skipped.
    Pair,
    /// Uses `x`, `y` and interpolation weights; degenerate pairs are skipped.
    Interpolation,
}

/// Constants an inequality may refer to.
#[derive(Clone, Copy, Default)]
pub struct Params<'a> {
    pub mu: f64,
    pub l: f64,
    pub f_min: f64,
    /// Source of f* and its domain for the conjugate relations.
    pub entry: Option<&'a ZooEntry>,
}

/// Both sides of one evaluated inequality, plus the magnitude used for the
/// relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub scale: f64,
}

impl Sides {
    fn new(lhs: f64, rhs: f64) -> Self {
        Sides {
            lhs,
            rhs,
            scale: lhs.abs().max(rhs.abs()),
        }
    }

    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub trait Inequality: Send + Sync {
    fn id(&self) -> ConditionId;

    fn shape(&self) -> Shape;

    /// Conditions that reference ∇f reject nonsmooth oracles.
    fn needs_smooth(&self) -> bool {
        false
    }

    /// The function the template is evaluated on; the identity unless the
    /// condition is stated through a transformed function.
    fn subject(&self, f: &FunctionOracle, _p: &Params) -> FunctionOracle {
        f.clone()
    }

    /// `None` means the sample is outside the condition's domain.
    fn sides(
        &self,
        f: &FunctionOracle,
        p: &Params,
        x: &[f64],
        y: &[f64],
        alpha: f64,
    ) -> Result<Option<Sides>>;
}

type SidesFn = fn(&FunctionOracle, &Params, &[f64], &[f64], f64) -> Result<Option<Sides>>;

struct Template {
    id: ConditionId,
    shape: Shape,
    smooth: bool,
    eval: SidesFn,
}

impl Inequality for Template {
    fn id(&self) -> ConditionId {
        self.id
    }

    fn shape(&self) -> Shape {
        self.shape
    }

    fn needs_smooth(&self) -> bool {
        self.smooth
    }

    fn sides(
        &self,
        f: &FunctionOracle,
        p: &Params,
        x: &[f64],
        y: &[f64],
        alpha: f64,
    ) -> Result<Option<Sides>> {
        (self.eval)(f, p, x, y, alpha)
    }
}

/// Jensen's inequality on g = sign·f + (c/2)‖·‖², with c = curvature(p).
struct ShiftedJensen {
    id: ConditionId,
    sign: f64,
    curvature: fn(&Params) -> f64,
    smooth: bool,
}

impl Inequality for ShiftedJensen {
    fn id(&self) -> ConditionId {
        self.id
    }

    fn shape(&self) -> Shape {
        Shape::Interpolation
    }

    fn needs_smooth(&self) -> bool {
        self.smooth
    }

    fn subject(&self, f: &FunctionOracle, p: &Params) -> FunctionOracle {
        FunctionOracle::new(QuadraticShift {
            inner: f.clone(),
            sign: self.sign,
            curvature: (self.curvature)(p),
        })
    }

    fn sides(
        &self,
        g: &FunctionOracle,
        p: &Params,
        x: &[f64],
        y: &[f64],
        alpha: f64,
    ) -> Result<Option<Sides>> {
        jensen(g, p, x, y, alpha)
    }
}

fn grads(f: &FunctionOracle, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((f.grad_select(x)?, f.grad_select(y)?))
}

fn jensen(f: &FunctionOracle, _: &Params, x: &[f64], y: &[f64], a: f64) -> Result<Option<Sides>> {
    let z = combine(a, x, y);
    let chord = a * f.value(x)? + (1.0 - a) * f.value(y)?;
    Ok(Some(Sides::new(chord, f.value(&z)?)))
}

fn first_order(f: &FunctionOracle, _: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let sx = f.grad_select(x)?;
    let rhs = f.value(x)? + dot(&sx, &sub(y, x));
    Ok(Some(Sides::new(f.value(y)?, rhs)))
}

fn monotone(f: &FunctionOracle, _: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (sx, sy) = grads(f, x, y)?;
    Ok(Some(Sides::new(dot(&sub(&sy, &sx), &sub(y, x)), 0.0)))
}

fn sc_jensen(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], a: f64) -> Result<Option<Sides>> {
    let z = combine(a, x, y);
    let lhs = a * f.value(x)? + (1.0 - a) * f.value(y)?
        - 0.5 * a * (1.0 - a) * p.mu * norm_sq(&sub(x, y));
    Ok(Some(Sides::new(lhs, f.value(&z)?)))
}

fn sc_first_order(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let sx = f.grad_select(x)?;
    let d = sub(y, x);
    let rhs = f.value(x)? + dot(&sx, &d) + 0.5 * p.mu * norm_sq(&d);
    Ok(Some(Sides::new(f.value(y)?, rhs)))
}

fn sc_monotone(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (sx, sy) = grads(f, x, y)?;
    let d = sub(y, x);
    Ok(Some(Sides::new(dot(&sub(&sy, &sx), &d), p.mu * norm_sq(&d))))
}

fn sci_pl(f: &FunctionOracle, p: &Params, x: &[f64], _: &[f64], _: f64) -> Result<Option<Sides>> {
    let sx = f.grad_select(x)?;
    Ok(Some(Sides::new(0.5 * norm_sq(&sx), p.mu * (f.value(x)? - p.f_min))))
}

fn sci_gradnorm(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (sx, sy) = grads(f, x, y)?;
    Ok(Some(Sides::new(norm(&sub(&sy, &sx)), p.mu * norm(&sub(y, x)))))
}

fn sci_upper(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (sx, sy) = grads(f, x, y)?;
    let lhs = f.value(x)? + dot(&sx, &sub(y, x)) + norm_sq(&sub(&sy, &sx)) / (2.0 * p.mu);
    Ok(Some(Sides::new(lhs, f.value(y)?)))
}

fn sci_cocoercive(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (sx, sy) = grads(f, x, y)?;
    let ds = sub(&sy, &sx);
    Ok(Some(Sides::new(norm_sq(&ds) / p.mu, dot(&ds, &sub(y, x)))))
}

fn sm0(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (gx, gy) = grads(f, x, y)?;
    Ok(Some(Sides::new(p.l * norm(&sub(x, y)), norm(&sub(&gx, &gy)))))
}

fn sm2(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let gx = f.grad_select(x)?;
    let d = sub(y, x);
    let lhs = f.value(x)? + dot(&gx, &d) + 0.5 * p.l * norm_sq(&d);
    Ok(Some(Sides::new(lhs, f.value(y)?)))
}

fn sm3(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (gx, gy) = grads(f, x, y)?;
    let d = sub(x, y);
    Ok(Some(Sides::new(p.l * norm_sq(&d), dot(&sub(&gx, &gy), &d))))
}

fn sm4(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], a: f64) -> Result<Option<Sides>> {
    let z = combine(a, x, y);
    let rhs = a * f.value(x)? + (1.0 - a) * f.value(y)?
        - 0.5 * a * (1.0 - a) * p.l * norm_sq(&sub(x, y));
    Ok(Some(Sides::new(f.value(&z)?, rhs)))
}

fn sm5(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (gx, gy) = grads(f, x, y)?;
    let rhs = f.value(x)? + dot(&gx, &sub(y, x)) + norm_sq(&sub(&gy, &gx)) / (2.0 * p.l);
    Ok(Some(Sides::new(f.value(y)?, rhs)))
}

fn sm6(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (gx, gy) = grads(f, x, y)?;
    let dg = sub(&gx, &gy);
    Ok(Some(Sides::new(dot(&dg, &sub(x, y)), norm_sq(&dg) / p.l)))
}

fn sm7(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], a: f64) -> Result<Option<Sides>> {
    let (gx, gy) = grads(f, x, y)?;
    let z = combine(a, x, y);
    let lhs = a * f.value(x)? + (1.0 - a) * f.value(y)?
        - a * (1.0 - a) * norm_sq(&sub(&gx, &gy)) / (2.0 * p.l);
    Ok(Some(Sides::new(lhs, f.value(&z)?)))
}

fn entry<'a>(p: &Params<'a>) -> Result<(&'a ZooEntry, &'a FunctionOracle)> {
    let e = p
        .entry
        .ok_or_else(|| Error::contract("conjugate relations need a zoo entry"))?;
    let c = e
        .conjugate
        .as_ref()
        .ok_or_else(|| Error::contract(format!("`{}` has no stored conjugate", e.name)))?;
    Ok((e, c))
}

/// Fenchel–Young equality at a subgradient pair, as −|f*(s) − (sᵀx − f(x))| ≥ 0.
fn conj12(f: &FunctionOracle, p: &Params, x: &[f64], _: &[f64], _: f64) -> Result<Option<Sides>> {
    let (e, conj) = entry(p)?;
    let s = f.grad_select(x)?;
    if !e.conjugate_defined_at(&s) {
        return Ok(None);
    }
    let fstar = conj.value(&s)?;
    let pairing = dot(&s, x) - f.value(x)?;
    Ok(Some(Sides {
        lhs: -(fstar - pairing).abs(),
        rhs: 0.0,
        scale: fstar.abs().max(pairing.abs()),
    }))
}

/// x ∈ ∂f*(s_x), tested with the first-order inequality on f* against s_y.
fn conj23(f: &FunctionOracle, p: &Params, x: &[f64], y: &[f64], _: f64) -> Result<Option<Sides>> {
    let (e, conj) = entry(p)?;
    let (sx, sy) = grads(f, x, y)?;
    if !e.conjugate_defined_at(&sx) || !e.conjugate_defined_at(&sy) {
        return Ok(None);
    }
    let rhs = conj.value(&sx)? + dot(x, &sub(&sy, &sx));
    Ok(Some(Sides::new(conj.value(&sy)?, rhs)))
}

fn template(id: ConditionId, shape: Shape, smooth: bool, eval: SidesFn) -> Box<dyn Inequality> {
    Box::new(Template {
        id,
        shape,
        smooth,
        eval,
    })
}

/// Every condition, keyed by its tag.
pub struct ConditionRegistry {
    by_id: BTreeMap<ConditionId, Box<dyn Inequality>>,
}

impl ConditionRegistry {
    pub fn standard() -> Self {
        use ConditionId::*;
        use Shape::*;
        let all = vec![
            template(CvxJensen, Interpolation, false, jensen),
            template(CvxFirstOrder, Pair, false, first_order),
            template(CvxMonotone, Pair, false, monotone),
            Box::new(ShiftedJensen {
                id: ScDef,
                sign: 1.0,
                curvature: |p| -p.mu,
                smooth: false,
            }) as Box<dyn Inequality>,
            template(ScJensen, Interpolation, false, sc_jensen),
            template(ScFirstOrder, Pair, false, sc_first_order),
            template(ScMonotone, Pair, false, sc_monotone),
            template(SciPl, Point, false, sci_pl),
            template(SciGradnorm, Pair, false, sci_gradnorm),
            template(SciUpper, Pair, false, sci_upper),
            template(SciCocoercive, Pair, false, sci_cocoercive),
            template(Sm0, Pair, true, sm0),
            Box::new(ShiftedJensen {
                id: Sm1,
                sign: -1.0,
                curvature: |p| p.l,
                smooth: true,
            }),
            template(Sm2, Pair, true, sm2),
            template(Sm3, Pair, true, sm3),
            template(Sm4, Interpolation, true, sm4),
            template(Sm5, Pair, true, sm5),
            template(Sm6, Pair, true, sm6),
            template(Sm7, Interpolation, true, sm7),
            template(Conj12, Point, false, conj12),
            template(Conj23, Pair, false, conj23),
        ];
        let mut by_id = BTreeMap::new();
        for c in all {
            by_id.insert(c.id(), c);
        }
        ConditionRegistry { by_id }
    }

    pub fn get(&self, id: ConditionId) -> &dyn Inequality {
        self.by_id
            .get(&id)
            .map(|b| b.as_ref())
            .expect("every condition id is registered")
    }

    pub fn ids(&self) -> impl Iterator<Item = ConditionId> + '_ {
        self.by_id.keys().copied()
    }
}

impl Default for ConditionRegistry {
    fn default() -> Self {
        ConditionRegistry::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> FunctionOracle {
        FunctionOracle::from_fns(1, true, |x| x[0] * x[0], |x| vec![2.0 * x[0]])
    }

    #[test]
    fn every_id_has_one_template() {
        let reg = ConditionRegistry::standard();
        assert_eq!(reg.ids().count(), ConditionId::ALL.len());
        for id in ConditionId::ALL {
            assert_eq!(reg.get(id).id(), id);
        }
    }

    #[test]
    fn sm5_on_sine_at_zero_pi() {
        let f = FunctionOracle::from_fns(1, true, |x| x[0].sin(), |x| vec![x[0].cos()]);
        let p = Params {
            l: 1.0,
            ..Params::default()
        };
        let s = sm5(&f, &p, &[0.0], &[PI], 0.5).unwrap().unwrap();
        assert!((s.margin() + PI + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sc_monotone_is_tight_on_square() {
        let p = Params {
            mu: 2.0,
            ..Params::default()
        };
        let s = sc_monotone(&square(), &p, &[1.0], &[-2.5], 0.5).unwrap().unwrap();
        assert_eq!(s.margin(), 0.0);
    }

    #[test]
    fn shifted_jensen_subject() {
        let reg = ConditionRegistry::standard();
        let p = Params {
            mu: 2.0,
            ..Params::default()
        };
        let def = reg.get(ConditionId::ScDef);
        let g = def.subject(&square(), &p);
        assert_eq!(g.value(&[3.0]).unwrap(), 0.0);
        let s = def.sides(&g, &p, &[1.0], &[2.0], 0.5).unwrap().unwrap();
        assert_eq!(s.margin(), 0.0);
    }

    #[test]
    fn conjugate_templates_need_an_entry() {
        let err = conj12(&square(), &Params::default(), &[1.0], &[1.0], 0.5).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }
}
