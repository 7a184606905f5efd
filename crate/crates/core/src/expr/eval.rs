//! Forward-mode evaluation on dual numbers.

use std::ops::{Add, Mul, Neg, Sub};

use super::ast::{BinOp, Func, Node};
use crate::error::{Error, Result};

/// A value with one directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub fn constant(value: f64) -> Self {
        Dual { value, deriv: 0.0 }
    }

    pub fn variable(value: f64) -> Self {
        Dual { value, deriv: 1.0 }
    }

    fn chain(self, value: f64, slope: f64) -> Self {
        Dual {
            value,
            deriv: slope * self.deriv,
        }
    }

    fn recip(self) -> Self {
        self.chain(1.0 / self.value, -1.0 / (self.value * self.value))
    }

    /// Integer power by repeated squaring; the chain rule falls out of `Mul`.
    fn powi(self, mut n: u64) -> Self {
        let mut base = self;
        let mut acc = Dual::constant(1.0);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            value: self.value + o.value,
            deriv: self.deriv + o.deriv,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            value: self.value - o.value,
            deriv: self.deriv - o.deriv,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            value: self.value * o.value,
            deriv: self.deriv * o.value + self.value * o.deriv,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

const MAX_INT_EXPONENT: f64 = 2147483648.0;

fn is_integer_exponent(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() <= MAX_INT_EXPONENT
}

/// Evaluates `node` at `x`, differentiating along coordinate `seed` if given.
///
/// Selection rules at nonsmooth points: abs′(0) = 0; any derivative through
/// sqrt at 0 is an evaluation failure.
pub(crate) fn eval_dual(node: &Node, x: &[f64], seed: Option<usize>) -> Result<Dual> {
    let fail = |reason: String| Error::eval(x, format!("{reason} in `{node}`"));
    let out = match node {
        Node::Const(v) => Dual::constant(*v),
        Node::Var(i) => {
            let v = *x
                .get(*i)
                .ok_or_else(|| Error::contract(format!("point lacks coordinate x{}", i + 1)))?;
            if seed == Some(*i) {
                Dual::variable(v)
            } else {
                Dual::constant(v)
            }
        }
        Node::Neg(a) => -eval_dual(a, x, seed)?,
        Node::Binary(op, a, b) => {
            let a = eval_dual(a, x, seed)?;
            let b = eval_dual(b, x, seed)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(fail("division by zero".into()));
                    }
                    a * b.recip()
                }
            }
        }
        Node::Pow(a, p) => {
            let a = eval_dual(a, x, seed)?;
            if is_integer_exponent(*p) {
                let positive = a.powi(p.abs() as u64);
                if *p < 0.0 {
                    if positive.value == 0.0 {
                        return Err(fail("division by zero".into()));
                    }
                    positive.recip()
                } else {
                    positive
                }
            } else {
                if a.value <= 0.0 {
                    return Err(fail(format!(
                        "non-integer power of nonpositive base {}",
                        a.value
                    )));
                }
                a.chain(a.value.powf(*p), p * a.value.powf(p - 1.0))
            }
        }
        Node::Call(func, a) => {
            let a = eval_dual(a, x, seed)?;
            let v = a.value;
            match func {
                Func::Exp => {
                    let e = v.exp();
                    a.chain(e, e)
                }
                Func::Log => {
                    if v <= 0.0 {
                        return Err(fail(format!("log of nonpositive value {v}")));
                    }
                    a.chain(v.ln(), 1.0 / v)
                }
                Func::Abs => {
                    let slope = if v > 0.0 {
                        1.0
                    } else if v < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    a.chain(v.abs(), slope)
                }
                Func::Sin => a.chain(v.sin(), v.cos()),
                Func::Cos => a.chain(v.cos(), -v.sin()),
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(fail(format!("sqrt of negative value {v}")));
                    }
                    if v == 0.0 {
                        if seed.is_some() {
                            return Err(fail("unbounded derivative of sqrt at 0".into()));
                        }
                        Dual::constant(0.0)
                    } else {
                        let r = v.sqrt();
                        a.chain(r, 0.5 / r)
                    }
                }
            }
        }
        Node::Sum(terms) => {
            let mut acc = Dual::constant(0.0);
            for t in terms {
                acc = acc + eval_dual(t, x, seed)?;
            }
            acc
        }
    };
    if !out.value.is_finite() {
        return Err(fail(format!("non-finite value {}", out.value)));
    }
    if !out.deriv.is_finite() {
        return Err(fail(format!("non-finite derivative {}", out.deriv)));
    }
    Ok(out)
}

pub(crate) fn eval_const(node: &Node) -> Result<f64> {
    Ok(eval_dual(node, &[], None)?.value)
}
