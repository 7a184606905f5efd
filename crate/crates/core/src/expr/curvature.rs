//! Recognition of convex compositions, used to decide whether the
//! subgradient selection at kinks is known to lie in ∂f.

use super::ast::{BinOp, Func, Node};
use super::eval::eval_const;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    Constant,
    Affine,
    Convex,
    Concave,
    Unknown,
}

use Curvature::*;

impl Curvature {
    fn flip(self) -> Self {
        match self {
            Convex => Concave,
            Concave => Convex,
            other => other,
        }
    }

    fn plus(self, other: Self) -> Self {
        match (self, other) {
            (Constant, c) | (c, Constant) => c,
            (Affine, c) | (c, Affine) => c,
            (Convex, Convex) => Convex,
            (Concave, Concave) => Concave,
            _ => Unknown,
        }
    }

    fn scale(self, c: f64) -> Self {
        if c == 0.0 {
            Constant
        } else if c > 0.0 {
            self
        } else {
            self.flip()
        }
    }

    pub fn is_convex(self) -> bool {
        matches!(self, Constant | Affine | Convex)
    }
}

fn constant_value(node: &Node) -> Option<f64> {
    if node.variables().is_empty() {
        eval_const(node).ok()
    } else {
        None
    }
}

pub fn curvature(node: &Node) -> Curvature {
    match node {
        Node::Const(_) => Constant,
        Node::Var(_) => Affine,
        Node::Neg(a) => curvature(a).flip(),
        Node::Binary(BinOp::Add, a, b) => curvature(a).plus(curvature(b)),
        Node::Binary(BinOp::Sub, a, b) => curvature(a).plus(curvature(b).flip()),
        Node::Binary(BinOp::Mul, a, b) => match (constant_value(a), constant_value(b)) {
            (Some(_), Some(_)) => Constant,
            (Some(c), None) => curvature(b).scale(c),
            (None, Some(c)) => curvature(a).scale(c),
            (None, None) => Unknown,
        },
        Node::Binary(BinOp::Div, a, b) => match constant_value(b) {
            Some(c) if c != 0.0 => curvature(a).scale(1.0 / c),
            _ if constant_value(a).is_some() && constant_value(b).is_some() => Constant,
            _ => Unknown,
        },
        Node::Pow(a, p) => {
            let inner = curvature(a);
            match inner {
                Constant => Constant,
                _ if *p == 0.0 => Constant,
                _ if *p == 1.0 => inner,
                Affine if p.fract() == 0.0 && *p as i64 % 2 == 0 && *p > 0.0 => Convex,
                _ => Unknown,
            }
        }
        Node::Call(func, a) => {
            let inner = curvature(a);
            if inner == Constant {
                return Constant;
            }
            match func {
                Func::Exp if matches!(inner, Affine | Convex) => Convex,
                Func::Log | Func::Sqrt if matches!(inner, Affine | Concave) => Concave,
                Func::Abs if inner == Affine => Convex,
                _ => Unknown,
            }
        }
        Node::Sum(terms) => terms
            .iter()
            .map(curvature)
            .fold(Constant, Curvature::plus),
    }
}
