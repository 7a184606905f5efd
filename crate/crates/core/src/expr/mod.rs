//! A small arithmetic language for defining functions from text.
//!
//! Supports `+ - * / ^`, unary minus, parentheses, the functions
//! `exp log abs sin cos sqrt`, the n-ary `sum(a, b, ...)`, variables
//! `x1..xn` and the constants `pi` and `e`. Gradients are computed by
//! forward-mode differentiation, one pass per coordinate.

mod ast;
mod curvature;
mod eval;
mod parser;

pub use ast::{BinOp, Func, Node};
pub use curvature::{curvature, Curvature};
pub use eval::Dual;

use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, Objective, SelectionRule};
use crate::point::Point;

/// A parsed expression together with its declared dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    dimension: usize,
}

impl Expression {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Wraps an existing tree; fails if it references a variable beyond `dimension`.
    pub fn from_node(root: Node, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::contract("expression dimension must be >= 1"));
        }
        if let Some(&i) = root.variables().iter().find(|&&i| i >= dimension) {
            return Err(Error::VariableOutOfRange {
                index: i + 1,
                dimension,
                offset: 0,
            });
        }
        Ok(Expression { root, dimension })
    }

    pub fn curvature(&self) -> Curvature {
        curvature(&self.root)
    }

    pub fn is_smooth(&self) -> bool {
        !self.root.contains_func(Func::Abs)
    }

    pub fn selection_rule(&self) -> SelectionRule {
        if self.is_smooth() {
            SelectionRule::Gradient
        } else if self.curvature().is_convex() {
            SelectionRule::ConvexSubgradient
        } else {
            SelectionRule::Heuristic
        }
    }

    pub fn oracle(&self) -> FunctionOracle {
        FunctionOracle::new(self.clone())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::contract(format!(
                "point has dimension {}, expression declares {}",
                x.len(),
                self.dimension
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Expression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.root.fmt(f)
    }
}

pub fn parse_expression(text: &str, dimension: usize) -> Result<Expression> {
    let root = parser::parse(text, dimension)?;
    Ok(Expression { root, dimension })
}

pub fn evaluate(expr: &Expression, x: &[f64]) -> Result<f64> {
    expr.check_point(x)?;
    Ok(eval::eval_dual(&expr.root, x, None)?.value)
}

pub fn ad_gradient(expr: &Expression, x: &[f64]) -> Result<Point> {
    expr.check_point(x)?;
    let grad = (0..expr.dimension)
        .map(|i| eval::eval_dual(&expr.root, x, Some(i)).map(|d| d.deriv))
        .collect::<Result<Vec<_>>>()?;
    Point::new(grad).map_err(|_| Error::eval(x, "non-finite gradient"))
}

impl Objective for Expression {
    fn dim(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        evaluate(self, x)
    }

    fn grad_select(&self, x: &[f64]) -> Result<Vec<f64>> {
        ad_gradient(self, x).map(Point::into_vec)
    }

    fn is_smooth(&self) -> bool {
        Expression::is_smooth(self)
    }

    fn selection_rule(&self) -> SelectionRule {
        Expression::selection_rule(self)
    }

    fn is_separable(&self) -> bool {
        self.root.is_separable()
    }

    fn label(&self) -> String {
        self.root.to_string()
    }
}
