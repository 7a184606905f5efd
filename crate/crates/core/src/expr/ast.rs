use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree. Variables are stored 0-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
    Sum(Vec<Node>),
}

impl Node {
    pub fn binary(op: BinOp, a: Node, b: Node) -> Node {
        Node::Binary(op, Box::new(a), Box::new(b))
    }

    /// Highest variable index + 1, or 0 for a constant expression.
    pub fn arity(&self) -> usize {
        self.variables().iter().next_back().map_or(0, |i| i + 1)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Node::Const(_) => {}
            Node::Var(i) => {
                out.insert(*i);
            }
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Sum(terms) => terms.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn contains_func(&self, f: Func) -> bool {
        match self {
            Node::Const(_) | Node::Var(_) => false,
            Node::Call(g, a) => *g == f || a.contains_func(f),
            Node::Neg(a) | Node::Pow(a, _) => a.contains_func(f),
            Node::Binary(_, a, b) => a.contains_func(f) || b.contains_func(f),
            Node::Sum(terms) => terms.iter().any(|t| t.contains_func(f)),
        }
    }

    /// True when the expression is a sum of terms each touching at most one variable.
    pub fn is_separable(&self) -> bool {
        match self {
            Node::Binary(BinOp::Add | BinOp::Sub, a, b) => a.is_separable() && b.is_separable(),
            Node::Sum(terms) => terms.iter().all(Node::is_separable),
            Node::Neg(a) => a.is_separable(),
            other => other.variables().len() <= 1,
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

/// Canonical serialization: fully parenthesized, re-parseable.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(v) => write_number(f, *v),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Node::Pow(a, p) => {
                write!(f, "({a}^")?;
                write_number(f, *p)?;
                write!(f, ")")
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
            Node::Sum(terms) => {
                write!(f, "sum(")?;
                for (k, t) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}
