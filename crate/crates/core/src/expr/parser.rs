//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?          exponent must be constant
//! atom   := number | 'pi' | 'e' | xN | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```

use super::ast::{BinOp, Func, Node};
use super::eval::eval_const;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v = lit.parse::<f64>().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(v),
                offset: start,
            });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
        } else if b"+-*/^(),".contains(&c) {
            out.push(Token {
                tok: Tok::Sym(c as char),
                offset: i,
            });
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                offset: i,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dimension: usize,
    text_len: usize,
    open_parens: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.text_len, |t| t.offset)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Error at the current token. Running out of input inside parentheses
    /// is reported at the innermost unclosed `(`.
    fn unexpected(&self, expected: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some(t) => Error::Syntax {
                offset: t.offset,
                message: format!("expected {expected}, found {}", describe(&t.tok)),
            },
            None => match self.open_parens.last() {
                Some(&open) => Error::Syntax {
                    offset: open,
                    message: "unclosed parenthesis".to_string(),
                },
                None => Error::Syntax {
                    offset: self.text_len,
                    message: format!("expected {expected}, found end of input"),
                },
            },
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let exponent = self.unary()?;
        if !exponent.variables().is_empty() {
            return Err(Error::Syntax {
                offset: at,
                message: "exponent must be a constant".to_string(),
            });
        }
        let p = eval_const(&exponent).map_err(|e| Error::Syntax {
            offset: at,
            message: format!("exponent does not evaluate: {e}"),
        })?;
        Ok(Node::Pow(Box::new(base), p))
    }

    fn atom(&mut self) -> Result<Node> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                self.open_parens.push(offset);
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected("`)`"));
                }
                self.open_parens.pop();
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.identifier(&name, offset)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn identifier(&mut self, name: &str, offset: usize) -> Result<Node> {
        if let Some(index) = variable_index(name) {
            if index == 0 || index > self.dimension {
                return Err(Error::VariableOutOfRange {
                    index,
                    dimension: self.dimension,
                    offset,
                });
            }
            return Ok(Node::Var(index - 1));
        }
        match name {
            "pi" => return Ok(Node::Const(std::f64::consts::PI)),
            "e" => return Ok(Node::Const(std::f64::consts::E)),
            _ => {}
        }
        let func = Func::from_name(name);
        if func.is_none() && name != "sum" {
            return Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset,
            });
        }
        let open = self.offset();
        if !self.eat('(') {
            return Err(self.unexpected(&format!("`(` after `{name}`")));
        }
        self.open_parens.push(open);
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(')') {
            return Err(self.unexpected("`)` or `,`"));
        }
        self.open_parens.pop();
        match func {
            Some(f) => {
                if args.len() != 1 {
                    return Err(Error::Syntax {
                        offset,
                        message: format!("`{name}` takes one argument, got {}", args.len()),
                    });
                }
                Ok(Node::Call(f, Box::new(args.pop().expect("one argument"))))
            }
            None => Ok(Node::Sum(args)),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().or(Some(usize::MAX))
}

pub(super) fn parse(text: &str, dimension: usize) -> Result<Node> {
    if dimension == 0 {
        return Err(Error::Contract("expression dimension must be >= 1".into()));
    }
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        dimension,
        text_len: text.len(),
        open_parens: Vec::new(),
    };
    let node = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(node)
}
