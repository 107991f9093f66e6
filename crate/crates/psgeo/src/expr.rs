//! Analytic expression trees: parsing, symbolic differentiation, evaluation.
//!
//! Parse errors carry 1-based byte offsets.
//!
//! The grammar is small and fixed: constants, variables, the unary functions
//! sin cos tan sinh cosh tanh exp log sqrt and negation, the binary operators
//! `+ - * /`, and `^` whose exponent must be a numeric literal. Precedence is
//! `^` > unary minus > `* /` > `+ -`, binary operators associate to the left,
//! and function application requires parentheses.
//!
//! Evaluation is generic over the [`Scalar`] trait so the same tree can be
//! evaluated over plain reals or over jets.

use std::collections::HashMap;
use std::fmt;

use crate::jet::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Neg,
}

impl UnaryFn {
    fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
            UnaryFn::Tanh => "tanh",
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Neg => "neg",
        }
    }

    fn from_name(s: &str) -> Option<UnaryFn> {
        Some(match s {
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "tan" => UnaryFn::Tan,
            "sinh" => UnaryFn::Sinh,
            "cosh" => UnaryFn::Cosh,
            "tanh" => UnaryFn::Tanh,
            "exp" => UnaryFn::Exp,
            "log" => UnaryFn::Log,
            "sqrt" => UnaryFn::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Unary(UnaryFn, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Power with a literal exponent; non-integer exponents are defined as
    /// exp(c*log(base)) and inherit its domain.
    Pow(Box<Expr>, f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("exponent must be a numeric literal at offset {offset}")]
    NonConstantExponent { offset: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("domain error: {reason} in `{subtree}`")]
    Domain { reason: String, subtree: String },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.pos + 1,
                expected: format!("\"{}\"", c as char),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.parse_unary()?;
            return Ok(Expr::Unary(UnaryFn::Neg, Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.parse_literal_exponent()?;
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn parse_literal_exponent(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut neg = false;
        if self.src.get(self.pos) == Some(&b'(') {
            // allow ^(-2) style
            self.pos += 1;
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'-') {
                neg = true;
                self.pos += 1;
            }
            let v = self
                .parse_number()
                .map_err(|_| ParseError::NonConstantExponent { offset: start + 1 })?;
            self.expect(b')')?;
            return Ok(if neg { -v } else { v });
        }
        if self.src.get(self.pos) == Some(&b'-') {
            neg = true;
            self.pos += 1;
        }
        let v = self
            .parse_number()
            .map_err(|_| ParseError::NonConstantExponent { offset: start + 1 })?;
        Ok(if neg { -v } else { v })
    }

    fn parse_number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // exponent part: 1e-3
        if self.pos > start
            && self.pos < self.src.len()
            && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
        {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        if self.pos == start {
            return Err(ParseError::Syntax {
                offset: start + 1,
                expected: "number".into(),
            });
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| ParseError::Syntax {
            offset: start + 1,
            expected: "number".into(),
        })
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.parse_number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if self.peek() == Some(b'(') {
                    let f = UnaryFn::from_name(&name).ok_or(ParseError::UnknownFunction {
                        offset: start + 1,
                        name: name.clone(),
                    })?;
                    self.pos += 1;
                    let arg = self.parse_expr()?;
                    self.expect(b')')?;
                    Ok(Expr::Unary(f, Box::new(arg)))
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(ParseError::Syntax {
                offset: self.pos + 1,
                expected: "number, variable, function call or \"(\"".into(),
            }),
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut p = Parser::new(text);
        let e = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::Syntax {
                offset: p.pos + 1,
                expected: "end of input or operator".into(),
            });
        }
        Ok(e.fold())
    }

    /// Exact partial derivative with respect to `v`, constant-folded.
    pub fn differentiate(&self, v: &str) -> Expr {
        self.diff(v).fold()
    }

    fn diff(&self, v: &str) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var(name) => Const(if name == v { 1.0 } else { 0.0 }),
            Unary(f, a) => {
                let da = a.diff(v);
                let outer = match f {
                    UnaryFn::Neg => return Unary(UnaryFn::Neg, Box::new(da)),
                    UnaryFn::Sin => Unary(UnaryFn::Cos, a.clone()),
                    UnaryFn::Cos => Unary(
                        UnaryFn::Neg,
                        Box::new(Unary(UnaryFn::Sin, a.clone())),
                    ),
                    UnaryFn::Tan => Bin(
                        BinOp::Add,
                        Box::new(Const(1.0)),
                        Box::new(Pow(Box::new(Unary(UnaryFn::Tan, a.clone())), 2.0)),
                    ),
                    UnaryFn::Sinh => Unary(UnaryFn::Cosh, a.clone()),
                    UnaryFn::Cosh => Unary(UnaryFn::Sinh, a.clone()),
                    UnaryFn::Tanh => Bin(
                        BinOp::Sub,
                        Box::new(Const(1.0)),
                        Box::new(Pow(Box::new(Unary(UnaryFn::Tanh, a.clone())), 2.0)),
                    ),
                    UnaryFn::Exp => Unary(UnaryFn::Exp, a.clone()),
                    UnaryFn::Log => Bin(BinOp::Div, Box::new(Const(1.0)), a.clone()),
                    UnaryFn::Sqrt => Bin(
                        BinOp::Div,
                        Box::new(Const(0.5)),
                        Box::new(Unary(UnaryFn::Sqrt, a.clone())),
                    ),
                };
                Bin(BinOp::Mul, Box::new(outer), Box::new(da))
            }
            Bin(op, a, b) => {
                let (da, db) = (a.diff(v), b.diff(v));
                match op {
                    BinOp::Add => Bin(BinOp::Add, Box::new(da), Box::new(db)),
                    BinOp::Sub => Bin(BinOp::Sub, Box::new(da), Box::new(db)),
                    BinOp::Mul => Bin(
                        BinOp::Add,
                        Box::new(Bin(BinOp::Mul, Box::new(da), b.clone())),
                        Box::new(Bin(BinOp::Mul, a.clone(), Box::new(db))),
                    ),
                    BinOp::Div => {
                        // (da*b - a*db) / b^2
                        let num = Bin(
                            BinOp::Sub,
                            Box::new(Bin(BinOp::Mul, Box::new(da), b.clone())),
                            Box::new(Bin(BinOp::Mul, a.clone(), Box::new(db))),
                        );
                        Bin(
                            BinOp::Div,
                            Box::new(num),
                            Box::new(Pow(b.clone(), 2.0)),
                        )
                    }
                }
            }
            Pow(a, c) => {
                // c * a^(c-1) * da
                let da = a.diff(v);
                Bin(
                    BinOp::Mul,
                    Box::new(Bin(
                        BinOp::Mul,
                        Box::new(Const(*c)),
                        Box::new(Pow(a.clone(), c - 1.0)),
                    )),
                    Box::new(da),
                )
            }
        }
    }

    /// Constant folding plus 0/1 identities. No value-changing rewrites.
    pub fn fold(&self) -> Expr {
        use Expr::*;
        match self {
            Const(_) | Var(_) => self.clone(),
            Unary(UnaryFn::Neg, a) => match a.fold() {
                Const(c) => Const(-c),
                fa => Unary(UnaryFn::Neg, Box::new(fa)),
            },
            Unary(f, a) => {
                let fa = a.fold();
                // do not fold through functions with domain restrictions
                Unary(*f, Box::new(fa))
            }
            Bin(op, a, b) => {
                let (fa, fb) = (a.fold(), b.fold());
                match (op, &fa, &fb) {
                    (BinOp::Add, Const(x), Const(y)) => Const(x + y),
                    (BinOp::Sub, Const(x), Const(y)) => Const(x - y),
                    (BinOp::Mul, Const(x), Const(y)) => Const(x * y),
                    (BinOp::Add, Const(z), _) if *z == 0.0 => fb,
                    (BinOp::Add, _, Const(z)) if *z == 0.0 => fa,
                    (BinOp::Sub, _, Const(z)) if *z == 0.0 => fa,
                    (BinOp::Mul, Const(z), _) | (BinOp::Mul, _, Const(z)) if *z == 0.0 => {
                        Const(0.0)
                    }
                    (BinOp::Mul, Const(o), _) if *o == 1.0 => fb,
                    (BinOp::Mul, _, Const(o)) if *o == 1.0 => fa,
                    (BinOp::Div, Const(z), _) if *z == 0.0 => Const(0.0),
                    (BinOp::Div, _, Const(o)) if *o == 1.0 => fa,
                    _ => Bin(*op, Box::new(fa), Box::new(fb)),
                }
            }
            Pow(a, c) => {
                let fa = a.fold();
                if *c == 0.0 {
                    Const(1.0)
                } else if *c == 1.0 {
                    fa
                } else if let Const(x) = fa {
                    if *c == c.round() {
                        Const(x.powi(*c as i32))
                    } else {
                        Pow(Box::new(Const(x)), *c)
                    }
                } else {
                    Pow(Box::new(fa), *c)
                }
            }
        }
    }

    /// All variable names appearing in the tree.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => out.push(n.clone()),
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Evaluate over any scalar; `lookup` resolves variable names.
    pub fn eval<T: Scalar>(&self, lookup: &impl Fn(&str) -> Option<T>) -> Result<T, EvalError> {
        match self {
            Expr::Const(c) => Ok(T::from_f64(*c)),
            Expr::Var(n) => lookup(n).ok_or_else(|| EvalError::UnboundVariable(n.clone())),
            Expr::Unary(f, a) => {
                let v = a.eval(lookup)?;
                let x = v.value();
                match f {
                    UnaryFn::Neg => Ok(-v),
                    UnaryFn::Sin => Ok(v.sin()),
                    UnaryFn::Cos => Ok(v.cos()),
                    UnaryFn::Tan => Ok(v.tan()),
                    UnaryFn::Sinh => Ok(v.sinh()),
                    UnaryFn::Cosh => Ok(v.cosh()),
                    UnaryFn::Tanh => Ok(v.tanh()),
                    UnaryFn::Exp => Ok(v.exp()),
                    UnaryFn::Log => {
                        if x <= 0.0 {
                            Err(EvalError::Domain {
                                reason: format!("log of non-positive value {x}"),
                                subtree: self.to_string(),
                            })
                        } else {
                            Ok(v.ln())
                        }
                    }
                    UnaryFn::Sqrt => {
                        if x < 0.0 {
                            Err(EvalError::Domain {
                                reason: format!("sqrt of negative value {x}"),
                                subtree: self.to_string(),
                            })
                        } else {
                            Ok(v.sqrt())
                        }
                    }
                }
            }
            Expr::Bin(op, a, b) => {
                let va = a.eval(lookup)?;
                let vb = b.eval(lookup)?;
                match op {
                    BinOp::Add => Ok(va + vb),
                    BinOp::Sub => Ok(va - vb),
                    BinOp::Mul => Ok(va * vb),
                    BinOp::Div => {
                        if vb.value() == 0.0 {
                            Err(EvalError::Domain {
                                reason: "division by zero".into(),
                                subtree: self.to_string(),
                            })
                        } else {
                            Ok(va / vb)
                        }
                    }
                }
            }
            Expr::Pow(a, c) => {
                let va = a.eval(lookup)?;
                if *c == c.round() && c.abs() < 1e9 {
                    let n = *c as i32;
                    if n < 0 && va.value() == 0.0 {
                        return Err(EvalError::Domain {
                            reason: "zero raised to negative power".into(),
                            subtree: self.to_string(),
                        });
                    }
                    Ok(va.powi(n))
                } else {
                    // b^c := exp(c*log(b))
                    if va.value() <= 0.0 {
                        return Err(EvalError::Domain {
                            reason: format!(
                                "non-integer power of non-positive base {}",
                                va.value()
                            ),
                            subtree: self.to_string(),
                        });
                    }
                    Ok((T::from_f64(*c) * va.ln()).exp())
                }
            }
        }
    }

    /// Evaluate at a plain real point given as (name, value) pairs.
    pub fn eval_f64(&self, bindings: &HashMap<String, f64>) -> Result<f64, EvalError> {
        self.eval(&|n: &str| bindings.get(n).copied())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Unary(UnaryFn::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(u, a) => write!(f, "{}({a})", u.name()),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a}{s}{b})")
            }
            Expr::Pow(a, c) => {
                if *c < 0.0 {
                    write!(f, "({a}^({c}))")
                } else {
                    write!(f, "({a}^{c})")
                }
            }
        }
    }
}
