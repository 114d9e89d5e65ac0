//! Closed-form real expressions in one integration variable and any number
//! of named parameters.
//!
//! Expressions are parsed from text, evaluated against [`Bindings`],
//! differentiated symbolically with [`Expr::diff`] and lightly cleaned up
//! with [`Expr::simplify`]. For hot loops (quadrature) an expression is
//! lowered to a [`Compiled`] form whose symbols are resolved to slots.

mod deriv;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

pub use parser::{parse, ParseError};

/// Elementary functions that may appear in `Apply` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Asin,
    Ln,
    Exp,
    Sqrt,
    Sinh,
    Cosh,
    Abs,
    /// Sign function with `sign(0) = 0`. Produced by differentiating `abs`.
    Sign,
}

impl Func {
    pub const ALL: [Func; 12] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Asin,
        Func::Ln,
        Func::Exp,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Abs,
        Func::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Asin => "asin",
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Applies the function, reporting arguments outside its real domain.
    pub fn apply(self, x: f64) -> Result<f64, EvalError> {
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Atan => x.atan(),
            Func::Asin => {
                if !(-1.0..=1.0).contains(&x) {
                    return Err(EvalError::domain("asin", x));
                }
                x.asin()
            }
            Func::Ln => {
                if x <= 0.0 {
                    return Err(EvalError::domain("ln", x));
                }
                x.ln()
            }
            Func::Exp => x.exp(),
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(EvalError::domain("sqrt", x));
                }
                x.sqrt()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Abs => x.abs(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        };
        checked(self.name(), x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn apply(self, a: f64, b: f64) -> Result<f64, EvalError> {
        match self {
            BinOp::Add => checked("+", a, a + b),
            BinOp::Sub => checked("-", a, a - b),
            BinOp::Mul => checked("*", a, a * b),
            BinOp::Div => {
                if b == 0.0 {
                    return Err(EvalError::domain("division", a));
                }
                checked("/", a, a / b)
            }
            BinOp::Pow => {
                if a < 0.0 && b.fract() != 0.0 {
                    return Err(EvalError::domain("pow", a));
                }
                if a == 0.0 && b < 0.0 {
                    return Err(EvalError::domain("pow", a));
                }
                checked("pow", a, a.powf(b))
            }
        }
    }
}

fn checked(op: &'static str, arg: f64, y: f64) -> Result<f64, EvalError> {
    if y.is_nan() {
        Err(EvalError::domain(op, arg))
    } else {
        Ok(y)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain fault in {op} at argument {arg}")]
    Domain { op: &'static str, arg: f64 },
}

impl EvalError {
    fn domain(op: &'static str, arg: f64) -> Self {
        EvalError::Domain { op, arg }
    }
}

/// Expression tree. Immutable once built; `Send + Sync`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Sym(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Apply(Func, Box<Expr>),
}

/// Symbol name to value map used at evaluation time.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct Bindings(BTreeMap<String, f64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn remove(&mut self, name: &str) -> Option<f64> {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (&'a str, f64)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (k, v) in iter {
            b.set(k, v);
        }
        b
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, "}}")
    }
}

// Convenience constructors used heavily by the differentiator and tests.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Pow, a, b)
    }

    pub fn apply(f: Func, e: Expr) -> Expr {
        Expr::Apply(f, Box::new(e))
    }
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        match self {
            Expr::Const(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Sym(s) => b.get(s).ok_or_else(|| EvalError::Unbound(s.clone())),
            Expr::Neg(e) => Ok(-e.eval(b)?),
            Expr::Bin(op, l, r) => op.apply(l.eval(b)?, r.eval(b)?),
            Expr::Apply(f, e) => f.apply(e.eval(b)?),
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) | Expr::Pi => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Neg(e) | Expr::Apply(_, e) => e.collect_symbols(out),
            Expr::Bin(_, l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => false,
            Expr::Sym(s) => s == name,
            Expr::Neg(e) | Expr::Apply(_, e) => e.contains_symbol(name),
            Expr::Bin(_, l, r) => l.contains_symbol(name) || r.contains_symbol(name),
        }
    }

    /// Replaces every bound symbol by its value. Unbound symbols stay symbolic.
    pub fn substitute(&self, b: &Bindings) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi => self.clone(),
            Expr::Sym(s) => match b.get(s) {
                Some(v) => Expr::Const(v),
                None => self.clone(),
            },
            Expr::Neg(e) => Expr::neg(e.substitute(b)),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.substitute(b), r.substitute(b)),
            Expr::Apply(f, e) => Expr::apply(*f, e.substitute(b)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Sym(_) => 1,
            Expr::Neg(e) | Expr::Apply(_, e) => 1 + e.size(),
            Expr::Bin(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Lowers the expression so that each symbol in `slots` is read from the
    /// same position of the value slice passed to [`Compiled::eval`].
    pub fn compile(&self, slots: &[&str]) -> Result<Compiled, EvalError> {
        Ok(Compiled { root: Node::lower(self, slots)?, arity: slots.len() })
    }
}

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Apply(Func, Box<Node>),
}

impl Node {
    fn lower(e: &Expr, slots: &[&str]) -> Result<Node, EvalError> {
        Ok(match e {
            Expr::Const(v) => Node::Const(*v),
            Expr::Pi => Node::Const(std::f64::consts::PI),
            Expr::Sym(s) => Node::Slot(slots.iter().position(|n| n == s).ok_or_else(|| EvalError::Unbound(s.clone()))?),
            Expr::Neg(e) => Node::Neg(Box::new(Node::lower(e, slots)?)),
            Expr::Bin(op, l, r) => Node::Bin(*op, Box::new(Node::lower(l, slots)?), Box::new(Node::lower(r, slots)?)),
            Expr::Apply(f, e) => Node::Apply(*f, Box::new(Node::lower(e, slots)?)),
        })
    }

    fn eval(&self, vals: &[f64]) -> Result<f64, EvalError> {
        match self {
            Node::Const(v) => Ok(*v),
            Node::Slot(i) => Ok(vals[*i]),
            Node::Neg(e) => Ok(-e.eval(vals)?),
            Node::Bin(op, l, r) => op.apply(l.eval(vals)?, r.eval(vals)?),
            Node::Apply(f, e) => f.apply(e.eval(vals)?),
        }
    }
}

/// An expression with symbols resolved to positional slots.
#[derive(Clone, Debug)]
pub struct Compiled {
    root: Node,
    arity: usize,
}

impl Compiled {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// # Panics
    /// If `vals` is shorter than the slot list the expression was compiled with.
    pub fn eval(&self, vals: &[f64]) -> Result<f64, EvalError> {
        assert!(vals.len() >= self.arity, "missing slot values");
        self.root.eval(vals)
    }
}

/// Fully parenthesized printing; `parse(e.to_string())` evaluates identically.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::Pi => write!(f, "pi"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l}{}{r})", op.symbol()),
            Expr::Apply(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
