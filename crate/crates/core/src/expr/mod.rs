//! Symbolic expression kernel.
//!
//! Expressions are immutable trees shared through `Arc`. Every node caches its
//! size and a structural hash, and remembers whether it is already in the
//! canonical form produced by [`simplify`], so repeated simplification of shared
//! subtrees is free.

mod diff;
mod eval;
mod parse;
mod poly;
mod print;
mod simplify;
mod zero;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use diff::differentiate;
pub use eval::{evaluate, evaluate_with_bound, Assignment, POLE_THRESHOLD};
pub use parse::parse;
pub use poly::is_rational_zero;
pub use simplify::simplify;
pub use zero::{is_zero, is_zero_with, SampleRegion, ZeroTestConfig, ZeroVerdict};

/// Exact rational number used for constants and exponents.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("malformed number `{text}` at byte {offset}")]
    MalformedNumber { text: String, offset: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid zero-test configuration: {0}")]
    InvalidConfig(String),
    #[error("every sampled point was singular ({attempted} attempts)")]
    AllSamplesSingular { attempted: usize },
}

/// Builtin elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Sec,
    Csc,
    Sinh,
    Cosh,
    Tanh,
    Coth,
    Exp,
    Ln,
}

impl Func {
    pub const ALL: [Func; 12] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Cot,
        Func::Sec,
        Func::Csc,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Coth,
        Func::Exp,
        Func::Ln,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Sec => "sec",
            Func::Csc => "csc",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Coth => "coth",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// One node of an expression tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    Pi,
    Var(Arc<str>),
    Neg(Expr),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    Power(Expr, Rational),
    Call(Func, Expr),
}

struct Inner {
    node: Node,
    size: usize,
    hash: u64,
    canonical: bool,
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn build(node: Node, canonical: bool) -> Expr {
        let size = 1 + match &node {
            Node::Const(_) | Node::Pi | Node::Var(_) => 0,
            Node::Neg(a) | Node::Power(a, _) | Node::Call(_, a) => a.size(),
            Node::Quotient(a, b) => a.size() + b.size(),
            Node::Sum(xs) | Node::Product(xs) => xs.iter().map(Expr::size).sum(),
        };
        let mut h = DefaultHasher::new();
        node.hash(&mut h);
        Expr(Arc::new(Inner {
            node,
            size,
            hash: h.finish(),
            canonical,
        }))
    }

    /// Wraps a node without marking it canonical.
    pub fn new(node: Node) -> Expr {
        let canonical = matches!(node, Node::Pi | Node::Var(_))
            || matches!(&node, Node::Const(_));
        Expr::build(node, canonical)
    }

    pub(crate) fn canonical(node: Node) -> Expr {
        Expr::build(node, true)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Number of nodes in the tree (shared subtrees counted once per use).
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_canonical(&self) -> bool {
        self.0.canonical
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::new(Node::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn pi() -> Expr {
        Expr::new(Node::Pi)
    }

    pub fn var(name: &str) -> Expr {
        Expr::new(Node::Var(Arc::from(name)))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::new(Node::Sum(terms))
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::new(Node::Product(factors))
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        Expr::new(Node::Quotient(num, den))
    }

    pub fn pow(self, exponent: Rational) -> Expr {
        Expr::new(Node::Power(self, exponent))
    }

    pub fn powi(self, exponent: i64) -> Expr {
        self.pow(Rational::from_integer(BigInt::from(exponent)))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::new(Node::Call(func, arg))
    }

    pub fn sin(self) -> Expr {
        Expr::call(Func::Sin, self)
    }
    pub fn cos(self) -> Expr {
        Expr::call(Func::Cos, self)
    }
    pub fn tan(self) -> Expr {
        Expr::call(Func::Tan, self)
    }
    pub fn cot(self) -> Expr {
        Expr::call(Func::Cot, self)
    }
    pub fn csc(self) -> Expr {
        Expr::call(Func::Csc, self)
    }
    pub fn sec(self) -> Expr {
        Expr::call(Func::Sec, self)
    }
    pub fn sinh(self) -> Expr {
        Expr::call(Func::Sinh, self)
    }
    pub fn cosh(self) -> Expr {
        Expr::call(Func::Cosh, self)
    }
    pub fn tanh(self) -> Expr {
        Expr::call(Func::Tanh, self)
    }
    pub fn coth(self) -> Expr {
        Expr::call(Func::Coth, self)
    }
    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }
    pub fn ln(self) -> Expr {
        Expr::call(Func::Ln, self)
    }

    /// The rational value of a constant node.
    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True only for a literal zero constant.
    pub fn is_literal_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) | Node::Pi => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Neg(a) | Node::Power(a, _) | Node::Call(_, a) => a.collect_vars(out),
            Node::Quotient(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Sum(xs) | Node::Product(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self.node() {
            Node::Const(_) | Node::Pi => false,
            Node::Var(v) => &**v == name,
            Node::Neg(a) | Node::Power(a, _) | Node::Call(_, a) => a.contains_var(name),
            Node::Quotient(a, b) => a.contains_var(name) || b.contains_var(name),
            Node::Sum(xs) | Node::Product(xs) => xs.iter().any(|x| x.contains_var(name)),
        }
    }

    /// Capture-free substitution of `replacement` for every occurrence of `var`.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        if !self.contains_var(var) {
            return self.clone();
        }
        let sub = |e: &Expr| e.substitute(var, replacement);
        match self.node() {
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Var(_) => replacement.clone(),
            Node::Neg(a) => Expr::new(Node::Neg(sub(a))),
            Node::Sum(xs) => Expr::sum(xs.iter().map(sub).collect()),
            Node::Product(xs) => Expr::product(xs.iter().map(sub).collect()),
            Node::Quotient(a, b) => Expr::quotient(sub(a), sub(b)),
            Node::Power(b, k) => Expr::new(Node::Power(sub(b), k.clone())),
            Node::Call(f, a) => Expr::call(*f, sub(a)),
        }
    }

    /// Renames variables according to `map`; names not in the map are kept.
    pub fn rename_vars(&self, map: &dyn Fn(&str) -> Option<String>) -> Expr {
        let go = |e: &Expr| e.rename_vars(map);
        match self.node() {
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Var(v) => match map(v) {
                Some(n) => Expr::var(&n),
                None => self.clone(),
            },
            Node::Neg(a) => Expr::new(Node::Neg(go(a))),
            Node::Sum(xs) => Expr::sum(xs.iter().map(go).collect()),
            Node::Product(xs) => Expr::product(xs.iter().map(go).collect()),
            Node::Quotient(a, b) => Expr::quotient(go(a), go(b)),
            Node::Power(b, k) => Expr::new(Node::Power(go(b), k.clone())),
            Node::Call(f, a) => Expr::call(*f, go(a)),
        }
    }
}

/// Free-function form of [`Expr::substitute`].
pub fn substitute(e: &Expr, var: &str, replacement: &Expr) -> Expr {
    e.substitute(var, replacement)
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.node == other.0.node)
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::new(Node::Neg(self))
    }
}

/// Exact rational conversion of a finite `f64` through its shortest decimal
/// representation, so `0.1` becomes `1/10`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse::parse_decimal(&format!("{x:e}"))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub(crate) fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}
