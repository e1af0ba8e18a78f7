//! Bottom-up canonicalisation.
//!
//! Canonical trees use only `Const`, `Pi`, `Var`, `Sum`, `Product`, `Power`
//! and `Call` nodes: negation becomes a `-1` coefficient and `a/b` becomes
//! `a*b^-1`. Sums are flat with like terms collected and at most one constant;
//! products are flat with a single leading coefficient, factors with equal
//! bases merged and sums raised to positive integer powers distributed out.
//! No trigonometric identities are applied.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{is_integer, Expr, Func, Node, Rational};

pub fn simplify(e: &Expr) -> Expr {
    if e.is_canonical() {
        return e.clone();
    }
    match e.node() {
        Node::Const(_) | Node::Pi | Node::Var(_) => Expr::canonical(e.node().clone()),
        Node::Neg(a) => mul_all(vec![Expr::int(-1), simplify(a)]),
        Node::Sum(ts) => add_all(ts.iter().map(simplify).collect()),
        Node::Product(fs) => mul_all(fs.iter().map(simplify).collect()),
        Node::Quotient(a, b) => {
            let den = pow_canon(simplify(b), &-Rational::one());
            mul_all(vec![simplify(a), den])
        }
        Node::Power(b, k) => pow_canon(simplify(b), k),
        Node::Call(f, a) => call_canon(*f, simplify(a)),
    }
}

fn constant(c: Rational) -> Expr {
    Expr::canonical(Node::Const(c))
}

/// Splits a canonical term into its rational coefficient and the remaining
/// monomial (`None` for a pure constant).
fn split_coeff(t: &Expr) -> (Rational, Option<Expr>) {
    match t.node() {
        Node::Const(c) => (c.clone(), None),
        Node::Product(fs) => match fs[0].as_const() {
            Some(c) => {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::canonical(Node::Product(fs[1..].to_vec()))
                };
                (c.clone(), Some(rest))
            }
            None => (Rational::one(), Some(t.clone())),
        },
        _ => (Rational::one(), Some(t.clone())),
    }
}

fn scale(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    let mut fs = vec![constant(c)];
    match rest.node() {
        Node::Product(xs) => fs.extend(xs.iter().cloned()),
        _ => fs.push(rest),
    }
    Expr::canonical(Node::Product(fs))
}

/// Sum of canonical terms.
pub(crate) fn add_all(terms: Vec<Expr>) -> Expr {
    let mut constant_part = Rational::zero();
    let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = terms;
    while let Some(t) = stack.pop() {
        if let Node::Sum(xs) = t.node() {
            stack.extend(xs.iter().cloned());
            continue;
        }
        let (c, rest) = split_coeff(&t);
        match rest {
            None => constant_part += c,
            Some(r) => {
                let slot = collected.entry(r).or_insert_with(Rational::zero);
                *slot += c;
            }
        }
    }
    let mut out = Vec::with_capacity(collected.len() + 1);
    if !constant_part.is_zero() {
        out.push(constant(constant_part));
    }
    for (rest, c) in collected {
        if !c.is_zero() {
            out.push(scale(c, rest));
        }
    }
    match out.len() {
        0 => constant(Rational::zero()),
        1 => out.pop().unwrap(),
        _ => Expr::canonical(Node::Sum(out)),
    }
}

/// Product of canonical factors.
pub(crate) fn mul_all(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut bases: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f.node() {
            Node::Const(c) => coeff *= c,
            Node::Product(xs) => stack.extend(xs.iter().cloned()),
            Node::Power(b, k) => *bases.entry(b.clone()).or_insert_with(Rational::zero) += k,
            _ => *bases.entry(f.clone()).or_insert_with(Rational::zero) += Rational::one(),
        }
    }
    if coeff.is_zero() {
        return constant(Rational::zero());
    }

    let mut plain: Vec<Expr> = Vec::new();
    let mut sums: Vec<(Expr, usize)> = Vec::new();
    let mut again = false;
    for (base, k) in bases {
        if k.is_zero() {
            continue;
        }
        if matches!(base.node(), Node::Sum(_)) && is_integer(&k) && k.is_positive() {
            let n = k.numer().try_into().unwrap_or(usize::MAX);
            sums.push((base, n));
            continue;
        }
        let factor = pow_canon(base, &k);
        match factor.node() {
            Node::Const(c) => coeff *= c,
            Node::Product(_) | Node::Sum(_) => {
                again = true;
                plain.push(factor);
            }
            _ => plain.push(factor),
        }
    }
    if again {
        let mut all = plain;
        all.push(constant(coeff));
        for (s, n) in sums {
            all.extend(std::iter::repeat_n(s, n));
        }
        return mul_all(all);
    }
    if coeff.is_zero() {
        return constant(Rational::zero());
    }

    if !sums.is_empty() {
        // distribute the monomial over every sum factor
        let mono = build_product(coeff, plain);
        let mut terms = vec![mono];
        for (s, n) in sums {
            let parts: Vec<Expr> = match s.node() {
                Node::Sum(xs) => xs.clone(),
                _ => unreachable!(),
            };
            for _ in 0..n {
                let mut next = Vec::with_capacity(terms.len() * parts.len());
                for t in &terms {
                    for p in &parts {
                        next.push(mul_all(vec![t.clone(), p.clone()]));
                    }
                }
                terms = vec![add_all(next)];
                if let Node::Sum(xs) = terms[0].node() {
                    terms = xs.clone();
                }
            }
        }
        return add_all(terms);
    }
    build_product(coeff, plain)
}

fn build_product(coeff: Rational, mut factors: Vec<Expr>) -> Expr {
    if coeff.is_zero() {
        return constant(coeff);
    }
    factors.sort();
    if factors.is_empty() {
        return constant(coeff);
    }
    if coeff.is_one() && factors.len() == 1 {
        return factors.pop().unwrap();
    }
    let mut out = Vec::with_capacity(factors.len() + 1);
    if !coeff.is_one() {
        out.push(constant(coeff));
    }
    out.extend(factors);
    Expr::canonical(Node::Product(out))
}

fn rational_pow(c: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(c.clone(), k as usize)
    } else {
        num_traits::pow(c.recip(), (-k) as usize)
    }
}

/// `base^k` for canonical `base`.
pub(crate) fn pow_canon(base: Expr, k: &Rational) -> Expr {
    if k.is_zero() {
        return constant(Rational::one());
    }
    if k.is_one() {
        return base;
    }
    let int_k: Option<i64> = if is_integer(k) { k.numer().try_into().ok() } else { None };
    match base.node() {
        Node::Const(c) => {
            if c.is_zero() {
                if k.is_positive() {
                    return constant(Rational::zero());
                }
                return Expr::canonical(Node::Power(base.clone(), k.clone()));
            }
            if c.is_one() {
                return base;
            }
            if let Some(n) = int_k {
                if n.unsigned_abs() <= 4096 {
                    return constant(rational_pow(c, n));
                }
            }
            Expr::canonical(Node::Power(base.clone(), k.clone()))
        }
        Node::Power(inner, k2) if int_k.is_some() => pow_canon(inner.clone(), &(k2 * k)),
        Node::Product(fs) if int_k.is_some() => {
            mul_all(fs.iter().map(|f| pow_canon(f.clone(), k)).collect())
        }
        Node::Sum(_) if int_k.is_some_and(|n| n > 0) => {
            let n = int_k.unwrap() as usize;
            mul_all(vec![base; n])
        }
        _ => Expr::canonical(Node::Power(base, k.clone())),
    }
}

fn call_canon(f: Func, arg: Expr) -> Expr {
    if arg.is_literal_zero() {
        match f {
            Func::Sin | Func::Tan | Func::Sinh | Func::Tanh => return constant(Rational::zero()),
            Func::Cos | Func::Sec | Func::Cosh | Func::Exp => return constant(Rational::one()),
            _ => {}
        }
    }
    if f == Func::Ln && arg.as_const().is_some_and(One::is_one) {
        return constant(Rational::zero());
    }
    Expr::canonical(Node::Call(f, arg))
}
