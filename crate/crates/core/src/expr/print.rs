use std::fmt::{self, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Expr, Node, Rational};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, SUM);
        f.write_str(&s)
    }
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) => {
            if c.is_negative() {
                UNARY
            } else if decimal_digits(c).is_some() {
                ATOM
            } else {
                PRODUCT
            }
        }
        Node::Pi | Node::Var(_) | Node::Call(..) => ATOM,
        Node::Neg(_) => UNARY,
        Node::Sum(_) => SUM,
        Node::Product(_) | Node::Quotient(..) => PRODUCT,
        Node::Power(..) => POWER,
    }
}

fn write_at(out: &mut String, e: &Expr, min: u8) {
    if precedence(e) < min {
        out.push('(');
        write_expr(out, e, SUM);
        out.push(')');
    } else {
        write_expr(out, e, min);
    }
}

fn write_expr(out: &mut String, e: &Expr, _min: u8) {
    match e.node() {
        Node::Const(c) => write_rational(out, c),
        Node::Pi => out.push_str("pi"),
        Node::Var(v) => out.push_str(v),
        Node::Neg(a) => {
            out.push('-');
            write_at(out, a, UNARY);
        }
        Node::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_at(out, t, PRODUCT);
                    continue;
                }
                if let Node::Neg(inner) = t.node() {
                    out.push_str(" - ");
                    write_at(out, inner, PRODUCT);
                } else if let Some(pos) = negated(t) {
                    out.push_str(" - ");
                    write_at(out, &pos, PRODUCT);
                } else {
                    out.push_str(" + ");
                    write_at(out, t, PRODUCT);
                }
            }
        }
        Node::Product(factors) => {
            let mut rest = &factors[..];
            if let Some(c) = factors.first().and_then(Expr::as_const) {
                if factors.len() > 1 && (c == &-Rational::one()) {
                    out.push('-');
                    rest = &factors[1..];
                }
            }
            for (i, f) in rest.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write_at(out, f, UNARY);
            }
        }
        Node::Quotient(a, b) => {
            write_at(out, a, PRODUCT);
            out.push('/');
            write_at(out, b, UNARY);
        }
        Node::Power(b, k) => {
            write_at(out, b, ATOM);
            out.push('^');
            write_exponent(out, k);
        }
        Node::Call(func, arg) => {
            out.push_str(func.name());
            out.push('(');
            write_expr(out, arg, SUM);
            out.push(')');
        }
    }
}

/// For a canonical term with a negative leading coefficient, the same term
/// with the sign flipped.
fn negated(t: &Expr) -> Option<Expr> {
    match t.node() {
        Node::Const(c) if c.is_negative() => Some(Expr::constant(-c)),
        Node::Product(fs) => {
            let c = fs.first()?.as_const()?;
            if !c.is_negative() {
                return None;
            }
            let c = -c;
            let mut rest: Vec<Expr> = fs[1..].to_vec();
            if !c.is_one() {
                rest.insert(0, Expr::constant(c));
            }
            Some(if rest.len() == 1 { rest.pop().unwrap() } else { Expr::product(rest) })
        }
        _ => None,
    }
}

fn write_exponent(out: &mut String, k: &Rational) {
    if k.is_negative() {
        out.push('-');
    }
    let k = k.abs();
    if k.is_integer() {
        write!(out, "{}", k.numer()).unwrap();
    } else {
        write!(out, "({}/{})", k.numer(), k.denom()).unwrap();
    }
}

/// Number of decimal places needed to print `q` exactly, if finite.
fn decimal_digits(q: &Rational) -> Option<u32> {
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut a, mut b) = (0u32, 0u32);
    while d.is_even() && !d.is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    d.is_one().then_some(a.max(b))
}

fn write_rational(out: &mut String, q: &Rational) {
    if q.is_negative() {
        out.push('-');
    }
    let q = q.abs();
    match decimal_digits(&q) {
        Some(0) => write!(out, "{}", q.numer()).unwrap(),
        Some(n) => {
            let scaled = (q.numer() * num_traits::pow(BigInt::from(10), n as usize)) / q.denom();
            let digits = scaled.to_string();
            let n = n as usize;
            let padded = if digits.len() <= n {
                format!("{}{}", "0".repeat(n + 1 - digits.len()), digits)
            } else {
                digits
            };
            let (int, frac) = padded.split_at(padded.len() - n);
            write!(out, "{int}.{frac}").unwrap();
        }
        None => write!(out, "{}/{}", q.numer(), q.denom()).unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, simplify};

    fn roundtrip(t: &str) {
        let e = parse(t).unwrap();
        let printed = e.to_string();
        let back = parse(&printed).unwrap_or_else(|err| panic!("{t} -> {printed}: {err}"));
        assert_eq!(back, e, "{t} printed as {printed}");
    }

    #[test]
    fn parse_print_roundtrip_corpus() {
        for t in [
            "sin(2*r)",
            "(4*r - sin(4*r)) / sin(2*r)^2",
            "x/(x^2 - y^2)",
            "-x^2",
            "--x",
            "a - -b",
            "-(a*b)",
            "(a*b)*c",
            "a*(b/c)",
            "a/(b*c)",
            "a/b/c",
            "(a+b)+c",
            "a - (b - c)",
            "x^-(1/2) + y^(3/4)",
            "(x^2)^3",
            "0.25*pi + 1.5e-3",
            "(-x)^2",
            "-(x + y)^2",
            "exp(ln(x)) * cosh(y) / coth(z)",
            "a*-b",
        ] {
            roundtrip(t);
        }
    }

    #[test]
    fn canonical_forms_print_readably() {
        let e = simplify(&parse("x - 2*y").unwrap());
        assert_eq!(e.to_string(), "x - 2*y");
        let e = simplify(&parse("x/3").unwrap());
        assert_eq!(e.to_string(), "(1/3)*x");
    }
}
