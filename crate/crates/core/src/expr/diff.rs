use num_traits::One;

use super::{simplify, Expr, Func, Node, Rational};

/// Exact partial derivative of `e` with respect to `var`, simplified.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    match raw(e, var) {
        Some(d) => simplify(&d),
        None => Expr::zero(),
    }
}

/// Unsimplified derivative; `None` stands for an exact zero.
fn raw(e: &Expr, var: &str) -> Option<Expr> {
    if !e.contains_var(var) {
        return None;
    }
    match e.node() {
        Node::Const(_) | Node::Pi => None,
        Node::Var(_) => Some(Expr::one()),
        Node::Neg(a) => raw(a, var).map(|d| -d),
        Node::Sum(ts) => {
            let ds: Vec<Expr> = ts.iter().filter_map(|t| raw(t, var)).collect();
            non_empty_sum(ds)
        }
        Node::Product(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                if let Some(df) = raw(f, var) {
                    let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                    factors.extend(fs[..i].iter().cloned());
                    factors.push(df);
                    factors.extend(fs[i + 1..].iter().cloned());
                    terms.push(Expr::product(factors));
                }
            }
            non_empty_sum(terms)
        }
        Node::Quotient(a, b) => {
            let da = raw(a, var);
            let db = raw(b, var);
            // (a/b)' = a'/b - a*b'/b^2
            let mut terms = Vec::new();
            if let Some(da) = da {
                terms.push(Expr::quotient(da, b.clone()));
            }
            if let Some(db) = db {
                terms.push(-Expr::quotient(a.clone() * db, b.clone().powi(2)));
            }
            non_empty_sum(terms)
        }
        Node::Power(b, k) => {
            let db = raw(b, var)?;
            let lowered = b.clone().pow(k - Rational::one());
            Some(Expr::product(vec![Expr::constant(k.clone()), lowered, db]))
        }
        Node::Call(f, a) => {
            let da = raw(a, var)?;
            Some(outer_derivative(*f, a) * da)
        }
    }
}

fn non_empty_sum(mut terms: Vec<Expr>) -> Option<Expr> {
    match terms.len() {
        0 => None,
        1 => terms.pop(),
        _ => Some(Expr::sum(terms)),
    }
}

/// f'(u) expressed with the same family of builtins, so repeated
/// differentiation stays inside a small set of atoms.
fn outer_derivative(f: Func, u: &Expr) -> Expr {
    let u = u.clone();
    let one = Expr::one;
    match f {
        Func::Sin => u.cos(),
        Func::Cos => -u.sin(),
        Func::Tan => one() + u.tan().powi(2),
        Func::Cot => -(one() + u.cot().powi(2)),
        Func::Sec => u.clone().sec() * u.tan(),
        Func::Csc => -(u.clone().csc() * u.cot()),
        Func::Sinh => u.cosh(),
        Func::Cosh => u.sinh(),
        Func::Tanh => one() - u.tanh().powi(2),
        Func::Coth => one() - u.coth().powi(2),
        Func::Exp => u.exp(),
        Func::Ln => u.powi(-1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse, Assignment};

    fn at(name: &str, v: f64) -> Assignment {
        let mut a = Assignment::new();
        a.insert(name.into(), v);
        a
    }

    fn central(e: &Expr, var: &str, point: &Assignment, h: f64) -> f64 {
        let mut p = point.clone();
        let x = point[var];
        p.insert(var.into(), x + h);
        let up = evaluate(e, &p).unwrap();
        p.insert(var.into(), x - h);
        let down = evaluate(e, &p).unwrap();
        (up - down) / (2.0 * h)
    }

    #[test]
    fn square() {
        let d = differentiate(&parse("r^2").unwrap(), "r");
        assert_eq!(d, simplify(&parse("2*r").unwrap()));
    }

    #[test]
    fn cot_of_double_angle_matches_central_differences() {
        let e = parse("cot(2*r)").unwrap();
        let d = differentiate(&e, "r");
        for r in [0.3, 0.7, 1.1] {
            let exact = -2.0 / (2.0 * r as f64).sin().powi(2);
            let sym = evaluate(&d, &at("r", r)).unwrap();
            let fd = central(&e, "r", &at("r", r), 1e-5);
            assert!((sym - exact).abs() < 1e-12, "r={r}: {sym} vs {exact}");
            assert!((sym - fd).abs() < 1e-6 * (1.0 + sym.abs()));
        }
    }

    #[test]
    fn planar_quotient() {
        let e = parse("x/(x^2+y^2)").unwrap();
        let d = differentiate(&e, "x");
        let expected = parse("(y^2 - x^2)/(x^2+y^2)^2").unwrap();
        for (x, y) in [(0.5, 1.0), (-1.2, 0.3), (1.7, -0.8)] {
            let mut p = at("x", x);
            p.insert("y".into(), y);
            let a = evaluate(&d, &p).unwrap();
            let b = evaluate(&expected, &p).unwrap();
            assert!((a - b).abs() < 1e-12);
            assert!((a - central(&e, "x", &p, 1e-5)).abs() < 1e-6);
        }
    }

    #[test]
    fn free_subtree_has_zero_derivative() {
        assert_eq!(differentiate(&parse("sin(y)*exp(z)").unwrap(), "x"), Expr::zero());
    }

    #[test]
    fn every_builtin_matches_central_differences() {
        for name in ["sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh", "coth", "exp", "ln"] {
            let e = parse(&format!("{name}(x^2 + 1/2)")).unwrap();
            let d = differentiate(&e, "x");
            let p = at("x", 0.37);
            let sym = evaluate(&d, &p).unwrap();
            let fd = central(&e, "x", &p, 1e-5);
            assert!((sym - fd).abs() < 1e-6 * (1.0 + sym.abs()), "{name}: {sym} vs {fd}");
        }
    }
}
