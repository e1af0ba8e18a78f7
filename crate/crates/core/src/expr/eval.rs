use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{is_integer, rational_to_f64, Expr, ExprError, Func, Node, Rational};

/// Variable values for numeric evaluation.
pub type Assignment = BTreeMap<String, f64>;

/// Magnitudes below this count as a pole (division by zero, `cot(0)`, ...).
pub const POLE_THRESHOLD: f64 = 1e-14;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Numeric value of `e` in double precision.
pub fn evaluate(e: &Expr, assignment: &Assignment) -> Result<f64, ExprError> {
    eval_node(e, assignment).map(|(v, _)| v)
}

/// Value together with a first-order estimate of the accumulated rounding
/// error, propagated through every node.
pub fn evaluate_with_bound(e: &Expr, assignment: &Assignment) -> Result<(f64, f64), ExprError> {
    eval_node(e, assignment)
}

fn domain(msg: String) -> ExprError {
    ExprError::Domain(msg)
}

fn checked_recip(v: f64, what: &str) -> Result<f64, ExprError> {
    if v.abs() < POLE_THRESHOLD {
        Err(domain(format!("{what} at a pole")))
    } else {
        Ok(1.0 / v)
    }
}

fn finite(v: f64, what: &str) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{what} is not finite")))
    }
}

fn eval_node(e: &Expr, a: &Assignment) -> Result<(f64, f64), ExprError> {
    let u = UNIT_ROUNDOFF;
    let out = match e.node() {
        Node::Const(c) => {
            let v = rational_to_f64(c);
            let err = if is_integer(c) && v.abs() < 9.0e15 { 0.0 } else { v.abs() * u };
            (v, err)
        }
        Node::Pi => (PI, PI * u),
        Node::Var(name) => {
            let v = *a
                .get(&**name)
                .ok_or_else(|| ExprError::UnboundVariable(name.to_string()))?;
            (v, 0.0)
        }
        Node::Neg(x) => {
            let (v, err) = eval_node(x, a)?;
            (-v, err)
        }
        Node::Sum(ts) => {
            let mut v = 0.0;
            let mut err = 0.0;
            let mut mag = 0.0;
            for t in ts {
                let (tv, te) = eval_node(t, a)?;
                v += tv;
                err += te;
                mag += tv.abs();
            }
            (v, err + mag * u * ts.len() as f64)
        }
        Node::Product(fs) => {
            let vals = fs.iter().map(|f| eval_node(f, a)).collect::<Result<Vec<_>, _>>()?;
            let v: f64 = vals.iter().map(|(x, _)| x).product();
            let mut err = v.abs() * u * vals.len() as f64;
            for (i, (_, ei)) in vals.iter().enumerate() {
                if *ei == 0.0 {
                    continue;
                }
                let others: f64 = vals
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (x, _))| x.abs())
                    .product();
                err += ei * others;
            }
            (v, err)
        }
        Node::Quotient(n, d) => {
            let (nv, ne) = eval_node(n, a)?;
            let (dv, de) = eval_node(d, a)?;
            let inv = checked_recip(dv, "division")?;
            let v = nv * inv;
            (v, ne * inv.abs() + de * (v * inv).abs() + v.abs() * u)
        }
        Node::Power(b, k) => {
            let (bv, be) = eval_node(b, a)?;
            let kf = rational_to_f64(k);
            let v = power(bv, k)?;
            let deriv = if bv == 0.0 { 0.0 } else { (kf * v / bv).abs() };
            (v, deriv * be + v.abs() * u * 2.0)
        }
        Node::Call(f, x) => {
            let (xv, xe) = eval_node(x, a)?;
            let (v, dv) = call(*f, xv)?;
            (v, dv.abs() * xe + v.abs() * u * 2.0 + dv.abs() * xv.abs() * u)
        }
    };
    finite(out.0, "value")?;
    Ok(out)
}

fn power(b: f64, k: &Rational) -> Result<f64, ExprError> {
    if is_integer(k) {
        let n: i32 = k
            .numer()
            .try_into()
            .map_err(|_| domain("exponent too large".into()))?;
        if n < 0 && b.abs() < POLE_THRESHOLD {
            return Err(domain("negative power of zero".into()));
        }
        return Ok(b.powi(n));
    }
    let kf = rational_to_f64(k);
    let odd_denominator = k.denom() % 2u32 == 1u32.into();
    if b < 0.0 {
        if !odd_denominator {
            return Err(domain("even root of a negative number".into()));
        }
        let mag = (-b).powf(kf);
        let odd_numerator = k.numer() % 2 != 0.into();
        return Ok(if odd_numerator { -mag } else { mag });
    }
    if kf < 0.0 && b.abs() < POLE_THRESHOLD {
        return Err(domain("negative power of zero".into()));
    }
    Ok(b.powf(kf))
}

/// Value and derivative of a builtin at `x`.
fn call(f: Func, x: f64) -> Result<(f64, f64), ExprError> {
    Ok(match f {
        Func::Sin => (x.sin(), x.cos()),
        Func::Cos => (x.cos(), -x.sin()),
        Func::Tan => {
            let sec = checked_recip(x.cos(), "tan")?;
            (x.sin() * sec, sec * sec)
        }
        Func::Cot => {
            let csc = checked_recip(x.sin(), "cot")?;
            (x.cos() * csc, -csc * csc)
        }
        Func::Sec => {
            let sec = checked_recip(x.cos(), "sec")?;
            (sec, sec * x.tan())
        }
        Func::Csc => {
            let csc = checked_recip(x.sin(), "csc")?;
            (csc, -csc * x.cos() * csc)
        }
        Func::Sinh => (x.sinh(), x.cosh()),
        Func::Cosh => (x.cosh(), x.sinh()),
        Func::Tanh => {
            let t = x.tanh();
            (t, 1.0 - t * t)
        }
        Func::Coth => {
            let t = checked_recip(x.tanh(), "coth")?;
            (t, 1.0 - t * t)
        }
        Func::Exp => (x.exp(), x.exp()),
        Func::Ln => {
            if x <= 0.0 {
                return Err(domain(format!("ln of non-positive value {x}")));
            }
            (x.ln(), 1.0 / x)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn r(v: f64) -> Assignment {
        let mut a = Assignment::new();
        a.insert("r".into(), v);
        a
    }

    #[test]
    fn square_at_three() {
        assert_eq!(evaluate(&parse("r^2").unwrap(), &r(3.0)).unwrap(), 9.0);
    }

    #[test]
    fn harmonic_profile_at_quarter_pi() {
        let e = parse("(4*r - sin(4*r)) / sin(2*r)^2").unwrap();
        let v = evaluate(&e, &r(std::f64::consts::FRAC_PI_4)).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn poles_and_domains() {
        assert!(matches!(evaluate(&parse("cot(r)").unwrap(), &r(0.0)), Err(ExprError::Domain(_))));
        assert!(matches!(evaluate(&parse("1/r").unwrap(), &r(0.0)), Err(ExprError::Domain(_))));
        assert!(matches!(evaluate(&parse("ln(r)").unwrap(), &r(-1.0)), Err(ExprError::Domain(_))));
        assert!(matches!(evaluate(&parse("r^(1/2)").unwrap(), &r(-1.0)), Err(ExprError::Domain(_))));
        assert!(matches!(evaluate(&parse("tan(pi/2)").unwrap(), &r(0.0)), Err(ExprError::Domain(_))));
        assert_eq!(evaluate(&parse("r^(1/3)").unwrap(), &r(-8.0)).unwrap(), -2.0);
    }

    #[test]
    fn unbound_variable() {
        assert_eq!(
            evaluate(&parse("x + r").unwrap(), &r(1.0)),
            Err(ExprError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn bound_tracks_cancellation() {
        let e = parse("(1 + r) - 1").unwrap();
        let (v, err) = evaluate_with_bound(&e, &r(1e-12)).unwrap();
        assert!((v - 1e-12).abs() <= err * 4.0 + 1e-28);
        assert!(err > 0.0);
    }
}
