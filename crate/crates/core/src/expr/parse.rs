use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Expr, ExprError, Func, Node, Rational};

/// Parses an expression.
///
/// ```text
/// expr     := term (('+'|'-') term)*
/// term     := unary (('*'|'/') unary)*
/// unary    := '-' unary | power
/// power    := atom ('^' exponent)?
/// exponent := integer | '(' integer '/' integer ')' | '-' exponent
/// atom     := number | 'pi' | identifier | identifier '(' expr ')' | '(' expr ')'
/// ```
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(b) => format!("`{}`", b as char),
                None => "end of input".to_string(),
            };
            Err(self.syntax(format!("expected `{}`, found {found}", c as char)))
        }
    }

    fn syntax(&self, message: String) -> ExprError {
        ExprError::Syntax { offset: self.pos, message }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let first = self.term()?;
        let mut terms = vec![first];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::new(Node::Neg(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        // factors of the current `*` chain; a `/` closes the chain into a quotient
        let mut chain: Vec<Expr> = Vec::new();
        loop {
            if self.eat(b'*') {
                if chain.is_empty() {
                    chain.push(acc.clone());
                }
                chain.push(self.unary()?);
                acc = Expr::product(chain.clone());
            } else if self.eat(b'/') {
                let den = self.unary()?;
                acc = Expr::quotient(acc, den);
                chain.clear();
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            Ok(Expr::new(Node::Neg(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<Rational, ExprError> {
        if self.eat(b'-') {
            return Ok(-self.exponent()?);
        }
        if self.eat(b'(') {
            let n = self.integer()?;
            self.expect(b'/')?;
            let at = self.pos;
            let d = self.integer()?;
            self.expect(b')')?;
            if d.is_zero() {
                return Err(ExprError::MalformedNumber {
                    text: "0".into(),
                    offset: at,
                });
            }
            return Ok(Rational::new(n, d));
        }
        Ok(Rational::from_integer(self.integer()?))
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected integer".into()));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().expect("ascii digits"))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
            None => Err(self.syntax("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let src = self.src;
        let mut i = self.pos;
        while i < src.len() && (src[i].is_ascii_alphanumeric() || src[i] == b'.') {
            // allow a sign directly after an exponent marker
            i += 1;
            if i < src.len() && (src[i] == b'+' || src[i] == b'-') && matches!(src[i - 1], b'e' | b'E') {
                i += 1;
            }
        }
        let text = std::str::from_utf8(&src[start..i]).unwrap();
        self.pos = i;
        match parse_decimal(text) {
            Some(q) => Ok(Expr::constant(q)),
            None => Err(ExprError::MalformedNumber {
                text: text.to_string(),
                offset: start,
            }),
        }
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Expr::call(func, arg));
        }
        if name == "pi" {
            Ok(Expr::pi())
        } else {
            Ok(Expr::var(name))
        }
    }
}

/// Exact value of a decimal literal such as `12`, `0.25` or `1.5e-3`.
pub(crate) fn parse_decimal(text: &str) -> Option<Rational> {
    let (neg, text) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = text[i + 1..].parse().ok()?;
            (&text[..i], e)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exp.unsigned_abs() > 400 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut den = BigInt::one();
    if scale >= 0 {
        num *= num_traits::pow(ten, scale as usize);
    } else {
        den = num_traits::pow(ten, (-scale) as usize);
    }
    if neg {
        num = -num;
    }
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn call_of_product() {
        let e = parse("sin(2*r)").unwrap();
        assert_eq!(e, Expr::call(Func::Sin, Expr::product(vec![Expr::int(2), v("r")])));
    }

    #[test]
    fn quotient_with_powered_denominator() {
        let e = parse("(4*r - sin(4*r)) / sin(2*r)^2").unwrap();
        let num = Expr::sum(vec![
            Expr::product(vec![Expr::int(4), v("r")]),
            -Expr::call(Func::Sin, Expr::product(vec![Expr::int(4), v("r")])),
        ]);
        let den = Expr::call(Func::Sin, Expr::product(vec![Expr::int(2), v("r")])).powi(2);
        assert_eq!(e, Expr::quotient(num, den));
    }

    #[test]
    fn light_cone_quotient() {
        let e = parse("x/(x^2 - y^2)").unwrap();
        let den = Expr::sum(vec![v("x").powi(2), -v("y").powi(2)]);
        assert_eq!(e, Expr::quotient(v("x"), den));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(parse("-x^2").unwrap(), -(v("x").powi(2)));
    }

    #[test]
    fn left_associative_division() {
        let e = parse("a/b/c").unwrap();
        assert_eq!(e, Expr::quotient(Expr::quotient(v("a"), v("b")), v("c")));
        let e = parse("a/b*c").unwrap();
        assert_eq!(e, Expr::product(vec![Expr::quotient(v("a"), v("b")), v("c")]));
    }

    #[test]
    fn rational_and_negative_exponents() {
        assert_eq!(parse("x^(1/2)").unwrap(), v("x").pow(Rational::new(1.into(), 2.into())));
        assert_eq!(parse("x^-2").unwrap(), v("x").powi(-2));
        assert_eq!(parse("x^-(3/4)").unwrap(), v("x").pow(Rational::new((-3).into(), 4.into())));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.25").unwrap(), Expr::ratio(1, 4));
        assert_eq!(parse("1.5e-3").unwrap(), Expr::ratio(3, 2000));
        assert_eq!(parse("pi").unwrap(), Expr::pi());
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("x + * y") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse("foo(x)") {
            Err(ExprError::UnknownFunction { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("1.2.3"), Err(ExprError::MalformedNumber { .. })));
        assert!(matches!(parse("2e"), Err(ExprError::MalformedNumber { .. })));
        assert!(matches!(parse("x^2^3"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("(x"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("x^(1/0)"), Err(ExprError::MalformedNumber { .. })));
    }
}
