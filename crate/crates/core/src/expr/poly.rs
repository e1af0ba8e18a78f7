//! Exact zero test for rational expressions.
//!
//! An expression built from constants, variables, `pi`, `+`, `-`, `*`, `/`
//! and integer powers is brought to a single quotient `N / (D1^e1 ... Dk^ek)`
//! with an expanded numerator. The expression vanishes identically exactly
//! when `N` is the zero polynomial. `pi` is treated as an indeterminate, which
//! is sound because it is transcendental.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{is_integer, Expr, Node, Rational};

type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    fn constant(c: Rational, nvars: usize) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    fn var(index: usize, nvars: usize) -> Poly {
        let mut m = vec![0; nvars];
        m[index] = 1;
        let mut p = Poly::zero();
        p.terms.insert(m, Rational::one());
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let slot = out.terms.entry(m.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                let slot = out.terms.entry(m.clone()).or_insert_with(Rational::zero);
                *slot += c1 * c2;
                if slot.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    fn pow(&self, n: u32, nvars: usize) -> Poly {
        let mut out = Poly::constant(Rational::one(), nvars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Constant polynomial value, if this polynomial is constant.
    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Splits off the leading coefficient: `self = lc * monic`.
    fn normalize(&self) -> (Rational, Poly) {
        let lc = self.terms.values().next_back().cloned().unwrap_or_else(Rational::one);
        (lc.clone(), self.scale(&lc.recip()))
    }
}

/// `num / prod(den[i].0 ^ den[i].1)` with monic, non-constant denominator factors.
#[derive(Debug, Clone)]
struct RatFun {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

struct Builder {
    vars: BTreeMap<String, usize>,
}

impl Builder {
    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn poly_of_den(&self, den: &BTreeMap<Poly, u32>) -> Poly {
        den.iter().fold(Poly::constant(Rational::one(), self.nvars()), |acc, (p, e)| acc.mul(&p.pow(*e, self.nvars())))
    }

    fn build(&self, e: &Expr) -> Option<RatFun> {
        let n = self.nvars();
        Some(match e.node() {
            Node::Const(c) => RatFun { num: Poly::constant(c.clone(), n), den: BTreeMap::new() },
            Node::Pi => RatFun { num: Poly::var(self.vars["\u{3c0}"], n), den: BTreeMap::new() },
            Node::Var(v) => RatFun { num: Poly::var(self.vars[&**v], n), den: BTreeMap::new() },
            Node::Neg(a) => {
                let r = self.build(a)?;
                RatFun { num: r.num.scale(&-Rational::one()), den: r.den }
            }
            Node::Sum(ts) => {
                let parts = ts.iter().map(|t| self.build(t)).collect::<Option<Vec<_>>>()?;
                self.add(parts)
            }
            Node::Product(fs) => {
                let parts = fs.iter().map(|f| self.build(f)).collect::<Option<Vec<_>>>()?;
                parts.into_iter().fold(self.one(), |acc, p| Self::mul(acc, p))
            }
            Node::Quotient(a, b) => {
                let num = self.build(a)?;
                let den = self.invert(self.build(b)?, 1)?;
                Self::mul(num, den)
            }
            Node::Power(b, k) => {
                if !is_integer(k) {
                    return None;
                }
                let k: i64 = k.numer().try_into().ok()?;
                if k.unsigned_abs() > 64 {
                    return None;
                }
                let base = self.build(b)?;
                if k >= 0 {
                    let mut acc = self.one();
                    for _ in 0..k {
                        acc = Self::mul(acc, base.clone());
                    }
                    acc
                } else {
                    self.invert(base, (-k) as u32)?
                }
            }
            Node::Call(..) => return None,
        })
    }

    fn one(&self) -> RatFun {
        RatFun { num: Poly::constant(Rational::one(), self.nvars()), den: BTreeMap::new() }
    }

    fn mul(a: RatFun, b: RatFun) -> RatFun {
        let mut den = a.den;
        for (p, e) in b.den {
            *den.entry(p).or_insert(0) += e;
        }
        RatFun { num: a.num.mul(&b.num), den }
    }

    /// `r^-k`; `None` when the numerator is identically zero.
    fn invert(&self, r: RatFun, k: u32) -> Option<RatFun> {
        if r.num.is_zero() {
            return None;
        }
        let num = self.poly_of_den(&r.den).pow(k, self.nvars());
        if let Some(c) = r.num.as_constant() {
            let ck = num_traits::pow(c, k as usize);
            return Some(RatFun { num: num.scale(&ck.recip()), den: BTreeMap::new() });
        }
        let (lc, monic) = r.num.normalize();
        let scale = num_traits::pow(lc, k as usize).recip();
        let mut den = BTreeMap::new();
        den.insert(monic, k);
        Some(RatFun { num: num.scale(&scale), den })
    }

    fn add(&self, parts: Vec<RatFun>) -> RatFun {
        let mut lcm: BTreeMap<Poly, u32> = BTreeMap::new();
        for p in &parts {
            for (f, e) in &p.den {
                let slot = lcm.entry(f.clone()).or_insert(0);
                *slot = (*slot).max(*e);
            }
        }
        let mut num = Poly::zero();
        for p in parts {
            let mut missing = BTreeMap::new();
            for (f, e) in &lcm {
                let have = p.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    missing.insert(f.clone(), e - have);
                }
            }
            num = num.add(&p.num.mul(&self.poly_of_den(&missing)));
        }
        RatFun { num, den: lcm }
    }
}

/// `Some(true)` when `e` is a rational expression that vanishes identically,
/// `Some(false)` when it is rational and does not, `None` when `e` is outside
/// the rational fragment (transcendental calls, fractional exponents, or an
/// identically-zero denominator).
pub fn is_rational_zero(e: &Expr) -> Option<bool> {
    let mut names: BTreeSet<String> = e.free_vars();
    names.insert("\u{3c0}".to_string());
    let vars = names.into_iter().enumerate().map(|(i, n)| (n, i)).collect();
    let b = Builder { vars };
    let r = b.build(e)?;
    Some(r.num.is_zero())
}
