//! Laplacian-type operators specialised to each geometry family.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{differentiate, rational_from_f64, simplify, Expr};
use crate::geometry::{Geometry, RADIAL};

/// Iterated Laplacians abort once an intermediate result exceeds this many
/// nodes.
pub const NODE_CAP: usize = 20_000;

/// Radial factor `F(r)` of a product `F(r) V W` where `V`, `W` are sphere
/// eigenfunctions with eigenvalues `lambda`, `mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedFunction {
    pub radial: Expr,
    pub lambda: f64,
    pub mu: f64,
    /// Set when both eigenvalues are of the form `-k(k+1)`.
    pub spectral: bool,
}

impl SeparatedFunction {
    pub fn new(radial: Expr, lambda: f64, mu: f64) -> Result<SeparatedFunction> {
        for (name, v) in [("lambda", lambda), ("mu", mu)] {
            if !(v <= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be a finite non-positive number")));
            }
        }
        let spectral = is_sphere_eigenvalue(lambda) && is_sphere_eigenvalue(mu);
        Ok(SeparatedFunction { radial, lambda, mu, spectral })
    }

    /// Eigenvalues `-k1(k1+1)` and `-k2(k2+1)`.
    pub fn spectral(radial: Expr, k1: u32, k2: u32) -> SeparatedFunction {
        let ev = |k: u32| -((k as f64) * (k as f64 + 1.0));
        SeparatedFunction { radial, lambda: ev(k1), mu: ev(k2), spectral: true }
    }

    pub fn with_radial(&self, radial: Expr) -> SeparatedFunction {
        SeparatedFunction { radial, ..self.clone() }
    }
}

fn is_sphere_eigenvalue(v: f64) -> bool {
    let k = ((1.0 - 4.0 * v).sqrt() - 1.0) / 2.0;
    k.fract() == 0.0 && k * (k + 1.0) == -v
}

/// A function the operators can act on.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FunctionValue {
    Expr(Expr),
    Separated(SeparatedFunction),
}

impl FunctionValue {
    /// The expression the operators differentiate: `F` itself, or the radial
    /// factor of a separated function.
    pub fn expr(&self) -> &Expr {
        match self {
            FunctionValue::Expr(e) => e,
            FunctionValue::Separated(s) => &s.radial,
        }
    }

    pub fn map(&self, f: impl FnOnce(&Expr) -> Expr) -> FunctionValue {
        match self {
            FunctionValue::Expr(e) => FunctionValue::Expr(f(e)),
            FunctionValue::Separated(s) => FunctionValue::Separated(s.with_radial(f(&s.radial))),
        }
    }
}

impl From<Expr> for FunctionValue {
    fn from(e: Expr) -> Self {
        FunctionValue::Expr(e)
    }
}

impl fmt::Display for FunctionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionValue::Expr(e) => write!(f, "{e}"),
            FunctionValue::Separated(s) => write!(f, "({}) * V * W [lambda = {}, mu = {}]", s.radial, s.lambda, s.mu),
        }
    }
}

fn wrong(expected: &'static str, g: &Geometry) -> Error {
    Error::WrongGeometry { expected, found: g.kind().into() }
}

/// Fails with `ForeignVariable` unless every free variable of `f` is a
/// coordinate of `g`.
pub fn check_variables(f: &Expr, g: &Geometry) -> Result<()> {
    let coords = g.coordinates();
    match f.free_vars().into_iter().find(|v| !coords.contains(v)) {
        Some(var) => Err(Error::ForeignVariable { var, allowed: coords.join(", ") }),
        None => Ok(()),
    }
}

fn constant(x: f64) -> Result<Expr> {
    rational_from_f64(x)
        .map(Expr::constant)
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

/// `F'' + a F'` with a caller-supplied derivative.
pub(crate) fn radial_with(f: &Expr, coefficient: &Expr, d: &dyn Fn(&Expr) -> Expr) -> Expr {
    let d1 = d(f);
    let d2 = d(&d1);
    simplify(&(d2 + coefficient.clone() * d1))
}

fn radial_derivative(e: &Expr) -> Expr {
    differentiate(e, RADIAL)
}

/// `F'' + (m-1)(f'/f) F'` on a model.
pub fn radial_laplacian(f: &Expr, g: &Geometry) -> Result<Expr> {
    if !matches!(g, Geometry::Model { .. }) {
        return Err(wrong("model", g));
    }
    check_variables(f, g)?;
    Ok(radial_with(f, &g.radial_coefficient().unwrap(), &radial_derivative))
}

/// The tension field `tau_F`; identical to [`radial_laplacian`].
pub fn tension(f: &Expr, g: &Geometry) -> Result<Expr> {
    radial_laplacian(f, g)
}

/// `F'' + [(p-1) f1'/f1 + (q-1) f2'/f2] F'` on a warped product.
pub fn warped_radial_laplacian(f: &Expr, g: &Geometry) -> Result<Expr> {
    if !matches!(g, Geometry::Warped { .. }) {
        return Err(wrong("warped", g));
    }
    check_variables(f, g)?;
    Ok(radial_with(f, &g.radial_coefficient().unwrap(), &radial_derivative))
}

/// Potential `lambda/f1^2 + mu/f2^2` of a separated function.
pub fn separated_potential(s: &SeparatedFunction, g: &Geometry) -> Result<Expr> {
    let Geometry::Warped { f1, f2, .. } = g else {
        return Err(wrong("warped", g));
    };
    let term = |c: f64, w: &Expr| -> Result<Option<Expr>> {
        Ok((c != 0.0).then_some(constant(c)? * w.clone().powi(-2)))
    };
    let terms: Vec<Expr> = [term(s.lambda, f1)?, term(s.mu, f2)?].into_iter().flatten().collect();
    Ok(simplify(&Expr::sum(terms)))
}

/// Radial factor of the Laplacian of a separated function; the angular
/// factors divide out.
pub fn separated_laplacian(s: &SeparatedFunction, g: &Geometry) -> Result<Expr> {
    let radial = warped_radial_laplacian(&s.radial, g)?;
    let potential = separated_potential(s, g)?;
    Ok(simplify(&(radial + potential * s.radial.clone())))
}

/// `sum_i d^2F/dx_i^2 - sum_j d^2F/dy_j^2`.
pub fn cartesian_laplacian(f: &Expr, g: &Geometry) -> Result<Expr> {
    let Geometry::SemiEuclidean { p, .. } = g else {
        return Err(wrong("semieuclidean", g));
    };
    check_variables(f, g)?;
    let terms: Vec<Expr> = g
        .coordinates()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d2 = differentiate(&differentiate(f, v), v);
            if i < *p as usize {
                d2
            } else {
                -d2
            }
        })
        .collect();
    Ok(simplify(&Expr::sum(terms)))
}

/// One application of the geometry's Laplacian.
pub fn laplacian(f: &FunctionValue, g: &Geometry) -> Result<Expr> {
    match (f, g) {
        (FunctionValue::Separated(s), Geometry::Warped { .. }) => separated_laplacian(s, g),
        (FunctionValue::Separated(_), _) => Err(wrong("warped", g)),
        (FunctionValue::Expr(e), Geometry::Model { .. }) => radial_laplacian(e, g),
        (FunctionValue::Expr(e), Geometry::Warped { .. }) => warped_radial_laplacian(e, g),
        (FunctionValue::Expr(e), Geometry::SemiEuclidean { .. }) => cartesian_laplacian(e, g),
    }
}

/// `[F, Delta F, ..., Delta^s F]`, simplified after every step.
pub fn laplacian_sequence(f: &FunctionValue, g: &Geometry, s: usize) -> Result<Vec<Expr>> {
    let mut current = f.map(simplify);
    let mut out = vec![current.expr().clone()];
    for order in 1..=s {
        let next = laplacian(&current, g)?;
        if next.size() > NODE_CAP {
            return Err(Error::ExpressionBlowup { order, size: next.size() });
        }
        out.push(next.clone());
        current = current.map(|_| next);
    }
    Ok(out)
}

/// `Delta^s F`. For a separated function this is the radial factor.
pub fn iterated_laplacian(f: &FunctionValue, g: &Geometry, s: usize) -> Result<Expr> {
    Ok(laplacian_sequence(f, g, s)?.pop().unwrap())
}

/// Signature dot product of gradients: `sum dxF1 dxF2 - sum dyF1 dyF2`, or
/// `F1' F2'` for radial functions.
pub fn gradient_dot(f1: &Expr, f2: &Expr, g: &Geometry) -> Result<Expr> {
    check_variables(f1, g)?;
    check_variables(f2, g)?;
    let p = match g {
        Geometry::SemiEuclidean { p, .. } => *p as usize,
        _ => 1,
    };
    let terms: Vec<Expr> = g
        .coordinates()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = differentiate(f1, v) * differentiate(f2, v);
            if i < p {
                t
            } else {
                -t
            }
        })
        .collect();
    Ok(simplify(&Expr::sum(terms)))
}

/// Right-hand side `F1 Delta F2 + F2 Delta F1 + 2 grad F1 . grad F2`.
pub fn laplacian_product_rule(f1: &Expr, f2: &Expr, g: &Geometry) -> Result<Expr> {
    let l1 = laplacian(&f1.clone().into(), g)?;
    let l2 = laplacian(&f2.clone().into(), g)?;
    let dot = gradient_dot(f1, f2, g)?;
    Ok(simplify(&(f1.clone() * l2 + f2.clone() * l1 + Expr::int(2) * dot)))
}

/// `(dF/dx_1, ..., dF/dx_p, -dF/dy_1, ..., -dF/dy_q)`.
pub fn pq_gradient(f: &Expr, g: &Geometry) -> Result<Vec<Expr>> {
    let Geometry::SemiEuclidean { p, .. } = g else {
        return Err(wrong("semieuclidean", g));
    };
    check_variables(f, g)?;
    Ok(g.coordinates()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let d = differentiate(f, v);
            if i < *p as usize {
                d
            } else {
                simplify(&-d)
            }
        })
        .collect())
}

/// `sum x_i dF/dx_i + sum y_j dF/dy_j`, all signs positive.
pub fn euler_pairing(f: &Expr, g: &Geometry) -> Result<Expr> {
    if !matches!(g, Geometry::SemiEuclidean { .. }) {
        return Err(wrong("semieuclidean", g));
    }
    check_variables(f, g)?;
    let terms: Vec<Expr> = g.coordinates().iter().map(|v| Expr::var(v) * differentiate(f, v)).collect();
    Ok(simplify(&Expr::sum(terms)))
}
