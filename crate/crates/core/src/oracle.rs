//! Finite-difference Laplacians and adaptive quadrature, independent of the
//! symbolic differentiator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{evaluate, evaluate_with_bound, Assignment, Expr, ExprError};
use crate::geometry::{Geometry, RADIAL};
use crate::operators::FunctionValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdConfig {
    pub h: f64,
    pub levels: u32,
    pub tol: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { h: 1e-3, levels: 2, tol: 1e-6 }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step h = {} must be positive", self.h)));
        }
        if !(1..=3).contains(&self.levels) {
            return Err(Error::InvalidArgument(format!("levels = {} must be 1, 2 or 3", self.levels)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn singular(e: ExprError) -> Error {
    Error::StencilSingular(e.to_string())
}

/// Richardson extrapolation of an `O(h^2)` difference quotient over steps
/// `h, h/2, ...`.
fn richardson(cfg: &FdConfig, quotient: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut row: Vec<f64> = Vec::with_capacity(cfg.levels as usize);
    for level in 0..cfg.levels {
        let h = cfg.h / f64::powi(2.0, level as i32);
        let mut next = vec![quotient(h)?];
        let mut factor = 4.0;
        for j in 0..row.len() {
            let refined = next[j] + (next[j] - row[j]) / (factor - 1.0);
            next.push(refined);
            factor *= 4.0;
        }
        row = next;
    }
    Ok(*row.last().unwrap())
}

/// Bound on how much the extrapolated quotient amplifies a unit error in the
/// function values, given the amplification `per_step(h)` of one quotient.
fn richardson_gain(cfg: &FdConfig, per_step: impl Fn(f64) -> f64) -> f64 {
    let mut row: Vec<f64> = Vec::with_capacity(cfg.levels as usize);
    for level in 0..cfg.levels {
        let h = cfg.h / f64::powi(2.0, level as i32);
        let mut next = vec![per_step(h)];
        let mut factor = 4.0;
        for j in 0..row.len() {
            let w = 1.0 / (factor - 1.0);
            next.push((1.0 + w) * next[j] + w * row[j]);
            factor *= 4.0;
        }
        row = next;
    }
    *row.last().unwrap()
}

/// Second derivative in one variable by extrapolated central differences.
pub fn fd_second(f: &dyn Fn(f64) -> Result<f64>, x: f64, cfg: &FdConfig) -> Result<f64> {
    let fx = f(x)?;
    richardson(cfg, |h| Ok((f(x + h)? - 2.0 * fx + f(x - h)?) / (h * h)))
}

/// First derivative by extrapolated central differences.
pub fn fd_first(f: &dyn Fn(f64) -> Result<f64>, x: f64, cfg: &FdConfig) -> Result<f64> {
    richardson(cfg, |h| Ok((f(x + h)? - f(x - h)?) / (2.0 * h)))
}

/// `sum_i d^2F/dx_i^2 - sum_j d^2F/dy_j^2` at `point`, by finite differences.
pub fn fd_cartesian_laplacian(
    f: &dyn Fn(&Assignment) -> Result<f64>,
    g: &Geometry,
    point: &Assignment,
    cfg: &FdConfig,
) -> Result<f64> {
    cfg.validate()?;
    let Geometry::SemiEuclidean { p, .. } = g else {
        return Err(Error::WrongGeometry { expected: "semieuclidean", found: g.kind().into() });
    };
    let mut total = 0.0;
    for (i, v) in g.coordinates().iter().enumerate() {
        let x = *point.get(v).ok_or_else(|| Error::Expr(ExprError::UnboundVariable(v.clone())))?;
        let along = |t: f64| {
            let mut q = point.clone();
            q.insert(v.clone(), t);
            f(&q)
        };
        let d2 = fd_second(&along, x, cfg)?;
        total += if i < *p as usize { d2 } else { -d2 };
    }
    Ok(total)
}

/// `F'' + a(r) F' (+ V(r) F)` at `r` by finite differences. The coefficient
/// `a = (k-1) f'/f` summed over the warping functions is rebuilt from the
/// warping values, with `f'` also taken by finite differences; `potential`
/// is the pair `(lambda, mu)` of a separated function.
pub fn fd_radial_laplacian(
    f: &dyn Fn(f64) -> Result<f64>,
    g: &Geometry,
    r: f64,
    potential: Option<(f64, f64)>,
    cfg: &FdConfig,
) -> Result<f64> {
    cfg.validate()?;
    let domain = g.domain().ok_or(Error::WrongGeometry { expected: "model or warped", found: g.kind().into() })?;
    let margin = 2.0 * cfg.h;
    if !(r - margin > domain.lo && r + margin < domain.hi) {
        return Err(Error::OutOfDomain { point: r, lo: domain.lo, hi: domain.hi });
    }
    let (coefficient, v) = radial_coefficients(g, r, potential, cfg)?;
    let d2 = fd_second(f, r, cfg)?;
    let d1 = fd_first(f, r, cfg)?;
    Ok(d2 + coefficient * d1 + v * f(r)?)
}

/// First-order coefficient and potential of the radial operator at `r`.
fn radial_coefficients(g: &Geometry, r: f64, potential: Option<(f64, f64)>, cfg: &FdConfig) -> Result<(f64, f64)> {
    let warp = |w: &Expr| {
        let w = w.clone();
        move |t: f64| evaluate(&w, &at(t)).map_err(singular)
    };
    let log_deriv = |w: &Expr| -> Result<f64> {
        let wf = warp(w);
        Ok(fd_first(&wf, r, cfg)? / wf(r)?)
    };
    Ok(match g {
        Geometry::Model { f: w, m, .. } => ((*m as f64 - 1.0) * log_deriv(w)?, 0.0),
        Geometry::Warped { f1, f2, p, q, .. } => {
            let a = (*p as f64 - 1.0) * log_deriv(f1)? + (*q as f64 - 1.0) * log_deriv(f2)?;
            let v = match potential {
                Some((lambda, mu)) => lambda / warp(f1)(r)?.powi(2) + mu / warp(f2)(r)?.powi(2),
                None => 0.0,
            };
            (a, v)
        }
        Geometry::SemiEuclidean { .. } => unreachable!(),
    })
}

fn at(r: f64) -> Assignment {
    [(RADIAL.to_string(), r)].into_iter().collect()
}

/// Finite-difference Laplacian of a symbolic function at `point`.
pub fn fd_laplacian(f: &FunctionValue, g: &Geometry, point: &Assignment, cfg: &FdConfig) -> Result<f64> {
    let e = f.expr().clone();
    if g.is_radial() {
        let r = *point.get(RADIAL).ok_or_else(|| Error::Expr(ExprError::UnboundVariable(RADIAL.into())))?;
        let eval = move |t: f64| evaluate(&e, &at(t)).map_err(singular);
        let potential = match f {
            FunctionValue::Separated(s) => Some((s.lambda, s.mu)),
            FunctionValue::Expr(_) => None,
        };
        fd_radial_laplacian(&eval, g, r, potential, cfg)
    } else {
        let eval = move |a: &Assignment| evaluate(&e, a).map_err(singular);
        fd_cartesian_laplacian(&eval, g, point, cfg)
    }
}

/// Rounding noise of [`fd_laplacian`] at `point`: the propagated rounding
/// bound of `f` on the stencil times the gain of the extrapolated
/// difference quotients.
pub fn fd_noise(f: &FunctionValue, g: &Geometry, point: &Assignment, cfg: &FdConfig) -> Result<f64> {
    cfg.validate()?;
    let e = f.expr();
    let coords = g.coordinates();
    let mut err: f64 = 0.0;
    for v in &coords {
        for t in [-cfg.h, 0.0, cfg.h] {
            let mut q = point.clone();
            if let Some(x) = q.get_mut(v) {
                *x += t;
            }
            err = err.max(evaluate_with_bound(e, &q).map_err(singular)?.1);
        }
    }
    let second = richardson_gain(cfg, |h| 4.0 / (h * h));
    if !g.is_radial() {
        return Ok(coords.len() as f64 * second * err);
    }
    let r = *point.get(RADIAL).ok_or_else(|| Error::Expr(ExprError::UnboundVariable(RADIAL.into())))?;
    let potential = match f {
        FunctionValue::Separated(s) => Some((s.lambda, s.mu)),
        FunctionValue::Expr(_) => None,
    };
    let (coefficient, v) = radial_coefficients(g, r, potential, cfg)?;
    let first = richardson_gain(cfg, |h| 1.0 / h);
    Ok((second + coefficient.abs() * first + v.abs()) * err)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckSample {
    pub point: Assignment,
    pub symbolic: f64,
    pub numeric: f64,
    pub discrepancy: f64,
    /// Absolute rounding noise admitted on top of the tolerance.
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub samples: Vec<CrossCheckSample>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `symbolic` with `numeric` at each point. The discrepancy is
/// `|symbolic - numeric| / max(|numeric|, 1)`.
pub fn cross_check(
    symbolic: &Expr,
    numeric: &dyn Fn(&Assignment) -> Result<f64>,
    points: &[Assignment],
    cfg: &FdConfig,
) -> Result<CrossCheckReport> {
    cross_check_with_noise(symbolic, numeric, &|_| Ok(0.0), points, cfg)
}

/// [`cross_check`] where a sample also passes when `|symbolic - numeric|`
/// is within `tol * max(|numeric|, 1) + noise(point)`.
pub fn cross_check_with_noise(
    symbolic: &Expr,
    numeric: &dyn Fn(&Assignment) -> Result<f64>,
    noise: &dyn Fn(&Assignment) -> Result<f64>,
    points: &[Assignment],
    cfg: &FdConfig,
) -> Result<CrossCheckReport> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("cross-check needs at least 3 points, got {}", points.len())));
    }
    let mut samples = Vec::with_capacity(points.len());
    let mut passed = true;
    for point in points {
        let s = evaluate(symbolic, point)?;
        let n = numeric(point)?;
        let scale = n.abs().max(1.0);
        let discrepancy = (s - n).abs() / scale;
        let noise = noise(point)?;
        passed &= (s - n).abs() <= cfg.tol * scale + noise;
        samples.push(CrossCheckSample { point: point.clone(), symbolic: s, numeric: n, discrepancy, noise });
    }
    let max_discrepancy = samples.iter().map(|s| s.discrepancy).fold(0.0, f64::max);
    Ok(CrossCheckReport { samples, max_discrepancy, tolerance: cfg.tol, passed })
}

/// Checks a symbolic `Delta^s F` against finite differences applied to the
/// symbolic `Delta^{s-1} F`, admitting the rounding noise of the stencil.
pub fn cross_check_laplacian(
    previous: &FunctionValue,
    symbolic: &Expr,
    g: &Geometry,
    points: &[Assignment],
    cfg: &FdConfig,
) -> Result<CrossCheckReport> {
    cross_check_with_noise(
        symbolic,
        &|p| fd_laplacian(previous, g, p, cfg),
        &|p| fd_noise(previous, g, p, cfg),
        points,
        cfg,
    )
}

/// Evenly spaced radial sample points inside the domain, or deterministic
/// Cartesian points off the coordinate hyperplanes.
pub fn interior_points(g: &Geometry, n: usize) -> Vec<Assignment> {
    match g.domain() {
        Some(d) => d.grid(n).into_iter().map(at).collect(),
        None => {
            let coords = g.coordinates();
            (0..n)
                .map(|i| {
                    coords
                        .iter()
                        .enumerate()
                        .map(|(j, v)| {
                            let t = 0.37 + 0.61 * (((i * 7 + j * 3) % 11) as f64) / 11.0;
                            let sign = if (i + j) % 3 == 1 { -1.0 } else { 1.0 };
                            (v.clone(), sign * t * (1.0 + 0.13 * j as f64))
                        })
                        .collect()
                })
                .collect()
        }
    }
}

/// Maximum number of interval subdivisions in [`quadrature`].
pub const MAX_SUBDIVISIONS: usize = 10_000;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn quadrature(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("quadrature needs finite bounds and positive tolerance".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return quadrature(f, b, a, tol).map(|v| -v);
    }
    struct Segment {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }
    let simpson = |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let (fa, fb, fm) = (f(a)?, f(b)?, f(0.5 * (a + b))?);
    let mut stack = vec![Segment { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb), tol }];
    let mut total = 0.0;
    let mut subdivisions = 0;
    while let Some(s) = stack.pop() {
        let m = 0.5 * (s.a + s.b);
        let (lm, rm) = (0.5 * (s.a + m), 0.5 * (m + s.b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = simpson(s.a, m, s.fa, flm, s.fm);
        let right = simpson(m, s.b, s.fm, frm, s.fb);
        let delta = left + right - s.whole;
        if delta.abs() <= 15.0 * s.tol || (m - s.a) <= f64::EPSILON * m.abs() {
            total += left + right + delta / 15.0;
            continue;
        }
        subdivisions += 1;
        if subdivisions > MAX_SUBDIVISIONS {
            return Err(Error::QuadratureFailure { a, b, subdivisions: MAX_SUBDIVISIONS });
        }
        stack.push(Segment { a: s.a, b: m, fa: s.fa, fm: flm, fb: s.fm, whole: left, tol: s.tol / 2.0 });
        stack.push(Segment { a: m, b: s.b, fa: s.fm, fm: frm, fb: s.fb, whole: right, tol: s.tol / 2.0 });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::{catalog, Interval};
    use crate::operators::{laplacian, radial_laplacian, warped_radial_laplacian};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    fn xy(x: f64, y: f64, names: (&str, &str)) -> Assignment {
        [(names.0.to_string(), x), (names.1.to_string(), y)].into_iter().collect()
    }

    fn cart(src: &str) -> impl Fn(&Assignment) -> Result<f64> {
        let e = parse(src).unwrap();
        move |a: &Assignment| evaluate(&e, a).map_err(singular)
    }

    #[test]
    fn cartesian_examples() {
        let cfg = FdConfig::default();
        let r2 = Geometry::SemiEuclidean { p: 2, q: 0 };
        let v = fd_cartesian_laplacian(&cart("x1^2 + x2^2"), &r2, &xy(1.0, 2.0, ("x1", "x2")), &cfg).unwrap();
        assert!((v - 4.0).abs() < 1e-7);
        let r11 = Geometry::SemiEuclidean { p: 1, q: 1 };
        for (x, y) in [(0.3, -1.2), (1.5, 0.7)] {
            let v = fd_cartesian_laplacian(&cart("-(x1^2 + y1^2)"), &r11, &xy(x, y, ("x1", "y1")), &cfg).unwrap();
            assert!(v.abs() < 1e-7);
        }
        let v = fd_cartesian_laplacian(&cart("x1/(x1^2+x2^2)"), &r2, &xy(1.0, 1.0, ("x1", "x2")), &cfg).unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn singular_stencil() {
        let r2 = Geometry::SemiEuclidean { p: 2, q: 0 };
        let err = fd_cartesian_laplacian(&cart("1/x1"), &r2, &xy(0.0, 1.0, ("x1", "x2")), &FdConfig::default());
        assert!(matches!(err, Err(Error::StencilSingular(_))));
    }

    #[test]
    fn radial_examples() {
        let cfg = FdConfig::default();
        let h2 = Geometry::model(parse("sinh(r)").unwrap(), 2, Interval::positive_axis()).unwrap();
        let sq = |r: f64| Ok(r * r);
        let v = fd_radial_laplacian(&sq, &h2, 1.0, None, &cfg).unwrap();
        assert!((v - (2.0 + 2.0 / 1f64.tanh())).abs() < 1e-5);
        assert!((v - 4.626065).abs() < 1e-5);
        let join = catalog("spherical-join", &[3, 3]).unwrap();
        let v = fd_radial_laplacian(&|r| Ok(r), &join, FRAC_PI_8, None, &cfg).unwrap();
        assert!((v - 4.0).abs() < 1e-5);
        let v = fd_radial_laplacian(&|_| Ok(3.0), &join, 0.5, None, &cfg).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(matches!(
            fd_radial_laplacian(&|r| Ok(r), &join, FRAC_PI_2 - 1e-3, None, &cfg),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn richardson_order() {
        // Halving h at two levels should cut the error by about 16.
        let g = catalog("hyperbolic", &[3]).unwrap();
        let f = |r: f64| Ok((2.0 * r).sin() * r.exp());
        let exact = |r: f64| {
            let (s, c, e) = ((2.0 * r).sin(), (2.0 * r).cos(), r.exp());
            let d1 = e * (s + 2.0 * c);
            let d2 = e * (-3.0 * s + 4.0 * c);
            d2 + 2.0 / r.tanh() * d1
        };
        let r = 0.9;
        let coarse = FdConfig { h: 0.08, levels: 2, tol: 1e-6 };
        let fine = FdConfig { h: 0.04, ..coarse };
        let e1 = (fd_radial_laplacian(&f, &g, r, None, &coarse).unwrap() - exact(r)).abs();
        let e2 = (fd_radial_laplacian(&f, &g, r, None, &fine).unwrap() - exact(r)).abs();
        assert!(e1 / e2 >= 8.0, "{e1} / {e2}");
    }

    #[test]
    fn config_validation() {
        assert!(FdConfig { h: 0.0, ..FdConfig::default() }.validate().is_err());
        assert!(FdConfig { levels: 4, ..FdConfig::default() }.validate().is_err());
        assert!(FdConfig { levels: 0, ..FdConfig::default() }.validate().is_err());
        assert!(FdConfig::default().validate().is_ok());
    }

    #[test]
    fn cross_checks() {
        let cfg = FdConfig::default();
        let e3 = catalog("euclidean", &[3]).unwrap();
        let f: FunctionValue = parse("r^2").unwrap().into();
        let sym = radial_laplacian(f.expr(), &e3).unwrap();
        let pts: Vec<Assignment> = [0.5, 1.0, 2.0].into_iter().map(at).collect();
        assert!(cross_check_laplacian(&f, &sym, &e3, &pts, &cfg).unwrap().passed);

        let join = catalog("spherical-join", &[3, 3]).unwrap();
        let r: FunctionValue = parse("r").unwrap().into();
        let sym = warped_radial_laplacian(r.expr(), &join).unwrap();
        let pts: Vec<Assignment> = (0..5).map(|i| at(0.1 + 0.3 * i as f64)).collect();
        assert!(cross_check_laplacian(&r, &sym, &join, &pts, &cfg).unwrap().passed);

        let wrong = parse("7").unwrap();
        let pts: Vec<Assignment> = [0.5, 1.0, 2.0].into_iter().map(at).collect();
        let report = cross_check_laplacian(&f, &wrong, &e3, &pts, &cfg).unwrap();
        assert!(!report.passed);
        assert!((report.max_discrepancy - 1.0 / 6.0).abs() < 1e-6);
        assert!(cross_check_laplacian(&f, &wrong, &e3, &pts[..2], &cfg).is_err());
    }

    #[test]
    fn noise_allowance() {
        let cfg = FdConfig::default();
        let e3 = catalog("euclidean", &[3]).unwrap();
        let exact: FunctionValue = parse("2").unwrap().into();
        let pts: Vec<Assignment> = [0.5, 1.0, 2.0].into_iter().map(at).collect();
        for p in &pts {
            assert_eq!(fd_noise(&exact, &e3, p, &cfg).unwrap(), 0.0);
        }
        // constant, but only after heavy cancellation
        let noisy: FunctionValue = parse("(r + 10)^2 - r^2 - 20*r - 98").unwrap().into();
        let zero = parse("0").unwrap();
        let report = cross_check_laplacian(&noisy, &zero, &e3, &pts, &cfg).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.samples.iter().all(|s| s.noise > 0.0 && s.noise < 1e-3), "{report:?}");
        let wrong = parse("1/1000").unwrap();
        assert!(!cross_check_laplacian(&noisy, &wrong, &e3, &pts, &cfg).unwrap().passed);
    }

    #[test]
    fn cartesian_cross_check_on_interior_points() {
        let g = Geometry::SemiEuclidean { p: 2, q: 1 };
        let f: FunctionValue = parse("x1^3*y1 - x2^2*y1^2 + sin(x1*x2)").unwrap().into();
        let sym = laplacian(&f, &g).unwrap();
        let report = cross_check_laplacian(&f, &sym, &g, &interior_points(&g, 5), &FdConfig::default()).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn quadrature_examples() {
        let v = quadrature(&|r| Ok(1.0 / (r * r)), 1.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let v = quadrature(&|r| Ok(4.0 / (2.0 * r).sin().powi(2)), FRAC_PI_8, FRAC_PI_4, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert_eq!(quadrature(&|_| Ok(0.0), 0.0, 1.0, 1e-12).unwrap(), 0.0);
        let v = quadrature(&|r| Ok(r), 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn quadrature_failure() {
        let err = quadrature(&|r: f64| Ok((1.0 / r).sin() / r), 1e-9, 1.0, 1e-14);
        assert!(matches!(err, Err(Error::QuadratureFailure { .. })));
    }
}
