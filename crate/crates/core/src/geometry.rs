//! The three metric families: rotationally symmetric models, doubly warped
//! products over a radial interval, and flat semi-Euclidean space.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, differentiate, evaluate, parse, simplify, Assignment, Expr, ZeroTestConfig};

/// Name of the radial coordinate.
pub const RADIAL: &str = "r";

/// Margin kept from the ends of a radial domain when sampling.
pub const SAMPLE_MARGIN: f64 = 0.05;

/// Open interval `(lo, hi)`; `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if lo.is_nan() || hi.is_nan() || hi <= lo || lo.is_infinite() {
            return Err(Error::InvalidArgument(format!("bad interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn positive_axis() -> Interval {
        Interval { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }

    /// Midpoint, or `lo + 1` on an unbounded interval.
    pub fn anchor(&self) -> f64 {
        if self.is_bounded() {
            0.5 * (self.lo + self.hi)
        } else {
            self.lo + 1.0
        }
    }

    /// Compact sampling window inside the interval.
    pub fn sampling_window(&self) -> (f64, f64) {
        let lo = self.lo + SAMPLE_MARGIN;
        let hi = if self.is_bounded() { self.hi - SAMPLE_MARGIN } else { self.lo + 3.0 };
        (lo, hi.max(lo + f64::EPSILON))
    }

    /// `n` evenly spaced interior points of the sampling window.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.sampling_window();
        (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bounded() {
            write!(f, "({}, {})", self.lo, self.hi)
        } else {
            write!(f, "({}, inf)", self.lo)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Geometry {
    /// `f(r)^2 g_sphere + dr^2` in dimension `m`.
    Model { f: Expr, m: u32, domain: Interval },
    /// `f1(r)^2 g_{S^{p-1}} + dr^2 + f2(r)^2 g_{S^{q-1}}`.
    Warped { f1: Expr, f2: Expr, p: u32, q: u32, domain: Interval },
    /// `R^{p,q}` with signature `(+p, -q)`.
    #[serde(rename = "semieuclidean")]
    SemiEuclidean { p: u32, q: u32 },
}

impl Geometry {
    pub fn model(f: Expr, m: u32, domain: Interval) -> Result<Geometry> {
        if m < 2 {
            return Err(Error::Dimension(format!("model dimension m = {m} must be at least 2")));
        }
        radial_only(&f)?;
        let g = Geometry::Model { f: simplify(&f), m, domain };
        g.check_positive()?;
        Ok(g)
    }

    pub fn warped(f1: Expr, f2: Expr, p: u32, q: u32, domain: Interval) -> Result<Geometry> {
        if p < 2 || q < 2 {
            return Err(Error::Dimension(format!("warped product needs p, q >= 2, got ({p}, {q})")));
        }
        radial_only(&f1)?;
        radial_only(&f2)?;
        let g = Geometry::Warped { f1: simplify(&f1), f2: simplify(&f2), p, q, domain };
        g.check_positive()?;
        Ok(g)
    }

    pub fn semi_euclidean(p: u32, q: u32) -> Result<Geometry> {
        if p < 1 {
            return Err(Error::Dimension("semi-Euclidean space needs p >= 1".into()));
        }
        Ok(Geometry::SemiEuclidean { p, q })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Model { .. } => "model",
            Geometry::Warped { .. } => "warped",
            Geometry::SemiEuclidean { .. } => "semieuclidean",
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Geometry::SemiEuclidean { .. })
    }

    pub fn domain(&self) -> Option<Interval> {
        match self {
            Geometry::Model { domain, .. } | Geometry::Warped { domain, .. } => Some(*domain),
            Geometry::SemiEuclidean { .. } => None,
        }
    }

    /// Coordinate names: `r` for radial geometries, `x1..xp, y1..yq` otherwise.
    pub fn coordinates(&self) -> Vec<String> {
        match self {
            Geometry::SemiEuclidean { p, q } => (1..=*p)
                .map(|i| format!("x{i}"))
                .chain((1..=*q).map(|j| format!("y{j}")))
                .collect(),
            _ => vec![RADIAL.to_string()],
        }
    }

    /// Coefficient `a(r)` of `F'` in the radial Laplacian `F'' + a F'`.
    pub fn radial_coefficient(&self) -> Option<Expr> {
        let log_deriv = |f: &Expr, k: u32| Expr::int(k as i64 - 1) * differentiate(f, RADIAL) / f.clone();
        match self {
            Geometry::Model { f, m, .. } => Some(simplify(&log_deriv(f, *m))),
            Geometry::Warped { f1, f2, p, q, .. } => Some(simplify(&(log_deriv(f1, *p) + log_deriv(f2, *q)))),
            Geometry::SemiEuclidean { .. } => None,
        }
    }

    /// Volume weight `w` with `Delta F = w^-1 (w F')'` for radial `F`.
    pub fn radial_weight(&self) -> Option<Expr> {
        match self {
            Geometry::Model { f, m, .. } => Some(simplify(&f.clone().powi(*m as i64 - 1))),
            Geometry::Warped { f1, f2, p, q, .. } => {
                Some(simplify(&(f1.clone().powi(*p as i64 - 1) * f2.clone().powi(*q as i64 - 1))))
            }
            Geometry::SemiEuclidean { .. } => None,
        }
    }

    /// Zero-test configuration whose radial window lies inside this
    /// geometry's domain. Regions already present in `base` are kept.
    pub fn zero_config(&self, base: &ZeroTestConfig) -> ZeroTestConfig {
        let mut cfg = base.clone();
        if let Some(d) = self.domain() {
            if !cfg.regions.contains_key(RADIAL) {
                let (lo, hi) = d.sampling_window();
                cfg.regions.insert(RADIAL.into(), expr::SampleRegion::interval(lo, hi));
            }
        }
        cfg
    }

    fn warpings(&self) -> Vec<(&'static str, &Expr)> {
        match self {
            Geometry::Model { f, .. } => vec![("f", f)],
            Geometry::Warped { f1, f2, .. } => vec![("f1", f1), ("f2", f2)],
            Geometry::SemiEuclidean { .. } => vec![],
        }
    }

    /// Smallest warping value over 64 interior grid points.
    pub fn min_warping(&self) -> Option<f64> {
        let d = self.domain()?;
        let mut min = f64::INFINITY;
        for (_, w) in self.warpings() {
            for r in d.grid(64) {
                match evaluate(w, &at(r)) {
                    Ok(v) => min = min.min(v),
                    Err(_) => return Some(f64::NAN),
                }
            }
        }
        Some(min)
    }

    fn check_positive(&self) -> Result<()> {
        let d = self.domain().expect("radial geometry");
        for (name, w) in self.warpings() {
            for r in d.grid(64) {
                match evaluate(w, &at(r)) {
                    Ok(v) if v > 0.0 => {}
                    Ok(v) => {
                        return Err(Error::NonPositiveWarping(format!("{name}({r}) = {v}")));
                    }
                    Err(e) => return Err(Error::NonPositiveWarping(format!("{name}({r}): {e}"))),
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geometry::Model { f: w, m, domain } => write!(f, "model(f = {w}, m = {m}, r in {domain})"),
            Geometry::Warped { f1, f2, p, q, domain } => {
                write!(f, "warped(f1 = {f1}, f2 = {f2}, p = {p}, q = {q}, r in {domain})")
            }
            Geometry::SemiEuclidean { p, q } => write!(f, "semi-euclidean({p},{q})"),
        }
    }
}

/// Short coordinate names accepted on low-dimensional semi-Euclidean
/// spaces: `x, y, z` for `x1, x2, x3` when `q = 0`, and `x, y` for `x1, y1`
/// on `R^{1,1}`.
pub fn coordinate_aliases(g: &Geometry) -> Vec<(&'static str, String)> {
    match g {
        Geometry::SemiEuclidean { p, q: 0 } if *p <= 3 => {
            ["x", "y", "z"].into_iter().take(*p as usize).zip(g.coordinates()).collect()
        }
        Geometry::SemiEuclidean { p: 1, q: 1 } => vec![("x", "x1".into()), ("y", "y1".into())],
        _ => Vec::new(),
    }
}

/// Rewrites short coordinate names to the canonical ones. Returns whether
/// any alias was used.
pub fn resolve_aliases(f: &Expr, g: &Geometry) -> (Expr, bool) {
    let aliases = coordinate_aliases(g);
    let vars = f.free_vars();
    let coords = g.coordinates();
    let used = aliases.iter().any(|(a, _)| vars.contains(*a)) && !vars.iter().any(|v| coords.contains(v));
    if !used {
        return (f.clone(), false);
    }
    let map = |v: &str| aliases.iter().find(|(a, _)| *a == v).map(|(_, c)| c.clone());
    (simplify(&f.rename_vars(&map)), true)
}

/// Inverse of [`resolve_aliases`].
pub fn restore_aliases(e: &Expr, g: &Geometry) -> Expr {
    let aliases = coordinate_aliases(g);
    e.rename_vars(&|v: &str| aliases.iter().find(|(_, c)| c == v).map(|(a, _)| a.to_string()))
}

fn at(r: f64) -> Assignment {
    let mut a = Assignment::new();
    a.insert(RADIAL.into(), r);
    a
}

fn radial_only(f: &Expr) -> Result<()> {
    match f.free_vars().into_iter().find(|v| v != RADIAL) {
        Some(var) => Err(Error::ForeignVariable { var, allowed: RADIAL.into() }),
        None => Ok(()),
    }
}

fn need(dims: &[u32], n: usize, name: &str) -> Result<()> {
    if dims.len() == n {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{name} takes {n} dimension(s), got {}", dims.len())))
    }
}

/// Named geometries.
pub fn catalog(name: &str, dims: &[u32]) -> Result<Geometry> {
    let r = Expr::var(RADIAL);
    let axis = Interval::positive_axis();
    match name {
        "euclidean" | "hyperbolic" | "sphere" => {
            need(dims, 1, name)?;
            let (f, domain) = match name {
                "euclidean" => (r, axis),
                "hyperbolic" => (r.sinh(), axis),
                _ => (r.sin(), Interval { lo: 0.0, hi: PI }),
            };
            Geometry::model(f, dims[0], domain)
        }
        "spherical-join" | "hyperbolic-join" | "cylinder" => {
            need(dims, 2, name)?;
            let (f1, f2, domain) = match name {
                "spherical-join" => (r.clone().sin(), r.cos(), Interval { lo: 0.0, hi: FRAC_PI_2 }),
                "hyperbolic-join" => (r.clone().sinh(), r.cosh(), axis),
                _ => (r, Expr::one(), axis),
            };
            Geometry::warped(f1, f2, dims[0], dims[1], domain)
        }
        "semi-euclidean" | "semieuclidean" => {
            need(dims, 2, name)?;
            Geometry::semi_euclidean(dims[0], dims[1])
        }
        _ => Err(Error::UnknownGeometry(name.into())),
    }
}

/// Parses `name(d1, d2, ...)`, e.g. `spherical-join(3,3)`.
pub fn parse_catalog(text: &str) -> Result<Geometry> {
    let text = text.trim();
    let (name, rest) = text
        .split_once('(')
        .ok_or_else(|| Error::UnknownGeometry(format!("{text} (expected name(dims))")))?;
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| Error::UnknownGeometry(format!("{text} (missing `)`)")))?;
    let dims = inner
        .split(',')
        .map(|d| d.trim().parse::<u32>().map_err(|_| Error::Dimension(format!("`{}` is not a dimension", d.trim()))))
        .collect::<Result<Vec<_>>>()?;
    catalog(name.trim(), &dims)
}

/// Parses a key/value geometry description:
///
/// ```text
/// type = warped
/// f1 = sin(r)
/// f2 = cos(r)
/// p = 3
/// q = 3
/// domain = [0, pi/2]
/// ```
///
/// Blank lines and `#` comments are ignored.
pub fn parse_spec(text: &str) -> Result<Geometry> {
    let mut fields: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Spec {
            line: line_no,
            key: line.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let key = k.trim().to_string();
        if !["type", "f", "m", "f1", "f2", "p", "q", "domain"].contains(&key.as_str()) {
            return Err(Error::Spec { line: line_no, key, message: "unknown key".into() });
        }
        if fields.iter().any(|(k2, _, _)| *k2 == key) {
            return Err(Error::Spec { line: line_no, key, message: "duplicate key".into() });
        }
        fields.push((key, v.trim().to_string(), line_no));
    }
    let get = |key: &str| fields.iter().find(|(k, _, _)| k == key).map(|(_, v, l)| (v.as_str(), *l));
    let require = |key: &str| {
        get(key).ok_or_else(|| Error::Spec { line: 0, key: key.into(), message: "missing".into() })
    };
    let spec_err = |key: &str, line: usize, message: String| Error::Spec { line, key: key.into(), message };
    let expr_of = |key: &str| -> Result<Expr> {
        let (v, l) = require(key)?;
        parse(v).map_err(|e| spec_err(key, l, e.to_string()))
    };
    let int_of = |key: &str| -> Result<u32> {
        let (v, l) = require(key)?;
        v.parse::<u32>().map_err(|_| spec_err(key, l, format!("`{v}` is not a non-negative integer")))
    };
    let domain = match get("domain") {
        Some((v, l)) => parse_domain(v).map_err(|m| spec_err("domain", l, m))?,
        None => Interval::positive_axis(),
    };
    let (kind, kind_line) = require("type")?;
    let wrap = |key: &str, line: usize, e: Error| match e {
        Error::Spec { .. } => e,
        other => spec_err(key, line, other.to_string()),
    };
    match kind {
        "model" => {
            let f = expr_of("f")?;
            let m = int_of("m")?;
            Geometry::model(f, m, domain).map_err(|e| wrap("f", require("f").map(|x| x.1).unwrap_or(0), e))
        }
        "warped" => {
            let (f1, f2) = (expr_of("f1")?, expr_of("f2")?);
            let (p, q) = (int_of("p")?, int_of("q")?);
            Geometry::warped(f1, f2, p, q, domain).map_err(|e| wrap("type", kind_line, e))
        }
        "semieuclidean" | "semi-euclidean" => {
            Geometry::semi_euclidean(int_of("p")?, int_of("q")?).map_err(|e| wrap("p", kind_line, e))
        }
        other => Err(spec_err("type", kind_line, format!("unknown type `{other}`"))),
    }
}

fn parse_domain(v: &str) -> std::result::Result<Interval, String> {
    let inner = v
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or("expected `[a, b]`")?;
    let (a, b) = inner.split_once(',').ok_or("expected `[a, b]`")?;
    let bound = |s: &str| -> std::result::Result<f64, String> {
        match s.trim() {
            "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
            t => {
                let e = parse(t).map_err(|e| e.to_string())?;
                evaluate(&e, &Assignment::new()).map_err(|e| e.to_string())
            }
        }
    };
    Interval::new(bound(a)?, bound(b)?).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub condition: String,
    pub required: f64,
    pub measured: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    fn push_near(&mut self, condition: String, required: f64, measured: f64) {
        let passed = (measured - required).abs() <= VALIDATION_TOL;
        self.entries.push(ValidationEntry { condition, required, measured, passed });
    }
}

/// Pass threshold for boundary conditions.
pub const VALIDATION_TOL: f64 = 1e-6;

const LIMIT_STEP: f64 = 1e-4;

/// Value of `e` at `r = x`, or its one-sided limit from the side `dir` when
/// `e` is singular there: `2 g(x + dir h/2) - g(x + dir h)` with `h = 1e-4`.
fn value_or_limit(e: &Expr, x: f64, dir: f64) -> f64 {
    if let Ok(v) = evaluate(e, &at(x)) {
        return v;
    }
    let g = |t: f64| evaluate(e, &at(t)).unwrap_or(f64::NAN);
    2.0 * g(x + dir * LIMIT_STEP / 2.0) - g(x + dir * LIMIT_STEP)
}

fn nth_derivative(e: &Expr, n: usize) -> Expr {
    (0..n).fold(e.clone(), |acc, _| differentiate(&acc, RADIAL))
}

/// Checks the pole conditions `f(0) = 0`, `f'(0) = 1`, `f > 0` and
/// `f^(2k)(0) = 0` for `k = 1, 2, 3`. On a bounded domain `(0, b)` the
/// mirrored conditions `f(b) = 0`, `f'(b) = -1` are checked too.
pub fn validate_model(g: &Geometry) -> Result<ValidationReport> {
    let Geometry::Model { f, domain, .. } = g else {
        return Err(Error::WrongGeometry { expected: "model", found: g.kind().into() });
    };
    let mut report = ValidationReport::default();
    let a = domain.lo;
    let derivs: Vec<Expr> = (0..=6).map(|n| nth_derivative(f, n)).collect();
    report.push_near("f(0)=0".into(), 0.0, value_or_limit(&derivs[0], a, 1.0));
    report.push_near("f'(0)=1".into(), 1.0, value_or_limit(&derivs[1], a, 1.0));
    let min = g.min_warping().unwrap_or(f64::NAN);
    report.entries.push(ValidationEntry {
        condition: "f>0".into(),
        required: 0.0,
        measured: min,
        passed: min > 0.0,
    });
    for k in 1..=3 {
        report.push_near(format!("f^({})(0)=0", 2 * k), 0.0, value_or_limit(&derivs[2 * k], a, 1.0));
    }
    if domain.is_bounded() {
        let b = domain.hi;
        report.push_near("f(b)=0".into(), 0.0, value_or_limit(&derivs[0], b, -1.0));
        report.push_near("f'(b)=-1".into(), -1.0, value_or_limit(&derivs[1], b, -1.0));
    }
    Ok(report)
}

/// Boundary checks for any geometry: [`validate_model`] for models, warping
/// positivity on the domain for warped products, nothing for flat space.
pub fn validate(g: &Geometry) -> Result<ValidationReport> {
    match g {
        Geometry::Model { .. } => validate_model(g),
        Geometry::Warped { .. } => {
            let min = g.min_warping().unwrap_or(f64::NAN);
            Ok(ValidationReport {
                entries: vec![ValidationEntry { condition: "f1,f2>0".into(), required: 0.0, measured: min, passed: min > 0.0 }],
            })
        }
        Geometry::SemiEuclidean { .. } => Ok(ValidationReport::default()),
    }
}

/// Checks `H^(2k-1)(0) = 0` for orders 1, 3 and 5.
pub fn check_pole_smoothness(h: &Expr) -> ValidationReport {
    let mut report = ValidationReport::default();
    for order in [1, 3, 5] {
        let d = nth_derivative(h, order);
        report.push_near(format!("H^({order})(0)=0"), 0.0, value_or_limit(&d, 0.0, 1.0));
    }
    report
}

/// Radial curvature `K = -f''/f` from the Jacobi equation.
pub fn radial_curvature(g: &Geometry) -> Result<Expr> {
    let Geometry::Model { f, .. } = g else {
        return Err(Error::WrongGeometry { expected: "model", found: g.kind().into() });
    };
    Ok(simplify(&(-nth_derivative(f, 2) / f.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, ZeroVerdict};

    #[test]
    fn catalog_shapes() {
        let g = catalog("spherical-join", &[3, 3]).unwrap();
        match &g {
            Geometry::Warped { f1, f2, p: 3, q: 3, domain } => {
                assert_eq!(f1.to_string(), "sin(r)");
                assert_eq!(f2.to_string(), "cos(r)");
                assert_eq!(domain.hi, FRAC_PI_2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(catalog("euclidean", &[3]).unwrap(), Geometry::Model { m: 3, .. }));
        match catalog("cylinder", &[2, 3]).unwrap() {
            Geometry::Warped { f1, f2, p: 2, q: 3, domain } => {
                assert_eq!((f1.to_string(), f2.to_string()), ("r".into(), "1".into()));
                assert!(!domain.is_bounded());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_catalog("semi-euclidean(2, 1)").unwrap(), Geometry::SemiEuclidean { p: 2, q: 1 });
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(catalog("torus", &[2]), Err(Error::UnknownGeometry(_))));
        assert!(matches!(catalog("euclidean", &[1]), Err(Error::Dimension(_))));
        assert!(matches!(catalog("spherical-join", &[1, 3]), Err(Error::Dimension(_))));
        assert!(matches!(catalog("semi-euclidean", &[0, 2]), Err(Error::Dimension(_))));
        assert!(matches!(parse_catalog("sphere(x)"), Err(Error::Dimension(_))));
    }

    #[test]
    fn catalog_models_validate() {
        for name in ["euclidean", "hyperbolic", "sphere"] {
            let report = validate_model(&catalog(name, &[3]).unwrap()).unwrap();
            assert!(report.passed(), "{name}: {report:?}");
        }
        assert_eq!(validate_model(&catalog("sphere", &[3]).unwrap()).unwrap().entries.len(), 8);
    }

    #[test]
    fn square_warping_fails_first_derivative() {
        let g = Geometry::model(parse("r^2").unwrap(), 3, Interval::positive_axis()).unwrap();
        let report = validate_model(&g).unwrap();
        let failed: Vec<_> = report.failures().map(|e| e.condition.as_str()).collect();
        assert_eq!(failed, ["f'(0)=1", "f^(2)(0)=0"]);
        assert_eq!(report.entries[1].measured, 0.0);
    }

    #[test]
    fn singular_values_use_limits() {
        // tan(r)*cot(r) is undefined at 0 but tends to 1. High derivatives
        // of such forms cancel catastrophically near 0, so only low orders
        // are meaningful here.
        let g = Geometry::model(parse("r*tan(r)*cot(r)").unwrap(), 2, Interval::positive_axis()).unwrap();
        let report = validate_model(&g).unwrap();
        assert!(report.entries[..3].iter().all(|e| e.passed), "{report:?}");
        let report = check_pole_smoothness(&parse("r^2*tan(r)*cot(r)").unwrap());
        assert!(report.entries[0].passed, "{report:?}");
        assert!(report.entries[0].measured.abs() < 1e-6);
    }

    #[test]
    fn pole_smoothness() {
        assert!(check_pole_smoothness(&parse("r^2").unwrap()).passed());
        assert!(check_pole_smoothness(&parse("r^4 + 7").unwrap()).passed());
        let bad = check_pole_smoothness(&parse("r").unwrap());
        let failed: Vec<_> = bad.failures().map(|e| e.condition.as_str()).collect();
        assert_eq!(failed, ["H^(1)(0)=0"]);
    }

    #[test]
    fn curvatures() {
        let cfg = ZeroTestConfig::default();
        let k = radial_curvature(&catalog("euclidean", &[3]).unwrap()).unwrap();
        assert!(k.is_literal_zero());
        let k = radial_curvature(&catalog("sphere", &[3]).unwrap()).unwrap();
        assert_eq!(is_zero(&(k - Expr::one()), &cfg).unwrap(), ZeroVerdict::ProvenZero);
        let k = radial_curvature(&catalog("hyperbolic", &[3]).unwrap()).unwrap();
        assert!(is_zero(&(k + Expr::one()), &cfg).unwrap().is_zero());
    }

    #[test]
    fn positivity_is_enforced() {
        let err = Geometry::model(parse("cos(r)").unwrap(), 3, Interval { lo: 0.0, hi: PI }).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWarping(_)));
        for (name, dims) in [("spherical-join", vec![2, 5]), ("hyperbolic", vec![4]), ("cylinder", vec![3, 2])] {
            assert!(catalog(name, &dims).unwrap().min_warping().unwrap() > 0.0);
        }
    }

    #[test]
    fn spec_files() {
        let g = parse_spec("# join\ntype = warped\nf1 = sin(r)\nf2 = cos(r)\np = 3\nq = 3\ndomain = [0, pi/2]\n").unwrap();
        assert_eq!(g, catalog("spherical-join", &[3, 3]).unwrap());
        let g = parse_spec("type = model\nf = sinh(r)\nm = 4").unwrap();
        assert_eq!(g, catalog("hyperbolic", &[4]).unwrap());
        let g = parse_spec("type=semieuclidean\np=1\nq=1").unwrap();
        assert_eq!(g, Geometry::SemiEuclidean { p: 1, q: 1 });
    }

    #[test]
    fn spec_errors_name_key_and_line() {
        let err = parse_spec("type = model\nf = sin(\nm = 3").unwrap_err();
        assert!(matches!(err, Error::Spec { line: 2, ref key, .. } if key == "f"), "{err:?}");
        let err = parse_spec("type = model\nf = r\nm = three").unwrap_err();
        assert!(matches!(err, Error::Spec { line: 3, ref key, .. } if key == "m"));
        let err = parse_spec("type = model\nf = r\nm = 3\ncolor = red").unwrap_err();
        assert!(matches!(err, Error::Spec { line: 4, ref key, .. } if key == "color"));
        let err = parse_spec("type = model\nm = 3").unwrap_err();
        assert!(matches!(err, Error::Spec { ref key, .. } if key == "f"));
        let err = parse_spec("type = model\nf = r\nm = 3\ndomain = [1, 0]").unwrap_err();
        assert!(matches!(err, Error::Spec { line: 4, ref key, .. } if key == "domain"));
        let err = parse_spec("type = model\nf = -r\nm = 3").unwrap_err();
        assert!(matches!(err, Error::Spec { line: 2, ref key, .. } if key == "f"));
    }

    #[test]
    fn aliases() {
        let r2 = Geometry::SemiEuclidean { p: 2, q: 0 };
        let (f, used) = resolve_aliases(&parse("x/(x^2+y^2)").unwrap(), &r2);
        assert!(used);
        assert_eq!(f, simplify(&parse("x1/(x1^2+x2^2)").unwrap()));
        assert_eq!(restore_aliases(&f, &r2).to_string(), "x*(x^2 + y^2)^-1");
        let r11 = Geometry::SemiEuclidean { p: 1, q: 1 };
        assert_eq!(resolve_aliases(&parse("x*y").unwrap(), &r11).0, simplify(&parse("x1*y1").unwrap()));
        let r21 = Geometry::SemiEuclidean { p: 2, q: 1 };
        assert!(!resolve_aliases(&parse("x*y").unwrap(), &r21).1);
        assert!(!resolve_aliases(&parse("x1*y").unwrap(), &r2).1);
    }

    #[test]
    fn coordinates_and_weights() {
        let g = Geometry::SemiEuclidean { p: 2, q: 1 };
        assert_eq!(g.coordinates(), ["x1", "x2", "y1"]);
        let w = catalog("spherical-join", &[3, 2]).unwrap().radial_weight().unwrap();
        assert_eq!(w, simplify(&parse("sin(r)^2*cos(r)").unwrap()));
        assert_eq!(catalog("euclidean", &[3]).unwrap().radial_coefficient().unwrap(), simplify(&parse("2/r").unwrap()));
    }
}
