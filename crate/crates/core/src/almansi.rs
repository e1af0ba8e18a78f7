//! Almansi-type constructions: the quadratic function `H`, lifts `H^s F`,
//! the (proper) s-harmonic classifier, radial harmonics and the probes built
//! on them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{
    differentiate, evaluate, is_zero, is_zero_with, parse, rational_from_f64, simplify, Assignment, Expr, Rational,
    ZeroTestConfig, ZeroVerdict,
};
use crate::geometry::{Geometry, RADIAL};
use crate::operators::{self, euler_pairing, laplacian, FunctionValue, SeparatedFunction, NODE_CAP};
use crate::oracle::quadrature;

fn constant(x: f64) -> Result<Expr> {
    rational_from_f64(x)
        .map(Expr::constant)
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

/// `c1 (sum x_i^2 - sum y_j^2) + c2` on semi-Euclidean space, `c1 r^2 + c2`
/// on radial geometries.
pub fn build_h(g: &Geometry, c1: f64, c2: f64) -> Result<Expr> {
    if c1 == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let quadratic = match g {
        Geometry::SemiEuclidean { p, .. } => Expr::sum(
            g.coordinates()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let sq = Expr::var(v).powi(2);
                    if i < *p as usize {
                        sq
                    } else {
                        -sq
                    }
                })
                .collect(),
        ),
        _ => Expr::var(RADIAL).powi(2),
    };
    Ok(simplify(&(constant(c1)? * quadratic + constant(c2)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "s", rename_all = "kebab-case")]
pub enum Classification {
    /// `Delta^s F = 0` but not proper; only happens for `F = 0`.
    SHarmonic(usize),
    ProperSHarmonic(usize),
    NotHarmonicUpTo(usize),
}

impl Classification {
    /// The order `s` when `F` is s-harmonic for some `s <= s_max`.
    pub fn order(&self) -> Option<usize> {
        match self {
            Classification::SHarmonic(s) | Classification::ProperSHarmonic(s) => Some(*s),
            Classification::NotHarmonicUpTo(_) => None,
        }
    }

    pub fn is_proper(&self, s: usize) -> bool {
        *self == Classification::ProperSHarmonic(s)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::SHarmonic(s) => write!(f, "{s}-harmonic"),
            Classification::ProperSHarmonic(s) => write!(f, "proper {s}-harmonic"),
            Classification::NotHarmonicUpTo(s) => write!(f, "not {s}-harmonic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderResult {
    pub order: usize,
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicityReport {
    pub function: String,
    pub geometry: String,
    pub orders: Vec<OrderResult>,
    pub classification: Classification,
    pub config: ZeroTestConfig,
}

impl HarmonicityReport {
    pub fn verdict(&self, order: usize) -> Option<&ZeroVerdict> {
        self.orders.get(order).map(|o| &o.verdict)
    }
}

/// Computes `Delta^k F` for `k = 0, 1, ...` and stops at the first order
/// that vanishes, or after `s_max`.
pub fn classify(f: &FunctionValue, g: &Geometry, s_max: usize, cfg: &ZeroTestConfig) -> Result<HarmonicityReport> {
    if s_max < 1 {
        return Err(Error::InvalidArgument("s_max must be at least 1".into()));
    }
    if let FunctionValue::Expr(e) = f {
        operators::check_variables(e, g)?;
    }
    let cfg = g.zero_config(cfg);
    let mut current = f.map(simplify);
    let mut orders = Vec::new();
    let mut classification = Classification::NotHarmonicUpTo(s_max);
    for k in 0..=s_max {
        if k > 0 {
            let next = laplacian(&current, g)?;
            if next.size() > NODE_CAP {
                return Err(Error::ExpressionBlowup { order: k, size: next.size() });
            }
            current = current.map(|_| next);
        }
        let residual = current.expr().clone();
        let verdict = is_zero(&residual, &cfg)?;
        let vanished = verdict.is_zero();
        orders.push(OrderResult { order: k, residual, verdict });
        if vanished {
            classification = match k {
                0 => Classification::SHarmonic(1),
                _ => Classification::ProperSHarmonic(k),
            };
            break;
        }
    }
    Ok(HarmonicityReport {
        function: f.to_string(),
        geometry: g.to_string(),
        orders,
        classification,
        config: cfg,
    })
}

/// `H F`.
pub fn almansi_lift(f: &FunctionValue, g: &Geometry, c1: f64, c2: f64) -> Result<FunctionValue> {
    let h = build_h(g, c1, c2)?;
    if let FunctionValue::Expr(e) = f {
        operators::check_variables(e, g)?;
    }
    Ok(f.map(|e| simplify(&(h.clone() * e.clone()))))
}

/// `H^s F` on semi-Euclidean space.
pub fn almansi_tower(f: &Expr, g: &Geometry, s: usize, c1: f64, c2: f64) -> Result<Expr> {
    if !matches!(g, Geometry::SemiEuclidean { .. }) {
        return Err(Error::WrongGeometry { expected: "semieuclidean", found: g.kind().into() });
    }
    if s < 1 {
        return Err(Error::InvalidArgument("tower power s must be at least 1".into()));
    }
    operators::check_variables(f, g)?;
    let h = build_h(g, c1, c2)?;
    let tower = simplify(&(h.powi(s as i64) * f.clone()));
    if tower.size() > NODE_CAP {
        return Err(Error::ExpressionBlowup { order: 0, size: tower.size() });
    }
    Ok(tower)
}

/// A radial solution of `w F' = c` where `w` is the radial volume weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialHarmonic {
    Closed { function: Expr },
    Numeric(NumericHarmonic),
}

/// `F(r) = integral of c / w from the anchor to r`, evaluated by quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericHarmonic {
    pub derivative: Expr,
    pub anchor: f64,
}

/// Tolerance for the quadrature behind [`NumericHarmonic::value`].
pub const HARMONIC_QUADRATURE_TOL: f64 = 1e-12;

impl NumericHarmonic {
    pub fn value(&self, r: f64) -> Result<f64> {
        let d = &self.derivative;
        quadrature(&|t| Ok(evaluate(d, &at(t))?), self.anchor, r, HARMONIC_QUADRATURE_TOL)
    }
}

impl RadialHarmonic {
    /// `F'`, always symbolic.
    pub fn derivative(&self) -> Expr {
        match self {
            RadialHarmonic::Closed { function } => differentiate(function, RADIAL),
            RadialHarmonic::Numeric(n) => n.derivative.clone(),
        }
    }

    pub fn closed(&self) -> Option<&Expr> {
        match self {
            RadialHarmonic::Closed { function } => Some(function),
            RadialHarmonic::Numeric(_) => None,
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        match self {
            RadialHarmonic::Closed { function } => Ok(evaluate(function, &at(r))?),
            RadialHarmonic::Numeric(n) => n.value(r),
        }
    }
}

impl fmt::Display for RadialHarmonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialHarmonic::Closed { function } => write!(f, "{function}"),
            RadialHarmonic::Numeric(n) => write!(f, "integral of {} from {}", n.derivative, n.anchor),
        }
    }
}

fn at(r: f64) -> Assignment {
    [(RADIAL.to_string(), r)].into_iter().collect()
}

fn ratio(n: i64, d: i64) -> Expr {
    Expr::ratio(n, d)
}

/// `integral of csc(x)^n dx`.
fn csc_integral(n: u32, x: &Expr) -> Expr {
    match n {
        0 => x.clone(),
        1 => (x.clone() * ratio(1, 2)).tan().ln(),
        _ => {
            let k = n as i64;
            -(x.clone().csc().powi(k - 2) * x.clone().cot()) * ratio(1, k - 1)
                + ratio(k - 2, k - 1) * csc_integral(n - 2, x)
        }
    }
}

/// `integral of csch(x)^n dx`.
fn csch_integral(n: u32, x: &Expr) -> Expr {
    match n {
        0 => x.clone(),
        1 => (x.clone() * ratio(1, 2)).tanh().ln(),
        _ => {
            let k = n as i64;
            -(x.clone().sinh().powi(2 - k) * x.clone().coth()) * ratio(1, k - 1)
                - ratio(k - 2, k - 1) * csch_integral(n - 2, x)
        }
    }
}

/// `integral of r^-n dr`.
fn power_integral(n: u32) -> Expr {
    let r = Expr::var(RADIAL);
    if n == 1 {
        r.ln()
    } else {
        r.powi(1 - n as i64) * ratio(1, 1 - n as i64)
    }
}

fn is(e: &Expr, text: &str) -> bool {
    *e == simplify(&parse(text).expect("builtin form"))
}

/// Antiderivative of `1 / w` for the catalog geometries.
fn closed_form(g: &Geometry) -> Option<Expr> {
    let r = Expr::var(RADIAL);
    let two_r = Expr::int(2) * r.clone();
    match g {
        Geometry::Model { f, m, .. } => {
            let n = m - 1;
            if is(f, "r") {
                Some(power_integral(n))
            } else if is(f, "sin(r)") {
                Some(csc_integral(n, &r))
            } else if is(f, "sinh(r)") {
                Some(csch_integral(n, &r))
            } else {
                None
            }
        }
        Geometry::Warped { f1, f2, p, q, .. } => {
            if is(f1, "r") && is(f2, "1") {
                return Some(power_integral(p - 1));
            }
            if p != q {
                return None;
            }
            let n = p - 1;
            // (sin r cos r)^n = (sin(2r) / 2)^n
            let scale = Expr::constant(Rational::from_integer(BigInt::from(2)).pow(n as i32 - 1));
            if is(f1, "sin(r)") && is(f2, "cos(r)") {
                Some(scale * csc_integral(n, &two_r))
            } else if is(f1, "sinh(r)") && is(f2, "cosh(r)") {
                Some(scale * csch_integral(n, &two_r))
            } else {
                None
            }
        }
        Geometry::SemiEuclidean { .. } => None,
    }
}

/// A radial `F` with `w F' = c`, normalised to vanish at the domain's anchor
/// point (its midpoint, or `lo + 1` when unbounded).
pub fn radial_harmonic(g: &Geometry, c: f64) -> Result<RadialHarmonic> {
    let domain = g.domain().ok_or(Error::WrongGeometry { expected: "model or warped", found: g.kind().into() })?;
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument("flux constant c must be finite and nonzero".into()));
    }
    let anchor = domain.anchor();
    let cexpr = constant(c)?;
    match closed_form(g) {
        Some(primitive) => {
            let f = simplify(&(cexpr * primitive));
            let offset = evaluate(&f, &at(anchor))?;
            let function = if offset.abs() < 1e-12 { f } else { simplify(&(f - constant(offset)?)) };
            Ok(RadialHarmonic::Closed { function })
        }
        None => {
            let w = g.radial_weight().unwrap();
            Ok(RadialHarmonic::Numeric(NumericHarmonic { derivative: simplify(&(cexpr / w)), anchor }))
        }
    }
}

/// Placeholder variable standing for a numerically known radial harmonic.
pub const HARMONIC_SYMBOL: &str = "F_harmonic";

/// `Delta^s (G)` where `G` may contain [`HARMONIC_SYMBOL`] standing for a
/// radial harmonic with derivative `fprime`.
fn radial_iterate_with_symbol(g: &Geometry, e: &Expr, fprime: &Expr, s: usize) -> Result<Expr> {
    let a = g.radial_coefficient().unwrap();
    let d = |x: &Expr| {
        simplify(&(differentiate(x, RADIAL) + differentiate(x, HARMONIC_SYMBOL) * fprime.clone()))
    };
    let mut cur = simplify(e);
    for order in 1..=s {
        cur = operators::radial_with(&cur, &a, &d);
        if cur.size() > NODE_CAP {
            return Err(Error::ExpressionBlowup { order, size: cur.size() });
        }
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeEntry {
    pub label: String,
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeFailure {
    pub label: String,
    pub witness: Assignment,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub note: &'static str,
    pub geometry: String,
    pub h: Expr,
    pub h_laplacian: ZeroVerdict,
    pub h_bilaplacian: ZeroVerdict,
    pub h_proper_biharmonic: bool,
    pub entries: Vec<ProbeEntry>,
    pub passed: bool,
    pub first_failure: Option<ProbeFailure>,
}

/// Header attached to every weak-Almansi probe report.
pub const WEAK_PROBE_NOTE: &str = "finitely many radial harmonics are tested; \
the weak Almansi property quantifies over every locally defined harmonic function";

/// Tests whether `H F` is biharmonic for the radial harmonics `F_c`,
/// `c in {1, -1, 2}`, and `F = 1`, and whether `H` is proper biharmonic.
pub fn weak_almansi_probe(g: &Geometry, h: &Expr, cfg: &ZeroTestConfig) -> Result<ProbeReport> {
    if !matches!(g, Geometry::Model { .. }) {
        return Err(Error::WrongGeometry { expected: "model", found: g.kind().into() });
    }
    operators::check_variables(h, g)?;
    let cfg = g.zero_config(cfg);
    let hv: FunctionValue = h.clone().into();
    let seq = operators::laplacian_sequence(&hv, g, 2)?;
    let h_laplacian = is_zero(&seq[1], &cfg)?;
    let h_bilaplacian = is_zero(&seq[2], &cfg)?;
    let h_proper_biharmonic = !h_laplacian.is_zero() && h_bilaplacian.is_zero();

    let mut entries = Vec::new();
    let mut first_failure = None;
    let mut record = |label: String, residual: Expr, verdict: ZeroVerdict, first: &mut Option<ProbeFailure>| {
        if let (None, ZeroVerdict::NonZero { witness, value }) = (&*first, &verdict) {
            *first = Some(ProbeFailure { label: label.clone(), witness: witness.clone(), value: *value });
        }
        entries.push(ProbeEntry { label, residual, verdict });
    };
    if let ZeroVerdict::NonZero { .. } = h_bilaplacian {
        record("Delta^2 H".into(), seq[2].clone(), h_bilaplacian.clone(), &mut first_failure);
    }
    for c in [1.0, -1.0, 2.0] {
        let label = format!("H * F_c, c = {c}");
        match radial_harmonic(g, c)? {
            RadialHarmonic::Closed { function } => {
                let lift: FunctionValue = simplify(&(h.clone() * function)).into();
                let residual = operators::iterated_laplacian(&lift, g, 2)?;
                let verdict = is_zero(&residual, &cfg)?;
                record(label, residual, verdict, &mut first_failure);
            }
            RadialHarmonic::Numeric(n) => {
                let lift = h.clone() * Expr::var(HARMONIC_SYMBOL);
                let residual = radial_iterate_with_symbol(g, &lift, &n.derivative, 2)?;
                let extend = |a: &mut Assignment| {
                    let r = a[RADIAL];
                    let v = n.value(r).map_err(|e| crate::expr::ExprError::Domain(e.to_string()))?;
                    a.insert(HARMONIC_SYMBOL.into(), v);
                    Ok(())
                };
                let verdict = is_zero_with(&residual, &cfg, &extend)?;
                record(label, residual, verdict, &mut first_failure);
            }
        }
    }
    record("H * 1".into(), seq[2].clone(), h_bilaplacian.clone(), &mut first_failure);
    let passed = h_proper_biharmonic && entries.iter().all(|e| e.verdict.is_zero());
    Ok(ProbeReport {
        note: WEAK_PROBE_NOTE,
        geometry: g.to_string(),
        h: h.clone(),
        h_laplacian,
        h_bilaplacian,
        h_proper_biharmonic,
        entries,
        passed,
        first_failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureEntry {
    pub k: usize,
    /// Verdict on `Delta^k (r^k F)`; expected nonzero.
    pub lower: Option<ZeroVerdict>,
    /// Verdict on `Delta^{k+1} (r^k F)`; expected zero.
    pub upper: Option<ZeroVerdict>,
    pub consistent: bool,
    pub error: Option<String>,
}

/// Largest `k` accepted by [`conjecture_probe`].
pub const CONJECTURE_K_MAX: usize = 4;

/// Evidence for the conjecture that `r^k F` is proper (k+1)-harmonic on the
/// spherical join of two 2-spheres, for `F` the radial harmonic with `c = 1`.
/// Blowups are recorded per entry instead of aborting.
pub fn conjecture_probe(k_max: usize, cfg: &ZeroTestConfig) -> Result<Vec<ConjectureEntry>> {
    if !(1..=CONJECTURE_K_MAX).contains(&k_max) {
        return Err(Error::PreconditionViolated(format!("k_max = {k_max} must lie in 1..={CONJECTURE_K_MAX}")));
    }
    let g = crate::geometry::catalog("spherical-join", &[3, 3])?;
    let cfg = g.zero_config(cfg);
    let f = radial_harmonic(&g, 1.0)?.closed().cloned().expect("closed form on the join");
    let mut out = Vec::new();
    for k in 1..=k_max {
        let lifted: FunctionValue = simplify(&(Expr::var(RADIAL).powi(k as i64) * f.clone())).into();
        let entry = match operators::laplacian_sequence(&lifted, &g, k + 1) {
            Ok(seq) => {
                let lower = is_zero(&seq[k], &cfg)?;
                let upper = is_zero(&seq[k + 1], &cfg)?;
                let consistent = !lower.is_zero() && upper.is_zero();
                ConjectureEntry { k, lower: Some(lower), upper: Some(upper), consistent, error: None }
            }
            Err(e @ Error::ExpressionBlowup { .. }) => {
                ConjectureEntry { k, lower: None, upper: None, consistent: false, error: Some(e.to_string()) }
            }
            Err(e) => return Err(e),
        };
        out.push(entry);
    }
    Ok(out)
}

fn require_s_harmonic(f: &Expr, g: &Geometry, s: usize, cfg: &ZeroTestConfig) -> Result<()> {
    let report = classify(&f.clone().into(), g, s.max(1), cfg)?;
    match report.classification.order() {
        Some(k) if k <= s => Ok(()),
        _ => Err(Error::PreconditionViolated(format!("{f} is not {s}-harmonic ({})", report.classification))),
    }
}

/// Verdict on `Delta^s (H Delta F)` for an s-harmonic `F`, with
/// `H = sum x^2 - sum y^2`.
pub fn lemma43_check(f: &Expr, g: &Geometry, s: usize, cfg: &ZeroTestConfig) -> Result<ZeroVerdict> {
    if !matches!(g, Geometry::SemiEuclidean { .. }) {
        return Err(Error::WrongGeometry { expected: "semieuclidean", found: g.kind().into() });
    }
    require_s_harmonic(f, g, s, cfg)?;
    let h = build_h(g, 1.0, 0.0)?;
    let lap = operators::cartesian_laplacian(f, g)?;
    let target: FunctionValue = simplify(&(h * lap)).into();
    Ok(is_zero(&operators::iterated_laplacian(&target, g, s)?, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropernessReport {
    pub c1: f64,
    pub c2: f64,
    /// Verdict on `Delta^s(H F) - c1 Delta^{s-1} F - c2 w.grad(Delta^{s-1} F)`.
    pub verdict: ZeroVerdict,
}

/// Rational with denominator at most `max_den` within `tol` of `x`, if any.
fn snap(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.checked_mul(h1)?.checked_add(h0)?, a.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a as f64;
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

fn fitted_constant(x: f64) -> Result<Expr> {
    match snap(x, 1000, 1e-8 * x.abs().max(1.0)) {
        Some(q) => Ok(Expr::constant(q)),
        None => constant(x),
    }
}

/// Fits `Delta^s(H F) = c1 Delta^{s-1} F + c2 w.grad(Delta^{s-1} F)` by least
/// squares over the sample points and reports the identity residual. When
/// the two right-hand columns are proportional the minimum-norm solution is
/// used.
pub fn properness_identity_check(
    f: &Expr,
    g: &Geometry,
    s: usize,
    cfg: &ZeroTestConfig,
) -> Result<PropernessReport> {
    if s < 1 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    if !matches!(g, Geometry::SemiEuclidean { .. }) {
        return Err(Error::WrongGeometry { expected: "semieuclidean", found: g.kind().into() });
    }
    require_s_harmonic(f, g, s, cfg)?;
    let h = build_h(g, 1.0, 0.0)?;
    let lifted: FunctionValue = simplify(&(h * f.clone())).into();
    let target = operators::iterated_laplacian(&lifted, g, s)?;
    let a = operators::iterated_laplacian(&f.clone().into(), g, s - 1)?;
    let b = euler_pairing(&a, g)?;

    let (mut aa, mut ab, mut bb, mut at_, mut bt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut used = 0;
    for point in cfg.sample_points(&g.coordinates()) {
        let (Ok(t), Ok(x), Ok(y)) = (evaluate(&target, &point), evaluate(&a, &point), evaluate(&b, &point)) else {
            continue;
        };
        aa += x * x;
        ab += x * y;
        bb += y * y;
        at_ += x * t;
        bt += y * t;
        used += 1;
    }
    if used < 2 {
        return Err(Error::FitDegenerate(format!("only {used} usable sample points")));
    }
    let det = aa * bb - ab * ab;
    let (c1, c2) = if det > 1e-10 * aa * bb && det > 0.0 {
        ((bb * at_ - ab * bt) / det, (aa * bt - ab * at_) / det)
    } else if aa + bb == 0.0 {
        (0.0, 0.0)
    } else {
        // Rank one: project onto the dominant eigenvector of the normal matrix.
        let tr = aa + bb;
        let disc = ((aa - bb) * (aa - bb) + 4.0 * ab * ab).sqrt();
        let lambda = 0.5 * (tr + disc);
        let (ex, ey) = if ab.abs() > 0.0 { (ab, lambda - aa) } else if aa >= bb { (1.0, 0.0) } else { (0.0, 1.0) };
        let norm = (ex * ex + ey * ey).sqrt();
        let (ex, ey) = (ex / norm, ey / norm);
        let proj = (ex * at_ + ey * bt) / lambda;
        (ex * proj, ey * proj)
    };
    let (k1, k2) = (fitted_constant(c1)?, fitted_constant(c2)?);
    let residual = simplify(&(target - k1.clone() * a - k2.clone() * b));
    let verdict = is_zero(&residual, cfg)?;
    let to_f64 = |e: &Expr| e.as_const().and_then(|q| q.to_f64()).unwrap_or(f64::NAN);
    Ok(PropernessReport { c1: to_f64(&k1), c2: to_f64(&k2), verdict })
}

/// Integer `k >= 0` with `-k(k+1) = v`, if any.
pub fn eigen_index(v: f64) -> Option<u32> {
    let q = rational_from_f64(-v)?;
    if !q.is_integer() || q.is_negative() {
        return None;
    }
    let n = q.to_integer();
    let mut k = BigInt::zero();
    while &k * (&k + BigInt::one()) < n {
        k += 1;
    }
    (&k * (&k + BigInt::one()) == n).then(|| k.to_u32()).flatten()
}

/// Separated function with eigenvalues `(lambda, mu)` and radial factor `f`.
pub fn separated(f: Expr, lambda: f64, mu: f64) -> Result<FunctionValue> {
    Ok(FunctionValue::Separated(SeparatedFunction::new(f, lambda, mu)?))
}
