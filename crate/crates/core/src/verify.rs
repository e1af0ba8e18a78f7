//! The fixed verification suite: every identity the engine is built to
//! reproduce, run end to end with machine-readable results.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::almansi::{
    almansi_lift, build_h, classify, conjecture_probe, lemma43_check, radial_harmonic, separated, weak_almansi_probe,
    Classification,
};
use crate::error::{Error, Result};
use crate::expr::{is_zero, parse, simplify, Assignment, Expr, ZeroTestConfig, ZeroVerdict};
use crate::geometry::{catalog, Geometry};
use crate::operators::{
    cartesian_laplacian, euler_pairing, iterated_laplacian, laplacian_sequence, pq_gradient, warped_radial_laplacian,
    FunctionValue,
};
use crate::oracle::{fd_laplacian, interior_points, FdConfig};

/// Check ids and anchors, in report order.
pub const CHECKS: [(&str, &str); 17] = [
    ("P01", "join-first-laplacian"),
    ("P02", "join-bilaplacian-of-distance-zero"),
    ("P03", "join-bilaplacian-dichotomy-scan"),
    ("P04", "separated-harmonic-solution"),
    ("P05", "join-lift-proper-biharmonic"),
    ("P06", "join-counterexample-residual"),
    ("P07", "euler-commutator-identity"),
    ("P08", "iterated-euler-commutator-identity"),
    ("P09", "lifted-laplacian-polyharmonic"),
    ("P10", "almansi-lift-corpus"),
    ("P11", "almansi-tower"),
    ("P12", "quotient-lifts-not-proper"),
    ("P13", "weak-almansi-euclidean-pass"),
    ("P14", "weak-almansi-curved-fail"),
    ("P15", "gradient-and-laplacian-of-h"),
    ("P16", "indefinite-harmonic-quadratic"),
    ("C01", "conjecture-probe"),
];

/// Seed of the random polynomial corpus; independent of the sampling seed.
pub const CORPUS_SEED: u64 = 0x504F4C59;

/// Semi-Euclidean signatures the polynomial identities are checked on.
pub const POLY_SIGNATURES: [(u32, u32); 4] = [(2, 0), (1, 1), (2, 1), (3, 0)];

/// Polynomials per signature.
pub const POLYS_PER_SIGNATURE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    EvidenceOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub verdict: CheckVerdict,
    pub max_abs_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Assignment>,
    pub ms: u64,
    #[serde(skip)]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    /// True when no pass-type check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != CheckVerdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    /// Corrupts the named check so that it must fail.
    pub inject_fault: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let cfg = ZeroTestConfig::default();
        VerifyOptions { seed: cfg.seed, samples: cfg.samples, tolerance: cfg.tolerance, inject_fault: None }
    }
}

#[derive(Debug, Default)]
struct Outcome {
    passed: bool,
    max_abs: f64,
    witness: Option<Assignment>,
    detail: String,
}

impl Outcome {
    /// Folds a verdict that is expected to vanish.
    fn expect_zero(&mut self, v: &ZeroVerdict, what: impl FnOnce() -> String) -> bool {
        self.max_abs = self.max_abs.max(v.max_abs());
        if let ZeroVerdict::NonZero { witness, .. } = v {
            if self.witness.is_none() {
                self.witness = Some(witness.clone());
                self.detail = format!("{} does not vanish", what());
            }
            return false;
        }
        true
    }

    /// Folds a verdict that is expected to be nonzero.
    fn expect_nonzero(&mut self, v: &ZeroVerdict, what: impl FnOnce() -> String) -> bool {
        match v {
            ZeroVerdict::NonZero { witness, .. } => {
                if self.witness.is_none() {
                    self.witness = Some(witness.clone());
                }
                true
            }
            _ => {
                if self.detail.is_empty() {
                    self.detail = format!("{} vanishes", what());
                }
                false
            }
        }
    }

    fn fail(&mut self, why: String) {
        if self.detail.is_empty() {
            self.detail = why;
        }
    }
}

struct Ctx {
    cfg: ZeroTestConfig,
    fault: Option<String>,
}

impl Ctx {
    fn faulty(&self, id: &str) -> bool {
        self.fault.as_deref() == Some(id)
    }

    fn zero(&self, e: &Expr, g: &Geometry) -> Result<ZeroVerdict> {
        Ok(is_zero(e, &g.zero_config(&self.cfg))?)
    }

    /// Adds `1/1000` to `e` when check `id` is the injected fault.
    fn perturb(&self, id: &str, e: Expr) -> Expr {
        if self.faulty(id) {
            simplify(&(e + Expr::ratio(1, 1000)))
        } else {
            e
        }
    }
}

fn p(text: &str) -> Expr {
    parse(text).expect("built-in expression")
}

fn join(name: &str, a: u32, b: u32) -> Result<Geometry> {
    catalog(name, &[a, b])
}

fn semi(pp: u32, qq: u32) -> Geometry {
    Geometry::SemiEuclidean { p: pp, q: qq }
}

/// Profile `(4r - sin 4r) / sin^2(2r)` solving the separated equation with
/// eigenvalues `-2, -2` on the join of two 2-spheres.
pub fn separated_profile() -> Expr {
    p("(4*r - sin(4*r)) / sin(2*r)^2")
}

/// Closed form of the bi-Laplacian residual of `r` times [`separated_profile`].
pub fn counterexample_residual() -> Expr {
    p("64*cot(2*r)*csc(2*r)^4*(sin(4*r) - 4*r)")
}

/// Random polynomial with integer coefficients in `-9..=9` and total degree
/// at most `max_degree`.
pub fn random_polynomial(rng: &mut impl Rng, vars: &[String], max_degree: u32) -> Expr {
    let terms = rng.random_range(1..=6);
    let mut out = Vec::new();
    for _ in 0..terms {
        let degree = rng.random_range(0..=max_degree);
        let mut exps = vec![0u32; vars.len()];
        for _ in 0..degree {
            exps[rng.random_range(0..vars.len())] += 1;
        }
        let mut c = rng.random_range(-9i64..=9);
        if c == 0 {
            c = 1;
        }
        let mut factors = vec![Expr::int(c)];
        for (v, e) in vars.iter().zip(exps) {
            if e > 0 {
                factors.push(Expr::var(v).powi(e as i64));
            }
        }
        out.push(Expr::product(factors));
    }
    simplify(&Expr::sum(out))
}

/// The polynomial corpus used by the commutator identities.
pub fn polynomial_corpus() -> Vec<(Geometry, Expr)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    for (pp, qq) in POLY_SIGNATURES {
        let g = semi(pp, qq);
        let vars = g.coordinates();
        for _ in 0..POLYS_PER_SIGNATURE {
            out.push((g.clone(), random_polynomial(&mut rng, &vars, 6)));
        }
    }
    out
}

/// Total degree of a canonical polynomial.
pub fn total_degree(e: &Expr) -> u32 {
    use crate::expr::Node;
    match e.node() {
        Node::Const(_) | Node::Pi => 0,
        Node::Var(_) => 1,
        Node::Sum(ts) => ts.iter().map(total_degree).max().unwrap_or(0),
        Node::Product(fs) => fs.iter().map(total_degree).sum(),
        Node::Power(b, k) => total_degree(b) * k.to_integer().try_into().unwrap_or(0u32),
        Node::Neg(a) => total_degree(a),
        Node::Quotient(a, _) => total_degree(a),
        Node::Call(..) => 0,
    }
}

/// Harmonic functions and the signatures they are lifted on, with the
/// expected classification of the lift.
pub fn lift_corpus() -> Vec<(Expr, Geometry, Classification)> {
    let proper2 = Classification::ProperSHarmonic(2);
    let proper1 = Classification::ProperSHarmonic(1);
    let mut out = Vec::new();
    let mut add = |f: &str, sigs: &[(u32, u32)], exceptions: &[(u32, u32)]| {
        for &(pp, qq) in sigs {
            let expected = if exceptions.contains(&(pp, qq)) { proper1 } else { proper2 };
            out.push((p(f), semi(pp, qq), expected));
        }
    };
    add("x1", &[(2, 0), (1, 1), (2, 1), (3, 0)], &[]);
    add("x1*x2", &[(2, 0), (2, 1), (3, 0)], &[]);
    add("x1^2 - x2^2", &[(2, 0), (2, 1), (3, 0)], &[]);
    add("x1*y1", &[(1, 1), (2, 1)], &[]);
    add("x1^2 + y1^2", &[(1, 1), (2, 1)], &[]);
    add("x1/(x1^2 + x2^2)", &[(2, 0), (2, 1), (3, 0)], &[(2, 0)]);
    add("x1/(x1^2 - y1^2)", &[(1, 1), (2, 1)], &[(1, 1)]);
    out
}

fn p01(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for a in 2..=5u32 {
        for b in 2..=5u32 {
            let g = join("spherical-join", a, b)?;
            let lap = warped_radial_laplacian(&p("r"), &g)?;
            let ca = if ctx.faulty("P01") { Expr::ratio(1000 * (a as i64 - 1) + 1, 1000) } else { Expr::int(a as i64 - 1) };
            let expected = ca * p("cot(r)") - Expr::int(b as i64 - 1) * p("tan(r)");
            let v = ctx.zero(&(lap - expected), &g)?;
            o.passed &= o.expect_zero(&v, || format!("first Laplacian on join({a},{b})"));
        }
    }
    Ok(o)
}

fn bilaplacian_of_r(g: &Geometry) -> Result<Expr> {
    iterated_laplacian(&p("r").into(), g, 2)
}

fn p02(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for name in ["spherical-join", "hyperbolic-join"] {
        let g = join(name, 3, 3)?;
        let v = ctx.zero(&ctx.perturb("P02", bilaplacian_of_r(&g)?), &g)?;
        o.passed &= o.expect_zero(&v, || format!("bi-Laplacian of r on {name}(3,3)"));
    }
    Ok(o)
}

fn p03(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for a in 2..=5u32 {
        for b in 2..=5u32 {
            let g = join("spherical-join", a, b)?;
            let bi = bilaplacian_of_r(&g)?;
            if (a, b) == (3, 3) {
                let v = ctx.zero(&ctx.perturb("P03", bi), &g)?;
                o.passed &= o.expect_zero(&v, || "bi-Laplacian of r on join(3,3)".into());
            } else {
                let v = ctx.zero(&bi, &g)?;
                o.passed &= o.expect_nonzero(&v, || format!("bi-Laplacian of r on join({a},{b})"));
            }
        }
    }
    Ok(o)
}

fn p04(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    let g = join("spherical-join", 3, 3)?;
    let cfg = ctx.cfg.clone().with_region("r", crate::expr::SampleRegion::interval(0.05, FRAC_PI_2 - 0.05));
    let f = separated(separated_profile(), -2.0, -2.0)?;
    let residual = ctx.perturb("P04", iterated_laplacian(&f, &g, 1)?);
    let v = is_zero(&residual, &cfg)?;
    o.passed &= o.expect_zero(&v, || "separated residual".into());
    Ok(o)
}

fn p05(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for name in ["spherical-join", "hyperbolic-join"] {
        let g = join(name, 3, 3)?;
        for c in [1.0, -1.0, 2.0] {
            let h = radial_harmonic(&g, c)?;
            let f = h.closed().cloned().ok_or_else(|| Error::InvalidArgument("expected closed form".into()))?;
            let lifted: FunctionValue = simplify(&(p("r") * f)).into();
            let seq = laplacian_sequence(&lifted, &g, 2)?;
            let low = ctx.zero(&seq[1], &g)?;
            let high = ctx.zero(&ctx.perturb("P05", seq[2].clone()), &g)?;
            o.passed &= o.expect_nonzero(&low, || format!("Laplacian of r F_{c} on {name}(3,3)"));
            o.passed &= o.expect_zero(&high, || format!("bi-Laplacian of r F_{c} on {name}(3,3)"));
        }
    }
    Ok(o)
}

fn p06(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    let g = join("spherical-join", 3, 3)?;
    let lifted = separated(simplify(&(p("r") * separated_profile())), -2.0, -2.0)?;
    let residual = iterated_laplacian(&lifted, &g, 2)?;
    let scale = if ctx.faulty("P06") { Expr::ratio(64001, 64000) } else { Expr::one() };
    let expected = scale * counterexample_residual();
    let diff = ctx.zero(&(residual.clone() - expected), &g)?;
    o.passed &= o.expect_zero(&diff, || "difference from the closed-form residual".into());
    let nz = ctx.zero(&residual, &g)?;
    o.passed &= o.expect_nonzero(&nz, || "bi-Laplacian residual".into());
    Ok(o)
}

fn expect_proven(o: &mut Outcome, v: &ZeroVerdict, what: impl FnOnce() -> String) -> bool {
    if *v == ZeroVerdict::ProvenZero {
        return true;
    }
    let what = what();
    if o.expect_zero(v, || what.clone()) {
        o.fail(format!("{what} is only numerically zero"));
    }
    false
}

fn p07(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (i, (g, f)) in polynomial_corpus().into_iter().enumerate() {
        let lap = cartesian_laplacian(&f, &g)?;
        let lhs = cartesian_laplacian(&euler_pairing(&f, &g)?, &g)?;
        let rhs = Expr::int(2) * lap.clone() + euler_pairing(&lap, &g)?;
        let v = ctx.zero(&ctx.perturb("P07", simplify(&(lhs - rhs))), &g)?;
        o.passed &= expect_proven(&mut o, &v, || format!("polynomial #{i} on {g}"));
    }
    Ok(o)
}

fn p08(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (i, (g, f)) in polynomial_corpus().into_iter().enumerate() {
        let euler = euler_pairing(&f, &g)?;
        for s in [2usize, 3] {
            let lhs = iterated_laplacian(&euler.clone().into(), &g, s)?;
            let ls = iterated_laplacian(&f.clone().into(), &g, s)?;
            let rhs = Expr::int(2 * s as i64) * ls.clone() + euler_pairing(&ls, &g)?;
            let v = ctx.zero(&ctx.perturb("P08", simplify(&(lhs - rhs))), &g)?;
            o.passed &= expect_proven(&mut o, &v, || format!("polynomial #{i} on {g}, s = {s}"));
        }
    }
    Ok(o)
}

fn p09(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (i, (g, f)) in polynomial_corpus().into_iter().enumerate() {
        let s = (total_degree(&f) / 2 + 1) as usize;
        let v = if ctx.faulty("P09") {
            let h = build_h(&g, 1.0, 0.0)?;
            let target: FunctionValue = simplify(&(h * cartesian_laplacian(&f, &g)?)).into();
            ctx.zero(&ctx.perturb("P09", iterated_laplacian(&target, &g, s)?), &g)?
        } else {
            lemma43_check(&f, &g, s, &ctx.cfg)?
        };
        o.passed &= expect_proven(&mut o, &v, || format!("polynomial #{i} on {g}, s = {s}"));
    }
    Ok(o)
}

fn classification_outcome(
    o: &mut Outcome,
    ctx: &Ctx,
    id: &str,
    f: &Expr,
    g: &Geometry,
    expected: Classification,
) -> Result<()> {
    let base = classify(&f.clone().into(), g, 2, &ctx.cfg)?;
    if base.classification != Classification::ProperSHarmonic(1) {
        o.passed = false;
        o.fail(format!("{f} on {g} is {}, not harmonic", base.classification));
        return Ok(());
    }
    let mut lift = almansi_lift(&f.clone().into(), g, 1.0, 0.0)?;
    if ctx.faulty(id) {
        lift = lift.map(|e| simplify(&(e.clone() + p("x1^4") * Expr::ratio(1, 1000))));
    }
    let report = classify(&lift, g, 3, &ctx.cfg)?;
    for r in &report.orders {
        o.max_abs = o.max_abs.max(if r.verdict.is_zero() { r.verdict.max_abs() } else { 0.0 });
    }
    if report.classification != expected {
        o.passed = false;
        o.fail(format!("lift of {f} on {g} is {}, expected {expected}", report.classification));
    }
    Ok(())
}

fn p10(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (f, g, expected) in lift_corpus() {
        classification_outcome(&mut o, ctx, "P10", &f, &g, expected)?;
    }
    Ok(o)
}

fn p11(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for pp in [2u32, 3] {
        let g = semi(pp, 0);
        for s in 1..=3usize {
            let tower = crate::almansi::almansi_tower(&p("x1"), &g, s, 1.0, 0.0)?;
            let seq = laplacian_sequence(&tower.into(), &g, s + 1)?;
            let low = ctx.zero(&seq[s], &g)?;
            let high = ctx.zero(&ctx.perturb("P11", seq[s + 1].clone()), &g)?;
            o.passed &= o.expect_nonzero(&low, || format!("Delta^{s} of H^{s} x1 on {g}"));
            o.passed &= o.expect_zero(&high, || format!("Delta^{} of H^{s} x1 on {g}", s + 1));
        }
    }
    Ok(o)
}

fn p12(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (f, g) in [("x1/(x1^2 + x2^2)", semi(2, 0)), ("x1/(x1^2 - y1^2)", semi(1, 1))] {
        classification_outcome(&mut o, ctx, "P12", &p(f), &g, Classification::ProperSHarmonic(1))?;
    }
    Ok(o)
}

fn p13(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    let h = if ctx.faulty("P13") { p("r^2 + r^4/1000") } else { p("r^2") };
    for m in [3u32, 4] {
        let g = catalog("euclidean", &[m])?;
        let report = weak_almansi_probe(&g, &h, &ctx.cfg)?;
        for e in &report.entries {
            o.expect_zero(&e.verdict, || e.label.clone());
        }
        if !report.passed {
            o.passed = false;
            o.fail(format!("weak Almansi probe failed on euclidean({m})"));
        }
    }
    Ok(o)
}

fn p14(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for name in ["hyperbolic", "sphere"] {
        let g = if ctx.faulty("P14") { catalog("euclidean", &[3])? } else { catalog(name, &[3])? };
        let report = weak_almansi_probe(&g, &p("r^2"), &ctx.cfg)?;
        match (&report.passed, &report.first_failure) {
            (false, Some(fail)) => {
                if o.witness.is_none() {
                    o.witness = Some(fail.witness.clone());
                }
            }
            _ => {
                o.passed = false;
                o.fail(format!("weak Almansi probe did not fail on {name}(3)"));
            }
        }
    }
    Ok(o)
}

fn p15(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    for (pp, qq) in [(1, 0), (2, 0), (1, 1), (2, 1), (3, 0), (2, 2)] {
        let g = semi(pp, qq);
        let h = build_h(&g, 1.0, 0.0)?;
        for (d, v) in pq_gradient(&h, &g)?.into_iter().zip(g.coordinates()) {
            let residual = ctx.perturb("P15", simplify(&(d - Expr::int(2) * Expr::var(&v))));
            let verdict = ctx.zero(&residual, &g)?;
            o.passed &= expect_proven(&mut o, &verdict, || format!("gradient component {v} on {g}"));
        }
        let lap = cartesian_laplacian(&h, &g)?;
        let verdict = ctx.zero(&(lap - Expr::int(2 * (pp + qq) as i64)), &g)?;
        o.passed &= expect_proven(&mut o, &verdict, || format!("Laplacian of H on {g}"));
    }
    Ok(o)
}

fn p16(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome { passed: true, ..Outcome::default() };
    let g = semi(1, 1);
    let f = if ctx.faulty("P16") { p("-(x1^2 + y1^2) + x1^2/1000") } else { p("-(x1^2 + y1^2)") };
    let f = simplify(&f);
    let lap = cartesian_laplacian(&f, &g)?;
    let v = ctx.zero(&lap, &g)?;
    o.passed &= expect_proven(&mut o, &v, || "Laplacian of -(x1^2 + y1^2)".into());
    let fv: FunctionValue = f.into();
    for point in interior_points(&g, 5) {
        let fd = fd_laplacian(&fv, &g, &point, &FdConfig::default())?;
        o.max_abs = o.max_abs.max(fd.abs());
        if fd.abs() > 1e-6 {
            o.passed = false;
            o.fail(format!("finite-difference Laplacian {fd} at {point:?}"));
        }
    }
    Ok(o)
}

fn c01(ctx: &Ctx) -> Result<Outcome> {
    let mut o = Outcome::default();
    let entries = conjecture_probe(crate::almansi::CONJECTURE_K_MAX, &ctx.cfg)?;
    let mut notes = Vec::new();
    for e in entries.iter().filter(|e| e.k >= 2) {
        if let Some(u) = &e.upper {
            o.max_abs = o.max_abs.max(u.max_abs());
        }
        notes.push(match &e.error {
            Some(err) => format!("k={}: {err}", e.k),
            None => format!("k={}: {}", e.k, if e.consistent { "consistent" } else { "inconsistent" }),
        });
    }
    o.detail = notes.join("; ");
    o.passed = entries.iter().all(|e| e.consistent);
    Ok(o)
}

fn run_one(id: &str, ctx: &Ctx) -> Result<Outcome> {
    match id {
        "P01" => p01(ctx),
        "P02" => p02(ctx),
        "P03" => p03(ctx),
        "P04" => p04(ctx),
        "P05" => p05(ctx),
        "P06" => p06(ctx),
        "P07" => p07(ctx),
        "P08" => p08(ctx),
        "P09" => p09(ctx),
        "P10" => p10(ctx),
        "P11" => p11(ctx),
        "P12" => p12(ctx),
        "P13" => p13(ctx),
        "P14" => p14(ctx),
        "P15" => p15(ctx),
        "P16" => p16(ctx),
        "C01" => c01(ctx),
        other => Err(Error::InvalidArgument(format!("unknown check `{other}`"))),
    }
}

/// Runs a single check by id.
pub fn run_check(id: &str, opts: &VerifyOptions) -> Result<CheckRecord> {
    let anchor = CHECKS
        .iter()
        .find(|(cid, _)| *cid == id)
        .map(|(_, a)| *a)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check `{id}`")))?;
    let ctx = Ctx {
        cfg: ZeroTestConfig { samples: opts.samples, tolerance: opts.tolerance, seed: opts.seed, ..ZeroTestConfig::default() },
        fault: opts.inject_fault.clone(),
    };
    ctx.cfg.validate()?;
    let start = Instant::now();
    let o = run_one(id, &ctx)?;
    let verdict = if id.starts_with('C') {
        CheckVerdict::EvidenceOnly
    } else if o.passed {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    };
    Ok(CheckRecord {
        id: id.to_string(),
        anchor: anchor.to_string(),
        verdict,
        max_abs_residual: o.max_abs,
        witness: o.witness,
        ms: start.elapsed().as_millis() as u64,
        detail: o.detail,
    })
}

/// Runs the whole suite in fixed order.
pub fn verify_paper(opts: &VerifyOptions) -> Result<VerifyReport> {
    if let Some(f) = &opts.inject_fault {
        if !CHECKS.iter().any(|(id, _)| id == f) {
            return Err(Error::InvalidArgument(format!("unknown check `{f}` for fault injection")));
        }
    }
    let checks = CHECKS.iter().map(|(id, _)| run_check(id, opts)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { version: env!("CARGO_PKG_VERSION").to_string(), seed: opts.seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic_and_bounded() {
        let a = polynomial_corpus();
        let b = polynomial_corpus();
        assert_eq!(a, b);
        assert_eq!(a.len(), POLY_SIGNATURES.len() * POLYS_PER_SIGNATURE);
        assert!(a.iter().all(|(_, f)| total_degree(f) <= 6));
        assert!(a.iter().any(|(_, f)| total_degree(f) == 6));
    }

    #[test]
    fn degrees() {
        assert_eq!(total_degree(&simplify(&p("x1^2*y1 + 3*x2 - 1"))), 3);
        assert_eq!(total_degree(&p("7")), 0);
    }

    #[test]
    fn lift_corpus_shape() {
        let corpus = lift_corpus();
        let proper1 = corpus.iter().filter(|(_, _, c)| *c == Classification::ProperSHarmonic(1)).count();
        assert_eq!(proper1, 2);
        assert_eq!(corpus.len(), 19);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(run_check("P99", &VerifyOptions::default()).is_err());
        let opts = VerifyOptions { inject_fault: Some("X".into()), ..VerifyOptions::default() };
        assert!(verify_paper(&opts).is_err());
    }

    #[test]
    fn fast_checks_pass_and_faults_are_caught() {
        for id in ["P01", "P02", "P04", "P06", "P12", "P15", "P16"] {
            let ok = run_check(id, &VerifyOptions::default()).unwrap();
            assert_eq!(ok.verdict, CheckVerdict::Pass, "{id}: {}", ok.detail);
            let opts = VerifyOptions { inject_fault: Some(id.into()), ..VerifyOptions::default() };
            let bad = run_check(id, &opts).unwrap();
            assert_eq!(bad.verdict, CheckVerdict::Fail, "{id} with injected fault");
        }
    }
}
