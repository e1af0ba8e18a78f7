//! Shared corpora and kernel-property runners for the integration tests.
#![allow(dead_code)]

use almansi_core::expr::{evaluate, evaluate_with_bound, parse, Assignment, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUNCS: [&str; 12] = ["sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh", "coth", "exp", "ln"];

/// Random grammar-valid expression text in `x`, `y` of depth at most `depth`.
pub fn random_text(rng: &mut impl Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..10) {
            0..=5 => ["x", "y"][rng.random_range(0..2)].to_string(),
            6 | 7 => rng.random_range(1..6).to_string(),
            8 => format!("{}/{}", rng.random_range(1..6), rng.random_range(2..6)),
            _ => "pi".to_string(),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_text(rng, depth - 1);
    let mut local = ChaCha8Rng::seed_from_u64(rng.random());
    match rng.random_range(0..9) {
        0 | 1 => format!("({} + {})", sub(&mut local), sub(&mut local)),
        2 => format!("({} - {})", sub(&mut local), sub(&mut local)),
        3 | 4 => format!("({} * {})", sub(&mut local), sub(&mut local)),
        5 => format!("({} / ({}))", sub(&mut local), sub(&mut local)),
        6 => {
            let exp = ["2", "3", "-1", "-2", "(1/2)"][rng.random_range(0..5)];
            format!("({})^{exp}", sub(&mut local))
        }
        7 => format!("-({})", sub(&mut local)),
        _ => format!("{}({})", FUNCS[rng.random_range(0..FUNCS.len())], sub(&mut local)),
    }
}

pub fn point(x: f64, y: f64) -> Assignment {
    [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect()
}

fn random_point(rng: &mut impl Rng) -> Assignment {
    point(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

const CROSS_STEP: f64 = 2e-3;

/// True when `e` is finite and moderate on a small cross around `p` and its
/// third difference there stays below `1e5`, which keeps test points away from
/// poles and branch cuts.
fn tame(e: &Expr, p: &Assignment, var: &str) -> bool {
    let values: Option<Vec<f64>> = (-5..=5)
        .map(|k| {
            let mut q = p.clone();
            *q.get_mut(var).unwrap() += k as f64 * CROSS_STEP;
            evaluate(e, &q).ok().filter(|v| v.is_finite() && v.abs() <= 1e4)
        })
        .collect();
    let Some(v) = values else { return false };
    v.windows(4).all(|w| ((w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0]) / CROSS_STEP.powi(3)).abs() <= 1e5)
}

/// Multiplier on the propagated rounding bound, as in the zero test.
const ROUNDING_SAFETY: f64 = 64.0;

/// Value and rounding bound, if defined and finite.
fn value(e: &Expr, p: &Assignment) -> Option<(f64, f64)> {
    evaluate_with_bound(e, p).ok().filter(|(v, err)| v.is_finite() && err.is_finite())
}

pub struct KernelOutcome {
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl KernelOutcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.total
    }
}

pub const KERNEL_CASES: usize = 200;

/// Symbolic derivative versus a central difference with `h = 1e-5`, within
/// `1e-5 (1 + |value|)` plus the rounding bounds of both sides, on
/// `KERNEL_CASES` random expressions of depth <= 5.
pub fn derivative_property(seed: u64, diff: &dyn Fn(&Expr, &str) -> Expr) -> KernelOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5;
    let mut out = KernelOutcome { passed: 0, total: KERNEL_CASES, failures: Vec::new() };
    let mut cases = 0;
    while cases < KERNEL_CASES {
        let text = random_text(&mut rng, 5);
        let e = parse(&text).expect("generated text parses");
        let var = ["x", "y"][rng.random_range(0..2)];
        let d = diff(&e, var);
        let Some(p) = (0..40).map(|_| random_point(&mut rng)).find(|p| tame(&e, p, var) && value(&d, p).is_some())
        else {
            continue;
        };
        cases += 1;
        let at = |t: f64| {
            let mut q = p.clone();
            *q.get_mut(var).unwrap() += t;
            evaluate_with_bound(&e, &q).unwrap()
        };
        let ((plus, e_plus), (minus, e_minus)) = (at(h), at(-h));
        let fd = (plus - minus) / (2.0 * h);
        let fd_err = (e_plus + e_minus) / (2.0 * h);
        let (value, err) = value(&d, &p).unwrap();
        if (value - fd).abs() <= 1e-5 * (1.0 + value.abs()) + ROUNDING_SAFETY * (err + fd_err) {
            out.passed += 1;
        } else {
            out.failures.push(format!("d/d{var} {text} at {p:?}: symbolic {value}, central difference {fd}"));
        }
    }
    out
}

/// `simplify` preserves values at 16 random points per expression, within
/// `1e-10 (1 + |value|)` plus the propagated rounding bounds of both sides,
/// wherever both are defined.
pub fn simplify_property(seed: u64, simp: &dyn Fn(&Expr) -> Expr) -> KernelOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = KernelOutcome { passed: 0, total: KERNEL_CASES, failures: Vec::new() };
    for _ in 0..KERNEL_CASES {
        let text = random_text(&mut rng, 5);
        let e = parse(&text).expect("generated text parses");
        let s = simp(&e);
        let mut bad = None;
        for _ in 0..16 {
            let p = random_point(&mut rng);
            if let (Some((a, ea)), Some((b, eb))) = (value(&e, &p), value(&s, &p)) {
                if (a - b).abs() > 1e-10 * (1.0 + a.abs()) + ROUNDING_SAFETY * (ea + eb) {
                    bad = Some(format!("{text} -> {s} at {p:?}: {a} vs {b}"));
                    break;
                }
            }
        }
        match bad {
            None => out.passed += 1,
            Some(msg) => out.failures.push(msg),
        }
    }
    out
}

/// Hand-written texts covering every grammar production.
pub const GRAMMAR_CORPUS: &[&str] = &[
    "sin(2*r)",
    "(4*r - sin(4*r)) / sin(2*r)^2",
    "x/(x^2 - y^2)",
    "x1/(x1^2 + x2^2)",
    "64*cot(2*r)*csc(2*r)^4*(sin(4*r) - 4*r)",
    "-x^2",
    "--x",
    "2^-1",
    "r^(1/2)",
    "r^-(3/2)",
    "a - b - c",
    "a / b / c",
    "a * -b",
    "1.5*x + 0.25",
    "pi*r",
    "exp(ln(r))",
    "sinh(r)^2 - cosh(r)^2 + tanh(r)*coth(r)",
    "sec(r) + csc(r) + tan(r) + cot(r)",
    "(x1^2 + x2^2 - y1^2)^3 * y1",
    "0",
    "  r  *  ( 1 + r ) ",
];

/// `parse(print(parse(t))) == parse(t)` over the grammar corpus and
/// `KERNEL_CASES` generated texts.
pub fn round_trip_property(seed: u64) -> KernelOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut texts: Vec<String> = GRAMMAR_CORPUS.iter().map(|s| s.to_string()).collect();
    texts.extend((0..KERNEL_CASES).map(|_| random_text(&mut rng, 5)));
    let mut out = KernelOutcome { passed: 0, total: texts.len(), failures: Vec::new() };
    for t in &texts {
        let e = parse(t).expect("corpus text parses");
        let printed = e.to_string();
        match parse(&printed) {
            Ok(again) if again == e => out.passed += 1,
            Ok(again) => out.failures.push(format!("{t}: printed {printed}, reparsed {again}")),
            Err(err) => out.failures.push(format!("{t}: printed {printed} does not parse: {err}")),
        }
    }
    out
}
