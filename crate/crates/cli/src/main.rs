//! `almansi` command-line tool.

use std::fs;
use std::process::ExitCode;

use almansi_core::almansi::{self, HarmonicityReport};
use almansi_core::expr::{is_zero, parse, Assignment, Expr, ZeroTestConfig, ZeroVerdict};
use almansi_core::geometry::{self, Geometry};
use almansi_core::operators::{self, FunctionValue};
use almansi_core::oracle::{self, CrossCheckReport, FdConfig};
use almansi_core::verify::{self, CheckVerdict, VerifyOptions};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "almansi", version, about = "Iterated Laplacians, polyharmonic classification and Almansi lifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the iterated Laplacian of a function.
    Laplacian {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Compare against finite differences at 5 interior points.
        #[arg(long)]
        fd_check: bool,
    },
    /// Find the smallest s with Delta^s F = 0.
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
    },
    /// Build H^s F and classify it.
    Almansi {
        #[command(flatten)]
        input: Input,
        #[arg(long = "power", default_value_t = 1)]
        power: usize,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c2: f64,
    },
    /// Run the built-in identity checks.
    VerifyPaper {
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Check the boundary conditions of a geometry.
    ValidateGeometry {
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Input {
    /// `catalog:name(dims)` or a path to a geometry spec file.
    #[arg(long)]
    geometry: String,
    #[arg(long, allow_hyphen_values = true)]
    function: String,
    /// Angular eigenvalue on the first sphere factor (separated function).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Angular eigenvalue on the second sphere factor.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Args)]
struct Sampling {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Sampling {
    fn zero_config(&self) -> ZeroTestConfig {
        let mut cfg = ZeroTestConfig::default();
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(t) = self.tol {
            cfg.tolerance = t;
        }
        cfg
    }
}

struct Loaded {
    geometry: Geometry,
    function: FunctionValue,
    aliased: bool,
}

impl Loaded {
    fn show(&self, e: &Expr) -> Expr {
        if self.aliased {
            geometry::restore_aliases(e, &self.geometry)
        } else {
            e.clone()
        }
    }

    fn show_point(&self, a: &Assignment) -> Assignment {
        if !self.aliased {
            return a.clone();
        }
        let aliases = geometry::coordinate_aliases(&self.geometry);
        a.iter()
            .map(|(k, v)| {
                let name = aliases.iter().find(|(_, c)| c == k).map_or(k.clone(), |(s, _)| s.to_string());
                (name, *v)
            })
            .collect()
    }

    fn show_verdict(&self, v: &ZeroVerdict) -> ZeroVerdict {
        match v {
            ZeroVerdict::NonZero { witness, value } => {
                ZeroVerdict::NonZero { witness: self.show_point(witness), value: *value }
            }
            other => other.clone(),
        }
    }
}

type CliResult = Result<ExitCode, String>;

fn load_geometry(text: &str) -> Result<Geometry, String> {
    match text.strip_prefix("catalog:") {
        Some(name) => geometry::parse_catalog(name).map_err(|e| e.to_string()),
        None => {
            let spec = fs::read_to_string(text).map_err(|e| format!("cannot read geometry file {text}: {e}"))?;
            geometry::parse_spec(&spec).map_err(|e| format!("{text}: {e}"))
        }
    }
}

fn load(input: &Input) -> Result<Loaded, String> {
    let geometry = load_geometry(&input.geometry)?;
    let parsed = parse(&input.function).map_err(|e| format!("bad function: {e}"))?;
    let (expr, aliased) = geometry::resolve_aliases(&parsed, &geometry);
    operators::check_variables(&expr, &geometry).map_err(|e| e.to_string())?;
    let function = match (input.lambda, input.mu) {
        (None, None) => FunctionValue::Expr(expr),
        (l, m) => almansi::separated(expr, l.unwrap_or(0.0), m.unwrap_or(0.0)).map_err(|e| e.to_string())?,
    };
    Ok(Loaded { geometry, function, aliased })
}

fn verdict_text(l: &Loaded, v: &ZeroVerdict) -> String {
    match l.show_verdict(v) {
        ZeroVerdict::ProvenZero => "ProvenZero".into(),
        ZeroVerdict::NumericallyZero { max_abs, samples } => {
            format!("NumericallyZero (max |value| {max_abs:.3e} over {samples} samples)")
        }
        ZeroVerdict::NonZero { witness, value } => {
            let at: Vec<String> = witness.iter().map(|(k, v)| format!("{k}={v}")).collect();
            match at.is_empty() {
                true => format!("NonZero (constant {value:.6e})"),
                false => format!("NonZero (value {value:.6e} at {})", at.join(", ")),
            }
        }
    }
}

fn cmd_laplacian(input: &Input, order: usize, fd_check: bool) -> CliResult {
    let l = load(input)?;
    if order < 1 {
        return Err("--order must be at least 1".into());
    }
    let cfg = l.geometry.zero_config(&input.sampling.zero_config());
    let seq = operators::laplacian_sequence(&l.function, &l.geometry, order).map_err(|e| e.to_string())?;
    let result = &seq[order];
    let verdict = is_zero(result, &cfg).map_err(|e| e.to_string())?;
    let check: Option<CrossCheckReport> = if fd_check {
        let previous = l.function.map(|_| seq[order - 1].clone());
        let points = oracle::interior_points(&l.geometry, 5);
        let report = oracle::cross_check_laplacian(&previous, result, &l.geometry, &points, &FdConfig::default())
            .map_err(|e| e.to_string())?;
        Some(report)
    } else {
        None
    };
    let shown = l.show(result);
    if input.sampling.json {
        let out = json!({
            "function": l.show(l.function.expr()).to_string(),
            "geometry": l.geometry.to_string(),
            "order": order,
            "laplacian": shown.to_string(),
            "verdict": l.show_verdict(&verdict),
            "fd_check": check,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("{shown}");
        println!("zero test: {}", verdict_text(&l, &verdict));
        if let Some(c) = &check {
            println!(
                "fd check: {} (max discrepancy {:.3e}, tolerance {:.1e}, {} points)",
                if c.passed { "pass" } else { "FAIL" },
                c.max_discrepancy,
                c.tolerance,
                c.samples.len()
            );
        }
    }
    Ok(match check {
        Some(c) if !c.passed => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    })
}

fn print_report(l: &Loaded, report: &HarmonicityReport, json: bool, header: bool) {
    if json {
        let mut value = serde_json::to_value(report).expect("json");
        value["function"] = json!(l.show(l.function.expr()).to_string());
        for (slot, o) in value["orders"].as_array_mut().expect("orders").iter_mut().zip(&report.orders) {
            slot["residual"] = json!(l.show(&o.residual).to_string());
            slot["verdict"] = serde_json::to_value(l.show_verdict(&o.verdict)).expect("json");
        }
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        return;
    }
    if header {
        println!("function: {}", l.show(l.function.expr()));
    }
    println!("geometry: {}", report.geometry);
    for o in &report.orders {
        println!("order {}: {}", o.order, verdict_text(l, &o.verdict));
    }
    println!("classification: {}", report.classification);
}

fn cmd_classify(input: &Input, max_order: usize) -> CliResult {
    let l = load(input)?;
    let cfg = input.sampling.zero_config();
    let report = almansi::classify(&l.function, &l.geometry, max_order, &cfg).map_err(|e| e.to_string())?;
    print_report(&l, &report, input.sampling.json, true);
    Ok(ExitCode::SUCCESS)
}

fn cmd_almansi(input: &Input, power: usize, c1: f64, c2: f64) -> CliResult {
    let mut l = load(input)?;
    if power < 1 {
        return Err("--power must be at least 1".into());
    }
    let lifted = match (&l.function, &l.geometry) {
        (FunctionValue::Expr(e), Geometry::SemiEuclidean { .. }) => {
            FunctionValue::Expr(almansi::almansi_tower(e, &l.geometry, power, c1, c2).map_err(|e| e.to_string())?)
        }
        _ => {
            let mut f = l.function.clone();
            for _ in 0..power {
                f = almansi::almansi_lift(&f, &l.geometry, c1, c2).map_err(|e| e.to_string())?;
            }
            f
        }
    };
    l.function = lifted;
    let cfg = input.sampling.zero_config();
    let report = almansi::classify(&l.function, &l.geometry, power + 2, &cfg).map_err(|e| e.to_string())?;
    if !input.sampling.json {
        println!("{}", l.show(l.function.expr()));
    }
    print_report(&l, &report, input.sampling.json, false);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(sampling: &Sampling, inject_fault: Option<String>) -> CliResult {
    let cfg = sampling.zero_config();
    let opts = VerifyOptions { seed: cfg.seed, samples: cfg.samples, tolerance: cfg.tolerance, inject_fault };
    let report = verify::verify_paper(&opts).map_err(|e| e.to_string())?;
    if sampling.json {
        println!("{}", report.to_json());
    } else {
        for c in &report.checks {
            let verdict = match c.verdict {
                CheckVerdict::Pass => "pass",
                CheckVerdict::Fail => "FAIL",
                CheckVerdict::EvidenceOnly => "evidence-only",
            };
            println!("{} {:<40} {:<13} max|res| {:.3e} {:>6} ms", c.id, c.anchor, verdict, c.max_abs_residual, c.ms);
            if c.verdict == CheckVerdict::Fail && !c.detail.is_empty() {
                println!("    {}", c.detail);
            }
        }
        let failed = report.checks.iter().filter(|c| c.verdict == CheckVerdict::Fail).count();
        println!("{} checks, {failed} failed", report.checks.len());
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(text: &str, json: bool) -> CliResult {
    let g = load_geometry(text)?;
    let report = geometry::validate(&g).map_err(|e| e.to_string())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        println!("geometry: {g}");
        for e in &report.entries {
            println!(
                "{:<12} required {:<4} measured {:<12.6e} {}",
                e.condition,
                e.required,
                e.measured,
                if e.passed { "ok" } else { "FAIL" }
            );
        }
        println!("{}", if report.passed() { "valid" } else { "invalid" });
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Laplacian { input, order, fd_check } => cmd_laplacian(&input, order, fd_check),
        Command::Classify { input, max_order } => cmd_classify(&input, max_order),
        Command::Almansi { input, power, c1, c2 } => cmd_almansi(&input, power, c1, c2),
        Command::VerifyPaper { sampling, inject_fault } => cmd_verify(&sampling, inject_fault),
        Command::ValidateGeometry { geometry, json } => cmd_validate(&geometry, json),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        ExitCode::from(2)
    })
}
