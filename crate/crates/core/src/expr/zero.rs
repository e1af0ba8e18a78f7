use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{evaluate_with_bound, is_rational_zero, simplify, Assignment, Expr, ExprError};

/// Multiplier on the propagated rounding-error estimate. A sample counts as
/// nonzero only if it clears the absolute tolerance plus this many estimated
/// rounding errors.
pub const ROUNDING_SAFETY: f64 = 64.0;

/// Union of closed intervals a variable is sampled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRegion(pub Vec<(f64, f64)>);

impl SampleRegion {
    pub fn interval(lo: f64, hi: f64) -> SampleRegion {
        SampleRegion(vec![(lo, hi)])
    }

    /// Default region for the radial coordinate, inside `(0, pi/2)`.
    pub fn radial() -> SampleRegion {
        SampleRegion::interval(0.05, 1.45)
    }

    /// Default region for Cartesian coordinates, away from the coordinate
    /// hyperplanes.
    pub fn cartesian() -> SampleRegion {
        SampleRegion(vec![(-2.0, -0.1), (0.1, 2.0)])
    }

    fn validate(&self, var: &str) -> Result<(), ExprError> {
        if self.0.is_empty() {
            return Err(ExprError::InvalidConfig(format!("empty sampling region for `{var}`")));
        }
        for &(lo, hi) in &self.0 {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(ExprError::InvalidConfig(format!(
                    "interval [{lo}, {hi}] for `{var}` must have positive finite length"
                )));
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let total: f64 = self.0.iter().map(|(lo, hi)| hi - lo).sum();
        let mut t = rng.random::<f64>() * total;
        for &(lo, hi) in &self.0 {
            let len = hi - lo;
            if t <= len {
                return lo + t;
            }
            t -= len;
        }
        self.0.last().unwrap().1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTestConfig {
    pub samples: usize,
    /// Per-variable regions; variables not listed use `r` -> radial default,
    /// anything else -> Cartesian default.
    pub regions: BTreeMap<String, SampleRegion>,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 64,
            regions: BTreeMap::new(),
            tolerance: 1e-9,
            seed: 0x414C4D,
        }
    }
}

impl ZeroTestConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_region(mut self, var: &str, region: SampleRegion) -> Self {
        self.regions.insert(var.to_string(), region);
        self
    }

    pub fn region_for(&self, var: &str) -> SampleRegion {
        match self.regions.get(var) {
            Some(r) => r.clone(),
            None if var == "r" => SampleRegion::radial(),
            None => SampleRegion::cartesian(),
        }
    }

    pub fn validate(&self) -> Result<(), ExprError> {
        if self.samples == 0 {
            return Err(ExprError::InvalidConfig("sample count must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ExprError::InvalidConfig("tolerance must be positive".into()));
        }
        for (v, r) in &self.regions {
            r.validate(v)?;
        }
        Ok(())
    }

    /// Deterministic sample points for the given variables.
    pub fn sample_points(&self, vars: &[String]) -> Vec<Assignment> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let regions: Vec<SampleRegion> = vars.iter().map(|v| self.region_for(v)).collect();
        (0..self.samples)
            .map(|_| {
                vars.iter()
                    .zip(&regions)
                    .map(|(v, reg)| (v.clone(), reg.sample(&mut rng)))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ZeroVerdict {
    /// The rational canonical form has a zero numerator.
    ProvenZero,
    /// Every non-singular sample was within tolerance.
    NumericallyZero { max_abs: f64, samples: usize },
    /// A sample where the value clearly does not vanish.
    NonZero { witness: Assignment, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ZeroVerdict::ProvenZero => "ProvenZero",
            ZeroVerdict::NumericallyZero { .. } => "NumericallyZero",
            ZeroVerdict::NonZero { .. } => "NonZero",
        }
    }

    /// Largest observed magnitude (0 for a proof).
    pub fn max_abs(&self) -> f64 {
        match self {
            ZeroVerdict::ProvenZero => 0.0,
            ZeroVerdict::NumericallyZero { max_abs, .. } => *max_abs,
            ZeroVerdict::NonZero { value, .. } => value.abs(),
        }
    }
}

/// Two-tier zero test: exact rational canonicalisation when `e` is rational,
/// otherwise seeded sampling.
///
/// A sample is nonzero when `|e| > tolerance + ROUNDING_SAFETY * err`, where
/// `err` is the rounding error propagated through the evaluation; this keeps
/// large cancelling terms near a pole from producing false witnesses.
pub fn is_zero(e: &Expr, cfg: &ZeroTestConfig) -> Result<ZeroVerdict, ExprError> {
    is_zero_with(e, cfg, &|_| Ok(()))
}

/// Like [`is_zero`], but every sample point is passed through `extend` before
/// evaluation. This lets a caller bind variables that are functions of the
/// sampled ones (for instance a numerically integrated profile). Points where
/// `extend` fails are treated as singular.
pub fn is_zero_with(
    e: &Expr,
    cfg: &ZeroTestConfig,
    extend: &dyn Fn(&mut Assignment) -> Result<(), ExprError>,
) -> Result<ZeroVerdict, ExprError> {
    cfg.validate()?;
    if simplify(e).is_literal_zero() {
        return Ok(ZeroVerdict::ProvenZero);
    }
    if is_rational_zero(e) == Some(true) {
        return Ok(ZeroVerdict::ProvenZero);
    }
    let vars: Vec<String> = e.free_vars().into_iter().collect();
    let mut max_abs: f64 = 0.0;
    let mut valid = 0usize;
    for mut point in cfg.sample_points(&vars) {
        if extend(&mut point).is_err() {
            continue;
        }
        match evaluate_with_bound(e, &point) {
            Ok((v, err)) => {
                valid += 1;
                if v.abs() > cfg.tolerance + ROUNDING_SAFETY * err {
                    return Ok(ZeroVerdict::NonZero { witness: point, value: v });
                }
                max_abs = max_abs.max(v.abs());
            }
            Err(err @ ExprError::UnboundVariable(_)) => return Err(err),
            Err(_) => {}
        }
    }
    if valid == 0 {
        return Err(ExprError::AllSamplesSingular { attempted: cfg.samples });
    }
    Ok(ZeroVerdict::NumericallyZero { max_abs, samples: valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{differentiate, evaluate, parse, simplify};

    #[test]
    fn planar_laplacian_of_quotient_is_proven_zero() {
        let f = parse("x/(x^2+y^2)").unwrap();
        let lap = simplify(&(differentiate(&differentiate(&f, "x"), "x") + differentiate(&differentiate(&f, "y"), "y")));
        assert_eq!(is_zero(&lap, &ZeroTestConfig::default()).unwrap(), ZeroVerdict::ProvenZero);
    }

    #[test]
    fn counterexample_residual_has_witness() {
        let e = parse("64*cot(2*r)*csc(2*r)^4*(sin(4*r) - 4*r)").unwrap();
        let cfg = ZeroTestConfig::default();
        match is_zero(&e, &cfg).unwrap() {
            ZeroVerdict::NonZero { witness, value } => {
                assert!(value.abs() > cfg.tolerance);
                assert_eq!(evaluate(&e, &witness).unwrap(), value);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pythagorean_identity_is_numerically_zero() {
        let e = parse("sin(r)^2 + cos(r)^2 - 1").unwrap();
        assert!(matches!(
            is_zero(&e, &ZeroTestConfig::default()).unwrap(),
            ZeroVerdict::NumericallyZero { samples: 64, .. }
        ));
    }

    #[test]
    fn all_singular_is_an_error() {
        let e = parse("ln(-1 - r^2)").unwrap();
        assert!(matches!(
            is_zero(&e, &ZeroTestConfig::default()),
            Err(ExprError::AllSamplesSingular { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ZeroTestConfig::default();
        cfg.samples = 0;
        assert!(is_zero(&Expr::var("r"), &cfg).is_err());
        let cfg = ZeroTestConfig { tolerance: 0.0, ..ZeroTestConfig::default() };
        assert!(is_zero(&Expr::var("r"), &cfg).is_err());
        let cfg = ZeroTestConfig::default().with_region("r", SampleRegion::interval(1.0, 1.0));
        assert!(is_zero(&Expr::var("r"), &cfg).is_err());
    }

    #[test]
    fn seed_is_reproducible() {
        let e = parse("x - y").unwrap();
        let cfg = ZeroTestConfig::default().with_seed(7);
        assert_eq!(is_zero(&e, &cfg).unwrap(), is_zero(&e, &cfg).unwrap());
    }
}
