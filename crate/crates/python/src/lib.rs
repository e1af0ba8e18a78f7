//! Python bindings for the Almansi engine.

use std::collections::BTreeMap;

use almansi_core::almansi::{self as core_almansi, Classification, HarmonicityReport};
use almansi_core::expr::{self, Assignment, Expr, ZeroTestConfig};
use almansi_core::geometry::{self, Geometry as CoreGeometry};
use almansi_core::operators::{self, FunctionValue};
use almansi_core::verify::{verify_paper, VerifyOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Expression", module = "almansi", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpression {
    inner: Expr,
}

#[pymethods]
impl PyExpression {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyExpression { inner: expr::parse(text).map_err(err)? })
    }

    fn simplify(&self) -> Self {
        PyExpression { inner: expr::simplify(&self.inner) }
    }

    fn diff(&self, var: &str) -> Self {
        PyExpression { inner: expr::differentiate(&self.inner, var) }
    }

    /// Evaluates at the given variable values.
    #[pyo3(signature = (values=None))]
    fn evaluate(&self, values: Option<BTreeMap<String, f64>>) -> PyResult<f64> {
        let a: Assignment = values.unwrap_or_default().into_iter().collect();
        expr::evaluate(&self.inner, &a).map_err(err)
    }

    fn free_vars(&self) -> Vec<String> {
        self.inner.free_vars().into_iter().collect()
    }

    /// `"ProvenZero"`, `"NumericallyZero"` or `"NonZero"`.
    #[pyo3(signature = (geometry=None))]
    fn zero_verdict(&self, geometry: Option<&PyGeometry>) -> PyResult<String> {
        let base = ZeroTestConfig::default();
        let cfg = geometry.map_or(base.clone(), |g| g.inner.zero_config(&base));
        Ok(expr::is_zero(&self.inner, &cfg).map_err(err)?.kind().to_string())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expression('{}')", self.inner)
    }
}

#[pyclass(name = "Geometry", module = "almansi", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGeometry {
    inner: CoreGeometry,
}

#[pymethods]
impl PyGeometry {
    /// Catalog lookup, e.g. `Geometry.catalog("spherical-join(3,3)")`.
    #[staticmethod]
    fn catalog(text: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: geometry::parse_catalog(text).map_err(err)? })
    }

    /// Parses the key/value geometry spec format.
    #[staticmethod]
    fn from_spec(text: &str) -> PyResult<Self> {
        Ok(PyGeometry { inner: geometry::parse_spec(text).map_err(err)? })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.coordinates()
    }

    /// `(passed, [(condition, required, measured, passed), ...])`.
    fn validate(&self) -> PyResult<(bool, Vec<(String, f64, f64, bool)>)> {
        let report = geometry::validate(&self.inner).map_err(err)?;
        let entries = report.entries.iter().map(|e| (e.condition.clone(), e.required, e.measured, e.passed)).collect();
        Ok((report.passed(), entries))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Geometry('{}')", self.inner)
    }
}

#[pyclass(name = "Report", module = "almansi", frozen)]
struct PyReport {
    inner: HarmonicityReport,
}

#[pymethods]
impl PyReport {
    /// Text form such as `"proper 2-harmonic"`.
    #[getter]
    fn classification(&self) -> String {
        self.inner.classification.to_string()
    }

    /// The harmonic order, or `None` when no order up to the cap vanished.
    #[getter]
    fn order(&self) -> Option<usize> {
        match self.inner.classification {
            Classification::NotHarmonicUpTo(_) => None,
            ref c => c.order(),
        }
    }

    #[getter]
    fn proper(&self) -> bool {
        matches!(self.inner.classification, Classification::ProperSHarmonic(_))
    }

    /// Zero-test verdict kind for `F, Delta F, ...`.
    #[getter]
    fn verdicts(&self) -> Vec<String> {
        self.inner.orders.iter().map(|o| o.verdict.kind().to_string()).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("report serialises")
    }

    fn __repr__(&self) -> String {
        format!("Report('{}')", self.inner.classification)
    }
}

/// Accepts an `Expression` or a string.
#[derive(FromPyObject)]
enum ExprArg {
    Expr(PyExpression),
    Text(String),
}

fn function(f: ExprArg, g: &CoreGeometry, lam: Option<f64>, mu: Option<f64>) -> PyResult<(FunctionValue, bool)> {
    let e = match f {
        ExprArg::Expr(e) => e.inner,
        ExprArg::Text(t) => expr::parse(&t).map_err(err)?,
    };
    let (e, aliased) = geometry::resolve_aliases(&e, g);
    operators::check_variables(&e, g).map_err(err)?;
    let value = match (lam, mu) {
        (None, None) => FunctionValue::Expr(e),
        (l, m) => core_almansi::separated(e, l.unwrap_or(0.0), m.unwrap_or(0.0)).map_err(err)?,
    };
    Ok((value, aliased))
}

fn output(e: &Expr, g: &CoreGeometry, aliased: bool) -> PyExpression {
    let inner = if aliased { geometry::restore_aliases(e, g) } else { e.clone() };
    PyExpression { inner }
}

/// `Delta^order F`; `lam`/`mu` make `F` the radial factor of a separated function.
#[pyfunction]
#[pyo3(signature = (f, geometry, order=1, lam=None, mu=None))]
fn laplacian(f: ExprArg, geometry: &PyGeometry, order: usize, lam: Option<f64>, mu: Option<f64>) -> PyResult<PyExpression> {
    let g = &geometry.inner;
    let (value, aliased) = function(f, g, lam, mu)?;
    let result = operators::iterated_laplacian(&value, g, order).map_err(err)?;
    Ok(output(&result, g, aliased))
}

#[pyfunction]
#[pyo3(signature = (f, geometry, max_order=3, lam=None, mu=None, seed=None))]
fn classify(
    f: ExprArg,
    geometry: &PyGeometry,
    max_order: usize,
    lam: Option<f64>,
    mu: Option<f64>,
    seed: Option<u64>,
) -> PyResult<PyReport> {
    let (value, _) = function(f, &geometry.inner, lam, mu)?;
    let mut cfg = ZeroTestConfig::default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let inner = core_almansi::classify(&value, &geometry.inner, max_order, &cfg).map_err(err)?;
    Ok(PyReport { inner })
}

/// `H F` with `H = c1 |x|^2 + c2` (or `c1 r^2 + c2`).
#[pyfunction]
#[pyo3(signature = (f, geometry, c1=1.0, c2=0.0))]
fn lift(f: ExprArg, geometry: &PyGeometry, c1: f64, c2: f64) -> PyResult<PyExpression> {
    let g = &geometry.inner;
    let (value, aliased) = function(f, g, None, None)?;
    let lifted = core_almansi::almansi_lift(&value, g, c1, c2).map_err(err)?;
    Ok(output(lifted.expr(), g, aliased))
}

/// `H^s F` on semi-Euclidean space.
#[pyfunction]
#[pyo3(signature = (f, geometry, s, c1=1.0, c2=0.0))]
fn tower(f: ExprArg, geometry: &PyGeometry, s: usize, c1: f64, c2: f64) -> PyResult<PyExpression> {
    let g = &geometry.inner;
    let (value, aliased) = function(f, g, None, None)?;
    let t = core_almansi::almansi_tower(value.expr(), g, s, c1, c2).map_err(err)?;
    Ok(output(&t, g, aliased))
}

/// Runs the built-in check suite; returns `(passed, json_report)`.
#[pyfunction]
#[pyo3(signature = (seed=None, inject_fault=None))]
fn verify(seed: Option<u64>, inject_fault: Option<String>) -> PyResult<(bool, String)> {
    let mut opts = VerifyOptions { inject_fault, ..VerifyOptions::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let report = verify_paper(&opts).map_err(err)?;
    Ok((report.passed(), report.to_json()))
}

#[pymodule]
fn almansi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpression>()?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(tower, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
