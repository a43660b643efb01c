//! Python bindings for `riesz-core`.
//!
//! Build with `maturin build --release` (see `pyproject.toml`); the module
//! is importable as `riesz`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde::Serialize;
use serde_json::Value;

use riesz_core::io::{read_config_csv, report_to_json, write_config_csv};
use riesz_core::{analysis, energy, geometry, optimizer, potential, specfun};
use riesz_core::{
    Error, GammaForm, Hyp2F1Params, OptimizerConfig, Point, RadialQuery, RieszParams,
};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Parse { .. } => PyIOError::new_err(e.to_string()),
        e if e.is_numeric_domain() => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for riesz_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// JSON value to plain Python objects (dict / list / float / int / str / None).
pub fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn gamma_form(form: &str) -> PyResult<GammaForm> {
    match form {
        "direct" => Ok(GammaForm::Direct),
        "boundary_limit" => Ok(GammaForm::BoundaryLimit),
        other => Err(PyValueError::new_err(format!(
            "form must be 'direct' or 'boundary_limit', got {other:?}"
        ))),
    }
}

/// Points on `S^d`, stored as an `N x (d+1)` array.
#[pyclass(name = "Configuration", module = "riesz", frozen)]
pub struct PyConfiguration {
    inner: geometry::Configuration,
}

#[pymethods]
impl PyConfiguration {
    #[new]
    fn new(d: usize, points: Vec<Vec<f64>>) -> PyResult<Self> {
        let pts = points.into_iter().map(Point::new).collect();
        Ok(Self {
            inner: geometry::Configuration::new(d, pts).py()?,
        })
    }

    #[staticmethod]
    fn roots_of_unity(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: geometry::roots_of_unity(n).py()?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (d, n, seed = 0))]
    fn random_uniform(d: usize, n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: geometry::random_uniform(d, n, seed).py()?,
        })
    }

    #[staticmethod]
    fn read_csv(path: PathBuf, d: usize) -> PyResult<Self> {
        Ok(Self {
            inner: read_config_csv(&path, d).py()?,
        })
    }

    fn write_csv(&self, path: PathBuf) -> PyResult<()> {
        write_config_csv(&self.inner, &path).py()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim_d()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Configuration(d={}, n={})",
            self.inner.dim_d(),
            self.inner.len()
        )
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().map(<[f64]>::to_vec).collect()
    }

    /// `{"n", "min_distance", "pair", "scaled"}`
    fn min_separation<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &geometry::min_separation(&self.inner))
    }

    /// `{"total", "per_point", "grad_tangent_norm"}` over ordered pairs.
    fn energy<'py>(&self, py: Python<'py>, s: f64) -> PyResult<Bound<'py, PyAny>> {
        let p = RieszParams::new(self.inner.dim_d(), s).py()?;
        to_dict(py, &energy::riesz_energy(&self.inner, &p).py()?)
    }

    fn gradient(&self, s: f64) -> PyResult<Vec<Vec<f64>>> {
        let p = RieszParams::new(self.inner.dim_d(), s).py()?;
        Ok(energy::riesz_gradient(&self.inner, &p)
            .py()?
            .into_iter()
            .map(|g| g.0)
            .collect())
    }

    /// `N^{-1} sum_i |x - x_i|^{-s}`
    fn potential(&self, s: f64, x: Vec<f64>) -> PyResult<f64> {
        let p = RieszParams::new(self.inner.dim_d(), s).py()?;
        potential::discrete_potential(&self.inner, &p, &Point::new(x)).py()
    }
}

#[pyclass(name = "OptimizationResult", module = "riesz", frozen, get_all)]
pub struct PyOptimizationResult {
    config: Py<PyConfiguration>,
    energy: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    restart_index: usize,
    consensus: usize,
    trace: Vec<f64>,
}

#[pymethods]
impl PyOptimizationResult {
    fn __repr__(&self) -> String {
        format!(
            "OptimizationResult(energy={:.12e}, grad_norm={:.3e}, iterations={}, converged={}, consensus={})",
            self.energy, self.grad_norm, self.iterations, self.converged, self.consensus
        )
    }
}

fn optimizer_config(
    max_iters: usize,
    grad_tol: f64,
    restarts: usize,
    seed: u64,
) -> OptimizerConfig {
    OptimizerConfig {
        max_iters,
        grad_tol,
        restarts,
        seed,
        ..Default::default()
    }
}

fn wrap_result(py: Python<'_>, r: optimizer::OptimizationResult) -> PyResult<PyOptimizationResult> {
    Ok(PyOptimizationResult {
        config: Py::new(py, PyConfiguration { inner: r.config })?,
        energy: r.energy,
        grad_norm: r.grad_norm,
        iterations: r.iterations,
        converged: r.converged,
        restart_index: r.restart_index,
        consensus: r.consensus,
        trace: r.trace,
    })
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specfun::gamma_fn(x).py()
}

#[pyfunction]
fn pochhammer(a: f64, n: u32) -> f64 {
    specfun::pochhammer(a, n)
}

/// `2F1(a, b; c; z)` for `z` in `[0, 1]`; returns `(value, abs_error, method)`.
#[pyfunction]
fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> PyResult<(f64, f64, &'static str)> {
    let r = specfun::hyp2f1(Hyp2F1Params::new(a, b, c).py()?, z).py()?;
    let method = match r.method {
        specfun::EvalMethod::Series => "series",
        specfun::EvalMethod::EulerIntegral => "euler_integral",
        specfun::EvalMethod::GaussSummation => "gauss_summation",
    };
    Ok((r.value, r.abs_error_estimate, method))
}

#[pyfunction]
fn hyp2f1_derivative(a: f64, b: f64, c: f64, z: f64) -> PyResult<f64> {
    specfun::hyp2f1_derivative(Hyp2F1Params::new(a, b, c).py()?, z).py()
}

#[pyfunction]
#[pyo3(signature = (d, s, form = "direct"))]
fn gamma_const(d: usize, s: f64, form: &str) -> PyResult<f64> {
    energy::gamma_const(d, s, gamma_form(form)?).py()
}

#[pyfunction]
fn energy_upper_bound(d: usize, s: f64, n: usize) -> PyResult<f64> {
    energy::energy_upper_bound(d, s, n).py()
}

/// Potential of the uniform measure at `|x| = radius`. `method` is one of
/// `closed`, `elementary`, `quadrature`, `montecarlo`; returns a dict with
/// `value`, `method`, `abs_error_estimate`.
#[pyfunction]
#[pyo3(signature = (d, s, radius, method = "closed", samples = 1_000_000, seed = 0))]
fn uniform_potential<'py>(
    py: Python<'py>,
    d: usize,
    s: f64,
    radius: f64,
    method: &str,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let q = RadialQuery::new(d, s, radius).py()?;
    let v = match method {
        "closed" if radius == 1.0 => potential::uniform_potential_boundary(d, s),
        "closed" => potential::uniform_potential_closed(q),
        "elementary" if d == 2 => potential::uniform_potential_elementary_d2(s, radius),
        "elementary" => {
            return Err(PyValueError::new_err(
                "elementary form exists only for d = 2",
            ));
        }
        "quadrature" => potential::uniform_potential_quadrature(q),
        "montecarlo" => py.detach(|| potential::uniform_potential_montecarlo(q, samples, seed)),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .py()?;
    to_dict(py, &v)
}

#[pyfunction]
#[pyo3(signature = (d, s, n, max_iters = 5000, grad_tol = 1e-10, restarts = 8, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn minimize(
    py: Python<'_>,
    d: usize,
    s: f64,
    n: usize,
    max_iters: usize,
    grad_tol: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<PyOptimizationResult> {
    let cfg = optimizer_config(max_iters, grad_tol, restarts, seed);
    let r = py.detach(|| optimizer::minimize(d, s, n, &cfg)).py()?;
    wrap_result(py, r)
}

#[pyfunction]
#[pyo3(signature = (config, s, max_iters = 5000, grad_tol = 1e-10))]
fn polish(
    py: Python<'_>,
    config: &PyConfiguration,
    s: f64,
    max_iters: usize,
    grad_tol: f64,
) -> PyResult<PyOptimizationResult> {
    let p = RieszParams::new(config.inner.dim_d(), s).py()?;
    let cfg = optimizer_config(max_iters, grad_tol, 1, 0);
    let c = config.inner.clone();
    let r = py.detach(|| optimizer::polish(&c, &p, &cfg)).py()?;
    wrap_result(py, r)
}

#[pyfunction]
fn verify_lemma4<'py>(py: Python<'py>, d: usize, s: f64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &analysis::verify_lemma4(d, s, n).py()?)
}

#[pyfunction]
fn node_field_check<'py>(
    py: Python<'py>,
    config: &PyConfiguration,
    s: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = RieszParams::new(config.inner.dim_d(), s).py()?;
    to_dict(py, &analysis::node_field_check(&config.inner, &p).py()?)
}

/// Runs the separation sweep and returns the JSON report as a string.
#[pyfunction]
#[pyo3(signature = (d, s, n_list, max_iters = 5000, grad_tol = 1e-10, restarts = 8, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn separation_sweep(
    py: Python<'_>,
    d: usize,
    s: f64,
    n_list: Vec<usize>,
    max_iters: usize,
    grad_tol: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<String> {
    let cfg = optimizer_config(max_iters, grad_tol, restarts, seed);
    py.detach(|| {
        let report = analysis::separation_sweep(d, s, &n_list, &cfg)?;
        report_to_json(&report)
    })
    .py()
}

#[pymodule]
fn riesz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfiguration>()?;
    m.add_class::<PyOptimizationResult>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_const, m)?)?;
    m.add_function(wrap_pyfunction!(energy_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_potential, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(polish, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma4, m)?)?;
    m.add_function(wrap_pyfunction!(node_field_check, m)?)?;
    m.add_function(wrap_pyfunction!(separation_sweep, m)?)?;
    Ok(())
}
