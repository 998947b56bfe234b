//! Python bindings: a `MetricSpace` class plus the decision, similarity,
//! `d+` and generator operations. Reports come back as plain dicts;
//! distances come back as `fractions.Fraction`.

use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat};
use serde::Serialize;

use ultrastar::generate::GeneratorMode;
use ultrastar::io::to_json;
use ultrastar::{FiniteMetricSpace, GeneratorSpec, LabeledStarGraph, ModelName, Rational};

fn err(e: ultrastar::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

/// Accepts ints, strings ("1/2", "0.25") and `Fraction`s; floats are refused.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("floats are not exact; pass a str, int or Fraction"));
    }
    let text = obj.str()?.to_string();
    text.parse().map_err(|e: ultrastar::rational::ParseRationalError| PyValueError::new_err(e.to_string()))
}

fn rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(rational).collect()
}

/// A finite metric space with exact rational distances.
#[pyclass(name = "MetricSpace", module = "ultrastar_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: FiniteMetricSpace,
}

impl From<FiniteMetricSpace> for PySpace {
    fn from(inner: FiniteMetricSpace) -> Self {
        PySpace { inner }
    }
}

#[pymethods]
impl PySpace {
    #[new]
    fn new(points: Vec<String>, dist: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let rows = dist.iter().map(|r| rationals(r)).collect::<PyResult<Vec<_>>>()?;
        FiniteMetricSpace::new(points, rows).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ultrastar::parse_space_str(text, ultrastar::SpaceFormat::Json).map(Into::into).map_err(err)
    }

    /// Loads a `.json` or `.csv` space file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        ultrastar::parse_space_file(path).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn model(name: &str) -> PyResult<Self> {
        let name: ModelName = name.parse().map_err(|e: String| PyValueError::new_err(e))?;
        Ok(name.space().into())
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.inner.points().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &PySpace) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace({:?})", self.inner.points())
    }

    fn distance<'py>(&self, py: Python<'py>, a: &str, b: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.distance(a, b).map_err(err)?)
    }

    fn diameter<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.diameter())
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.validate())
    }

    fn is_ultrametric(&self) -> bool {
        self.inner.is_ultrametric()
    }

    fn restrict(&self, subset: Vec<String>) -> PyResult<PySpace> {
        self.inner.restrict(&subset).map(Into::into).map_err(err)
    }

    fn adjoin_near(&self, anchor: &str, eps: &Bound<'_, PyAny>) -> PyResult<PySpace> {
        self.inner.adjoin_near(anchor, &rational(eps)?).map(Into::into).map_err(err)
    }
}

#[pyfunction]
fn diagnose<'py>(py: Python<'py>, space: &PySpace) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ultrastar::diagnose(&space.inner).map_err(err)?)
}

#[pyfunction]
fn find_center(space: &PySpace) -> PyResult<Option<String>> {
    Ok(ultrastar::find_center(&space.inner).map_err(err)?.map(|c| c.center))
}

#[pyfunction]
fn forbidden_scan<'py>(py: Python<'py>, space: &PySpace) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ultrastar::forbidden_scan(&space.inner).map_err(err)?)
}

#[pyfunction]
fn classify_four_point(space: &PySpace) -> PyResult<String> {
    Ok(ultrastar::classify_four_point(&space.inner).map_err(err)?.to_string())
}

#[pyfunction]
fn shift(space: &PySpace, delta: &Bound<'_, PyAny>) -> PyResult<PySpace> {
    ultrastar::shift(&space.inner, &rational(delta)?).map(Into::into).map_err(err)
}

#[pyfunction]
fn unshift(space: &PySpace, delta: &Bound<'_, PyAny>) -> PyResult<PySpace> {
    ultrastar::unshift(&space.inner, &rational(delta)?).map(Into::into).map_err(err)
}

#[pyfunction]
fn weakly_similar<'py>(py: Python<'py>, a: &PySpace, b: &PySpace) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ultrastar::weakly_similar(&a.inner, &b.inner).map_err(err)?)
}

/// The first isometry as a `{point: image}` dict, or None.
#[pyfunction]
fn are_isometric<'py>(py: Python<'py>, a: &PySpace, b: &PySpace) -> PyResult<Option<Bound<'py, PyDict>>> {
    let Some(map) = ultrastar::are_isometric(&a.inner, &b.inner).map_err(err)? else { return Ok(None) };
    let dict = PyDict::new(py);
    for (x, y) in &map.pairs {
        dict.set_item(x, y)?;
    }
    Ok(Some(dict))
}

#[pyfunction]
fn dplus_space(values: Vec<Bound<'_, PyAny>>) -> PyResult<PySpace> {
    ultrastar::dplus_space(&rationals(&values)?).map(Into::into).map_err(err)
}

#[pyfunction]
fn embeds_in_dplus<'py>(py: Python<'py>, space: &PySpace) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ultrastar::embeds_in_dplus(&space.inner))
}

/// Metric of the star with the given center label and `{leaf: label}`.
#[pyfunction]
fn star_metric(center: &str, center_label: &Bound<'_, PyAny>, leaves: Vec<(String, Bound<'_, PyAny>)>) -> PyResult<PySpace> {
    let leaves = leaves.iter().map(|(k, v)| Ok((k.clone(), rational(v)?))).collect::<PyResult<Vec<_>>>()?;
    let star = LabeledStarGraph::new(center, rational(center_label)?, leaves).map_err(err)?;
    star.star_metric().map(Into::into).map_err(err)
}

#[pyfunction]
fn star_from_center<'py>(py: Python<'py>, space: &PySpace, center: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ultrastar::star_from_center(&space.inner, center).map_err(err)?)
}

fn parse_mode(mode: &str) -> PyResult<GeneratorMode> {
    mode.parse().map_err(|e: String| PyValueError::new_err(e))
}

#[pyfunction]
fn enumerate_ultrametrics(n: usize, alphabet: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<PySpace>> {
    let spec = GeneratorSpec::exhaustive(n, rationals(&alphabet)?);
    Ok(ultrastar::enumerate_ultrametrics(&spec).map_err(err)?.map(Into::into).collect())
}

#[pyfunction]
#[pyo3(signature = (n, alphabet, seed, index = 0))]
fn sample_dendrogram(n: usize, alphabet: Vec<Bound<'_, PyAny>>, seed: u64, index: u64) -> PyResult<PySpace> {
    let spec = GeneratorSpec::dendrogram(n, rationals(&alphabet)?, seed, 1);
    ultrastar::sample_dendrogram_at(&spec, index).map(Into::into).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (which, n, alphabet, mode = "dendrogram", seed = 0, count = None, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn run_campaign<'py>(
    py: Python<'py>,
    which: &str,
    n: usize,
    alphabet: Vec<Bound<'_, PyAny>>,
    mode: &str,
    seed: u64,
    count: Option<u64>,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = GeneratorSpec { n, alphabet: rationals(&alphabet)?, mode: parse_mode(mode)?, seed, count, unbounded: false };
    let which: ultrastar::ConjectureId = which.parse().map_err(err)?;
    let report = py.detach(|| ultrastar::run_campaign(&spec, which, jobs)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn ultrastar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySpace>()?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(find_center, m)?)?;
    m.add_function(wrap_pyfunction!(forbidden_scan, m)?)?;
    m.add_function(wrap_pyfunction!(classify_four_point, m)?)?;
    m.add_function(wrap_pyfunction!(shift, m)?)?;
    m.add_function(wrap_pyfunction!(unshift, m)?)?;
    m.add_function(wrap_pyfunction!(weakly_similar, m)?)?;
    m.add_function(wrap_pyfunction!(are_isometric, m)?)?;
    m.add_function(wrap_pyfunction!(dplus_space, m)?)?;
    m.add_function(wrap_pyfunction!(embeds_in_dplus, m)?)?;
    m.add_function(wrap_pyfunction!(star_metric, m)?)?;
    m.add_function(wrap_pyfunction!(star_from_center, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_ultrametrics, m)?)?;
    m.add_function(wrap_pyfunction!(sample_dendrogram, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    Ok(())
}
