//! Python bindings: problems, methods, convergence checks, achievability
//! and the statistical and Bayesian simulations.
//!
//! Structured results come back as plain dicts and lists, with the same
//! shape as the CLI's JSON reports.

use convlab::bayes::{bayes_consistency_sim, consistency_verdict, DiscretePrior};
use convlab::convergence::{self, Mode};
use convlab::numeric::{parse_rational, parse_ratio_u64};
use convlab::problem::{builtin_problem, World};
use convlab::statistics::{
    decile_grid, hoeffding_sample_size as hoeffding, monte_carlo_consistency, progressiveness_curve,
    ConsistencySpec, Estimator, TestMethod, Urn, DEFAULT_DROP_TOLERANCE,
};
use convlab::{dsl, methods, EmpiricalProblem, InferenceMethod};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: convlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A number given as text (`"1/4"`, `"0.1"`) or as a Python number.
#[derive(FromPyObject)]
enum Num {
    Text(String),
    Int(u64),
    Float(f64),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Text(s) => s.clone(),
            Num::Int(i) => i.to_string(),
            Num::Float(f) => f.to_string(),
        }
    }
}

fn text_or(n: Option<Num>, default: &str) -> String {
    n.map_or_else(|| default.to_string(), |n| n.text())
}

fn enum_arg<T: serde::de::DeserializeOwned>(name: &str, what: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what} `{name}`")))
}

fn diagnostics(text: &str, diags: &[dsl::Diagnostic]) -> PyErr {
    let rendered: String = diags.iter().map(|d| d.render(text, "<input>")).collect();
    PyValueError::new_err(rendered)
}

/// An empirical problem: an alphabet, hypotheses and a truth automaton.
#[pyclass(frozen, name = "Problem", module = "convlab_py")]
struct PyProblem {
    inner: EmpiricalProblem,
}

#[pymethods]
impl PyProblem {
    /// `raven` or `first_observation`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        builtin_problem(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no built-in problem `{name}`")))
    }

    /// The problem named `name` in `.cvl` source, or the only one.
    #[staticmethod]
    #[pyo3(signature = (text, name = None))]
    fn from_dsl(text: &str, name: Option<&str>) -> PyResult<Self> {
        let e = dsl::compile(text).map_err(|d| diagnostics(text, &d))?;
        pick(e.problems, name, |p| &p.name, "problem").map(|inner| Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner.alphabet.names().to_vec()
    }

    #[getter]
    fn hypotheses(&self) -> Vec<String> {
        self.inner.hypotheses.iter().map(|h| h.label.clone()).collect()
    }

    /// Truth of the world `prefix` followed by `cycle` repeated forever.
    fn truth(&self, prefix: Vec<String>, cycle: Vec<String>) -> PyResult<String> {
        let w = self.inner.world(&prefix, &cycle).map_err(err)?;
        let h = self.inner.truth_of_world(&w).map_err(err)?;
        Ok(self.inner.hypothesis(h).label.clone())
    }

    /// Hypotheses still possibly true after `evidence`.
    fn possible_truths(&self, evidence: Vec<String>) -> PyResult<Vec<String>> {
        let e = self.inner.evidence(&evidence).map_err(err)?;
        let set = self.inner.possible_truths(&e.0).map_err(err)?;
        Ok(set.into_iter().map(|h| self.inner.hypothesis(h).label.clone()).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?}, states={})", self.inner.name, self.inner.truth.len())
    }
}

/// A finite-state inference method.
#[pyclass(frozen, name = "Method", module = "convlab_py")]
struct PyMethod {
    inner: InferenceMethod,
}

#[pymethods]
impl PyMethod {
    /// `ordinary_induction`, `skeptic`, `delayed_induction:K` or
    /// `occasional_counterinduction:D1,D2,...`.
    #[staticmethod]
    fn builtin(spec: &str) -> PyResult<Self> {
        methods::builtin_method(spec)
            .map_err(err)?
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no built-in method `{spec}`")))
    }

    #[staticmethod]
    #[pyo3(signature = (text, name = None))]
    fn from_dsl(text: &str, name: Option<&str>) -> PyResult<Self> {
        let e = dsl::compile(text).map_err(|d| diagnostics(text, &d))?;
        pick(e.methods, name, |m| &m.name, "method").map(|inner| Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// Name of the problem the method answers.
    #[getter]
    fn problem(&self) -> String {
        self.inner.problem.clone()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.states.clone()
    }

    /// Outputs after each prefix of `evidence`, the empty one included.
    fn outputs(&self, problem: &PyProblem, evidence: Vec<String>) -> PyResult<Vec<String>> {
        let e = problem.inner.evidence(&evidence).map_err(err)?;
        let trace = self.inner.trace(&e.0).map_err(err)?;
        Ok(trace.into_iter().map(|o| o.render(&problem.inner)).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Method({:?}, states={})", self.inner.name, self.inner.len())
    }
}

fn pick<T>(items: Vec<T>, name: Option<&str>, key: impl Fn(&T) -> &String, what: &str) -> PyResult<T> {
    match name {
        Some(n) => items
            .into_iter()
            .find(|x| key(x) == n)
            .ok_or_else(|| PyValueError::new_err(format!("no {what} named `{n}`"))),
        None if items.len() == 1 => Ok(items.into_iter().next().expect("one item")),
        None => Err(PyValueError::new_err(format!("{} {what}s declared: pass a name", items.len()))),
    }
}

/// Problems and methods declared in `.cvl` source.
#[pyfunction]
fn compile(text: &str) -> PyResult<(Vec<PyProblem>, Vec<PyMethod>)> {
    let e = dsl::compile(text).map_err(|d| diagnostics(text, &d))?;
    Ok((
        e.problems.into_iter().map(|inner| PyProblem { inner }).collect(),
        e.methods.into_iter().map(|inner| PyMethod { inner }).collect(),
    ))
}

/// Canonical form of `.cvl` source.
#[pyfunction]
fn format_dsl(text: &str) -> PyResult<String> {
    dsl::parse(text).map(|d| dsl::print(&d)).map_err(|d| diagnostics(text, &d))
}

/// Verdict for one mode (`uniform`, `pointwise`, `stable`,
/// `stable_pointwise`). Failures carry a witness and whether it replays.
#[pyfunction]
#[pyo3(signature = (method, problem, mode = "stable_pointwise"))]
fn check<'py>(py: Python<'py>, method: &PyMethod, problem: &PyProblem, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let mode: Mode = mode.parse().map_err(PyValueError::new_err)?;
    let v = convergence::check(&method.inner, &problem.inner, mode).map_err(err)?;
    let out = to_py(py, &v.record(&problem.inner.alphabet))?;
    if !v.passed() {
        let ok = convergence::replay(&method.inner, &problem.inner, &v).map_err(err)?;
        out.set_item("replayed", ok)?;
    }
    Ok(out)
}

/// Achievability of each mode and the highest achievable one.
#[pyfunction]
fn achievability<'py>(py: Python<'py>, problem: &PyProblem) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &convergence::achievability(&problem.inner).map_err(err)?)
}

/// Smallest sample size meeting `(epsilon, delta)` by Hoeffding's bound.
#[pyfunction]
fn hoeffding_sample_size(epsilon: Num, delta: Num) -> PyResult<u64> {
    let spec = ConsistencySpec::parse(&epsilon.text(), &delta.text()).map_err(err)?;
    Ok(hoeffding(&spec))
}

/// Monte Carlo coverage over `p = 0.1, ..., 0.9`. `n` defaults to the
/// Hoeffding size.
#[pyfunction]
#[pyo3(signature = (seed, epsilon = None, delta = None, n = None, replicates = 10_000, estimator = "frequency"))]
fn consistency<'py>(
    py: Python<'py>,
    seed: u64,
    epsilon: Option<Num>,
    delta: Option<Num>,
    n: Option<u64>,
    replicates: u64,
    estimator: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = ConsistencySpec::parse(&text_or(epsilon, "0.1"), &text_or(delta, "0.05")).map_err(err)?;
    let estimator: Estimator = enum_arg(estimator, "estimator")?;
    let n = n.unwrap_or_else(|| hoeffding(&spec));
    let report = py
        .detach(|| monte_carlo_consistency(estimator, &decile_grid(), &spec, n, replicates, seed))
        .map_err(err)?;
    to_py(py, &report)
}

/// Chance that a test of `p > threshold` answers truly at each sample size.
#[pyfunction]
#[pyo3(signature = (seed, test = "frequency_threshold", p = None, threshold = None, n_grid = None, replicates = 20_000, drop_tolerance = DEFAULT_DROP_TOLERANCE))]
#[allow(clippy::too_many_arguments)]
fn progressiveness<'py>(
    py: Python<'py>,
    seed: u64,
    test: &str,
    p: Option<Num>,
    threshold: Option<Num>,
    n_grid: Option<Vec<u64>>,
    replicates: u64,
    drop_tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let test: TestMethod = enum_arg(test, "test")?;
    let urn = Urn::parse(&text_or(p, "0.6")).map_err(err)?;
    let t = parse_ratio_u64(&text_or(threshold, "1/2")).map_err(err)?;
    let grid = n_grid.unwrap_or_else(|| (10..=200).step_by(10).collect());
    let report = py
        .detach(|| progressiveness_curve(test, &urn, t, &grid, replicates, seed, drop_tolerance))
        .map_err(err)?;
    to_py(py, &report)
}

/// `geometric:K`, `uniform:K`, or a prior as JSON text.
fn prior(spec: &str) -> PyResult<DiscretePrior> {
    let size = |k: &str| {
        k.parse::<usize>()
            .map_err(|_| PyValueError::new_err(format!("bad truncation in `{spec}`")))
    };
    if let Some(k) = spec.strip_prefix("geometric:") {
        Ok(DiscretePrior::geometric(size(k)?))
    } else if let Some(k) = spec.strip_prefix("uniform:") {
        Ok(DiscretePrior::uniform_counterexamples(size(k)?))
    } else {
        DiscretePrior::from_json(spec).map_err(err)
    }
}

/// Credence in the truth of a raven world after each observation.
#[pyfunction]
#[pyo3(signature = (prefix, cycle, horizon = 10, prior_spec = "geometric:64"))]
fn posterior_trace<'py>(
    py: Python<'py>,
    prefix: Vec<String>,
    cycle: Vec<String>,
    horizon: usize,
    prior_spec: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let raven = convlab::problem::raven_problem();
    let w: World = raven.world(&prefix, &cycle).map_err(err)?;
    let tr = bayes_consistency_sim(&prior(prior_spec)?, &w, horizon).map_err(err)?;
    to_py(py, &tr)
}

/// Whether credence in the truth reaches `threshold` by `horizon` in every
/// raven world up to the given prefix length and period.
#[pyfunction]
#[pyo3(signature = (prior_spec = "geometric:64", horizon = 10, threshold = None, max_prefix = 6, max_period = 3))]
fn bayes_verdict<'py>(
    py: Python<'py>,
    prior_spec: &str,
    horizon: usize,
    threshold: Option<Num>,
    max_prefix: usize,
    max_period: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let t = parse_rational(&text_or(threshold, "0.99")).map_err(err)?;
    let p = prior(prior_spec)?;
    let v = py
        .detach(|| consistency_verdict(&p, horizon, &t, max_prefix, max_period))
        .map_err(err)?;
    to_py(py, &v)
}

#[pymodule]
fn convlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("PRNG_ID", convlab::rng::PRNG_ID)?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyMethod>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(format_dsl, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(achievability, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(consistency, m)?)?;
    m.add_function(wrap_pyfunction!(progressiveness, m)?)?;
    m.add_function(wrap_pyfunction!(posterior_trace, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_verdict, m)?)?;
    Ok(())
}
