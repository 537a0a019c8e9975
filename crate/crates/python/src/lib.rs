//! Python module `minkbilliard`: bodies, ξ, billiard simulation, Hanner
//! checks and the inequality batteries. Reports come back as plain dicts
//! decoded from the same JSON the CLI prints.

use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use minkbilliard_core::billiard::{default_max_bounces, random_start, Mode};
use minkbilliard_core::body::width as body_width;
use minkbilliard_core::hanner::{verify_hanner_in, HannerTree};
use minkbilliard_core::polytope::Polytope;
use minkbilliard_core::random::case_rng;
use minkbilliard_core::scalar::{decimal_rational, Scalar};
use minkbilliard_core::verify::{run_battery as core_run_battery, Battery};
use minkbilliard_core::{simulate as core_simulate, xi as core_xi, ConvexBody, PhasePoint, TrajectoryRecord, XiOptions};

create_exception!(minkbilliard, GeometryError, PyValueError);
create_exception!(minkbilliard, BilliardError, PyException);

fn geometry_err(e: impl std::fmt::Display) -> PyErr {
    GeometryError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).expect("plain data");
    py.import("json")?.call_method1("loads", (text,))
}

/// A convex body: a polytope with both representations, or a Euclidean ball.
#[pyclass(name = "Body", module = "minkbilliard", frozen)]
struct PyBody {
    inner: ConvexBody,
}

#[pymethods]
impl PyBody {
    /// Polygon from counterclockwise vertices; the origin must be interior.
    #[staticmethod]
    fn polygon(vertices: Vec<[f64; 2]>) -> PyResult<Self> {
        ConvexBody::polygon(&vertices).map(|inner| PyBody { inner }).map_err(geometry_err)
    }

    /// Convex hull of points in dimension up to four.
    #[staticmethod]
    fn from_vertices(points: Vec<Vec<f64>>) -> PyResult<Self> {
        ConvexBody::from_vertices(&points).map(|inner| PyBody { inner }).map_err(geometry_err)
    }

    #[staticmethod]
    #[pyo3(signature = (radius = 1.0, dim = 2))]
    fn ball(radius: f64, dim: usize) -> Self {
        PyBody {
            inner: ConvexBody::ball(radius, dim),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ConvexBody::from_json(text).map(|inner| PyBody { inner }).map_err(geometry_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn is_ball(&self) -> bool {
        self.inner.is_ball()
    }

    /// Vertices of a polytope; empty for the ball.
    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.as_polytope().map(|p| p.vertices().to_vec()).unwrap_or_default()
    }

    /// Gauge `‖x‖` of this body.
    fn gauge(&self, x: Vec<f64>) -> f64 {
        self.inner.gauge(&x)
    }

    /// Support function `max ⟨p, x⟩` over the body.
    fn support(&self, p: Vec<f64>) -> f64 {
        self.inner.h(&p)
    }

    fn polar(&self) -> Self {
        PyBody {
            inner: minkbilliard_core::body::polar(&self.inner),
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        PyBody {
            inner: self.inner.scaled(factor),
        }
    }

    fn perimeter(&self) -> f64 {
        self.inner.perimeter()
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            ConvexBody::Ball { .. } => format!("Body.ball(dim={})", self.inner.dim()),
            ConvexBody::Polytope(p) => format!("Body(dim={}, vertices={}, facets={})", p.dim(), p.vertices().len(), p.facets().len()),
        }
    }
}

/// Width of `k` measured by the support function of `t`; returns the value
/// and a minimizing direction.
#[pyfunction]
fn width(k: &PyBody, t: &PyBody) -> PyResult<(f64, Vec<f64>)> {
    body_width(&k.inner, &t.inner).map_err(geometry_err)
}

/// ξ_T(K) for planar bodies: dict with `xi`, `m`, `polyline`, `alpha`,
/// `method`, `flagged` and `cross_check`.
#[pyfunction]
#[pyo3(signature = (k, t, seed = 0, starts = 64, max_evals = 20_000))]
fn xi<'py>(py: Python<'py>, k: &PyBody, t: &PyBody, seed: u64, starts: usize, max_evals: usize) -> PyResult<Bound<'py, PyAny>> {
    let opts = XiOptions {
        seed,
        starts,
        max_evals,
        ..XiOptions::default()
    };
    let (k, t) = (k.inner.clone(), t.inner.clone());
    let r = py.detach(move || core_xi(&k, &t, &opts)).map_err(geometry_err)?;
    to_py(
        py,
        &serde_json::json!({
            "xi": r.value,
            "m": r.m,
            "polyline": r.minimizer.points,
            "alpha": r.alpha_at_min,
            "method": r.method,
            "flagged": r.flagged,
            "cross_check": r.cross_check,
        }),
    )
}

fn start_and_run<S: Scalar>(
    k: &Polytope<S>,
    t: &Polytope<S>,
    start: Option<(Vec<S>, Vec<S>)>,
    seed: u64,
    max_bounces: usize,
) -> Result<serde_json::Value, String> {
    let start = match start {
        Some((q, p)) => PhasePoint::locate(q, p, k, t).map_err(|e| e.to_string())?,
        None => random_start(k, t, &mut case_rng(seed, 0)).0,
    };
    core_simulate(&start, k, t, max_bounces)
        .map(|r: TrajectoryRecord<S>| r.to_json_value())
        .map_err(|e| e.to_string())
}

/// Simulates a classical billiard trajectory in `k × t`, exactly on decimal
/// data unless `mode="float"`. Raises `BilliardError` when the orbit leaves
/// the classical regime or does not close.
#[pyfunction]
#[pyo3(signature = (k, t, q = None, p = None, seed = 0, max_bounces = None, mode = None))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    k: &PyBody,
    t: &PyBody,
    q: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    seed: u64,
    max_bounces: Option<usize>,
    mode: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let (Some(kp), Some(tp)) = (k.inner.as_polytope(), t.inner.as_polytope()) else {
        return Err(GeometryError::new_err("simulate needs polytopes for both bodies"));
    };
    if kp.dim() != tp.dim() {
        return Err(GeometryError::new_err("bodies have different dimensions"));
    }
    let mode = mode.map(|m| m.parse::<Mode>()).transpose().map_err(|e| PyValueError::new_err(e.to_string()))?;
    let start = match (q, p) {
        (Some(q), Some(p)) => Some((q, p)),
        (None, None) => None,
        _ => return Err(PyValueError::new_err("give both q and p, or neither")),
    };
    let bounces = max_bounces.unwrap_or_else(|| default_max_bounces(kp.dim()));
    let exact = match (kp.to_rational(), tp.to_rational()) {
        (Some(a), Some(b)) if mode != Some(Mode::Float) => Some((a, b)),
        _ => None,
    };
    let (kp, tp) = (kp.clone(), tp.clone());
    let result = py.detach(move || match exact {
        Some((a, b)) => {
            let conv = |v: Vec<f64>| -> Vec<BigRational> {
                v.into_iter()
                    .map(|x| decimal_rational(x, 17).unwrap_or_else(|| <BigRational as Scalar>::from_f64(x)))
                    .collect()
            };
            start_and_run(&a, &b, start.map(|(q, p)| (conv(q), conv(p))), seed, bounces)
        }
        None => start_and_run(&kp, &tp, start, seed, bounces),
    });
    result.map_err(BilliardError::new_err).and_then(|v| to_py(py, &v))
}

/// A Hanner polytope as a tree of `sum1` / `sum_inf` sums over segments.
#[pyclass(name = "HannerTree", module = "minkbilliard", frozen)]
struct PyHannerTree {
    inner: HannerTree,
}

#[pymethods]
impl PyHannerTree {
    #[staticmethod]
    fn leaf() -> Self {
        PyHannerTree { inner: HannerTree::Leaf }
    }

    #[staticmethod]
    fn cube(n: usize) -> Self {
        PyHannerTree {
            inner: HannerTree::cube(n),
        }
    }

    #[staticmethod]
    fn cross_polytope(n: usize) -> Self {
        PyHannerTree {
            inner: HannerTree::cross_polytope(n),
        }
    }

    #[staticmethod]
    fn sum1(l: &PyHannerTree, r: &PyHannerTree) -> Self {
        PyHannerTree {
            inner: HannerTree::sum1(l.inner.clone(), r.inner.clone()),
        }
    }

    #[staticmethod]
    fn sum_inf(l: &PyHannerTree, r: &PyHannerTree) -> Self {
        PyHannerTree {
            inner: HannerTree::sum_inf(l.inner.clone(), r.inner.clone()),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        HannerTree::from_json(text)
            .map(|inner| PyHannerTree { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("HannerTree({})", self.inner.to_json())
    }
}

/// Counts of random starts in `H × H°` meeting each conclusion of the Hanner
/// check, plus `all_pass`.
#[pyfunction]
#[pyo3(signature = (tree, samples = 100, seed = 0, exact = true))]
fn verify_hanner<'py>(py: Python<'py>, tree: &PyHannerTree, samples: usize, seed: u64, exact: bool) -> PyResult<Bound<'py, PyAny>> {
    let tree = tree.inner.clone();
    let report = py.detach(move || {
        if exact {
            verify_hanner_in::<BigRational>(&tree, samples, seed)
        } else {
            verify_hanner_in::<f64>(&tree, samples, seed)
        }
    });
    let mut v = serde_json::to_value(&report).expect("plain data");
    v["all_pass"] = serde_json::Value::Bool(report.all_pass());
    to_py(py, &v)
}

/// Runs a named battery (`"symmetry"`, `"rogers-shepard-euclid"`, ...).
#[pyfunction]
#[pyo3(signature = (name, seed = 0, samples = 50))]
fn run_battery<'py>(py: Python<'py>, name: &str, seed: u64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    let battery: Battery = name.parse().map_err(|e: minkbilliard_core::verify::UnknownBattery| PyValueError::new_err(e.to_string()))?;
    let report = py.detach(move || core_run_battery(battery, seed, samples)).map_err(geometry_err)?;
    let mut v = serde_json::to_value(&report).expect("plain data");
    v["all_pass"] = serde_json::Value::Bool(report.all_pass());
    to_py(py, &v)
}

#[pyfunction]
fn batteries() -> Vec<&'static str> {
    Battery::ALL.iter().map(|b| b.name()).collect()
}

#[pymodule]
#[pyo3(name = "minkbilliard")]
fn minkbilliard_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBody>()?;
    m.add_class::<PyHannerTree>()?;
    m.add_function(wrap_pyfunction!(width, m)?)?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_hanner, m)?)?;
    m.add_function(wrap_pyfunction!(run_battery, m)?)?;
    m.add_function(wrap_pyfunction!(batteries, m)?)?;
    m.add("GeometryError", m.py().get_type::<GeometryError>())?;
    m.add("BilliardError", m.py().get_type::<BilliardError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
