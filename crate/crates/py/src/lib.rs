//! Python bindings for `lnc_core`.
//!
//! Links are `(i, j)` tuples, schedules are [`Schedule`] objects and richer
//! reports come back as JSON strings.

use std::collections::BTreeSet;

use lnc_core::consensus;
use lnc_core::hlnc::{audit_feasibility, plan_hlnc as core_plan_hlnc, HlncOptions};
use lnc_core::ltl::{parse, translate_to_nba, TranslateOptions};
use lnc_core::network::{coverage_check as core_coverage_check, kmeans_place, random_network, build_geometric_graph, LinkId, NetworkFile, Point, SensorNetwork};
use lnc_core::oracle::{brute_force_optimal as core_brute_force, verify_translation as core_verify_translation};
use lnc_core::planner::{plan_centralized as core_plan_centralized, plan_specialized_lnc, PlanOptions, DEFAULT_PBA_BUDGET};
use lnc_core::ts::{sequential_schedule as core_sequential, CostFn, Lasso};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Link = (usize, usize);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

#[pyclass(name = "Network", module = "lnc", skip_from_py_object)]
#[derive(Clone)]
pub struct PyNetwork {
    inner: SensorNetwork,
}

#[pymethods]
impl PyNetwork {
    #[new]
    fn new(positions: Vec<(f64, f64)>, r: f64) -> PyResult<Self> {
        let pts = positions.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Ok(PyNetwork {
            inner: build_geometric_graph(pts, r).map_err(value_err)?,
        })
    }

    /// `n` sensors uniform in a `width × height` box.
    #[staticmethod]
    #[pyo3(signature = (n, r, width, height, seed=0))]
    fn random(n: usize, r: f64, width: f64, height: f64, seed: u64) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: random_network(n, r, width, height, seed).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: NetworkFile = serde_json::from_str(text).map_err(value_err)?;
        Ok(PyNetwork {
            inner: file.to_network().map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&NetworkFile::from_network(&self.inner)).unwrap()
    }

    #[getter]
    fn edges(&self) -> Vec<Link> {
        self.inner.edges().iter().map(|e| (e.i(), e.j())).collect()
    }

    #[getter]
    fn positions(&self) -> Vec<(f64, f64)> {
        self.inner.positions().iter().map(|p| (p.x, p.y)).collect()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.radius()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Network(n={}, links={}, r={})", self.inner.len(), self.inner.edges().len(), self.inner.radius())
    }
}

#[pyclass(name = "Schedule", module = "lnc", skip_from_py_object)]
#[derive(Clone)]
pub struct PySchedule {
    inner: Lasso<LinkId>,
}

fn to_sets(v: Vec<Vec<Link>>) -> Vec<BTreeSet<LinkId>> {
    v.into_iter()
        .map(|s| s.into_iter().map(|(i, j)| LinkId::new(i, j)).collect())
        .collect()
}

fn from_sets(v: &[BTreeSet<LinkId>]) -> Vec<Vec<Link>> {
    v.iter().map(|s| s.iter().map(|e| (e.i(), e.j())).collect()).collect()
}

#[pymethods]
impl PySchedule {
    /// The word `prefix · suffix^ω`; the suffix must end on the last prefix
    /// element.
    #[new]
    fn new(prefix: Vec<Vec<Link>>, suffix: Vec<Vec<Link>>) -> PyResult<Self> {
        Ok(PySchedule {
            inner: Lasso::new(to_sets(prefix), to_sets(suffix)).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let l: Lasso<LinkId> = serde_json::from_str(text).map_err(value_err)?;
        Self::new(from_sets(&l.prefix), from_sets(&l.suffix))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap()
    }

    #[getter]
    fn prefix(&self) -> Vec<Vec<Link>> {
        from_sets(&self.inner.prefix)
    }

    #[getter]
    fn suffix(&self) -> Vec<Vec<Link>> {
        from_sets(&self.inner.suffix)
    }

    #[getter]
    fn period(&self) -> usize {
        self.inner.period()
    }

    /// Active links at time `t`.
    fn at(&self, t: usize) -> Vec<Link> {
        self.inner.at(t).iter().map(|e| (e.i(), e.j())).collect()
    }

    fn __repr__(&self) -> String {
        format!("Schedule(prefix={:?}, suffix={:?})", self.prefix(), self.suffix())
    }
}

fn cost_fn(net: &SensorNetwork, kind: &str) -> PyResult<CostFn> {
    match kind {
        "jaccard" => Ok(CostFn::Jaccard),
        "hausdorff" => Ok(CostFn::hausdorff(net)),
        other => Err(value_err(format!("unknown cost {other:?}, expected jaccard or hausdorff"))),
    }
}

/// Optimal schedule through automaton synthesis; returns `(schedule, cost)`.
#[pyfunction]
#[pyo3(signature = (net, cost="jaccard", faithful=false, fairness=false))]
fn plan_centralized(net: &PyNetwork, cost: &str, faithful: bool, fairness: bool) -> PyResult<(PySchedule, f64)> {
    let mut opts = if faithful { PlanOptions::faithful() } else { PlanOptions::default() };
    opts.fairness = fairness;
    let out = core_plan_centralized(&net.inner.graph(), &cost_fn(&net.inner, cost)?, &opts).map_err(runtime_err)?;
    Ok((PySchedule { inner: out.schedule }, out.cost))
}

/// Optimal schedule through the covering-cycle search; returns `(schedule, cost)`.
#[pyfunction]
#[pyo3(signature = (net, cost="jaccard", budget=DEFAULT_PBA_BUDGET))]
fn plan_specialized(net: &PyNetwork, cost: &str, budget: usize) -> PyResult<(PySchedule, f64)> {
    let out = plan_specialized_lnc(&net.inner.graph(), &cost_fn(&net.inner, cost)?, budget).map_err(runtime_err)?;
    Ok((PySchedule { inner: out.schedule }, out.cost))
}

/// Hierarchical plan; returns `(stitched schedule, plan JSON)`.
#[pyfunction]
#[pyo3(signature = (net, centers, big_r, cost="jaccard"))]
fn plan_hlnc(net: &PyNetwork, centers: Vec<(f64, f64)>, big_r: f64, cost: &str) -> PyResult<(PySchedule, String)> {
    let centers: Vec<Point> = centers.into_iter().map(|(x, y)| Point::new(x, y)).collect();
    let plan = core_plan_hlnc(&net.inner, &centers, big_r, &cost_fn(&net.inner, cost)?, &HlncOptions::default())
        .map_err(runtime_err)?;
    let json = serde_json::to_string(&plan).unwrap();
    Ok((PySchedule { inner: plan.stitched.lasso }, json))
}

#[pyfunction]
fn sequential_schedule(net: &PyNetwork) -> PySchedule {
    PySchedule {
        inner: core_sequential(&net.inner.graph()),
    }
}

/// k-means command centers.
#[pyfunction]
#[pyo3(signature = (net, k, seed=0))]
fn kmeans(net: &PyNetwork, k: usize, seed: u64) -> PyResult<Vec<(f64, f64)>> {
    let r = kmeans_place(net.inner.positions(), k, seed).map_err(value_err)?;
    Ok(r.centers.iter().map(|p| (p.x, p.y)).collect())
}

/// Coverage margin `ε`, or `None` when the condition fails.
#[pyfunction]
fn coverage_check(net: &PyNetwork, centers: Vec<(f64, f64)>, big_r: f64) -> PyResult<Option<f64>> {
    let centers: Vec<Point> = centers.into_iter().map(|(x, y)| Point::new(x, y)).collect();
    core_coverage_check(&net.inner, &centers, big_r).map_err(value_err)
}

/// Feasibility report as JSON.
#[pyfunction]
fn audit(net: &PyNetwork, schedule: &PySchedule) -> String {
    serde_json::to_string(&audit_feasibility(&net.inner.graph(), &schedule.inner)).unwrap()
}

#[pyfunction]
fn efficiency(net: &PyNetwork, schedule: &PySchedule) -> f64 {
    consensus::efficiency(&schedule.inner, &net.inner.graph())
}

/// Consensus run; returns `(final state, spread per step, sum per step)`.
#[pyfunction]
#[pyo3(signature = (net, schedule, y0, steps, epsilon=consensus::DEFAULT_EPSILON))]
fn simulate(
    net: &PyNetwork,
    schedule: &PySchedule,
    y0: Vec<f64>,
    steps: usize,
    epsilon: f64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let tr = consensus::run(&net.inner.graph(), &schedule.inner, &y0, epsilon, steps).map_err(value_err)?;
    Ok((tr.final_state().to_vec(), tr.spread, tr.sum))
}

/// Brute-force optimum over bounded lassos (at most four links);
/// `(schedule, cost)` or `None`.
#[pyfunction]
#[pyo3(signature = (net, max_prefix=2, max_suffix=4))]
fn brute_force_optimal(net: &PyNetwork, max_prefix: usize, max_suffix: usize) -> PyResult<Option<(PySchedule, f64)>> {
    let r = core_brute_force(&net.inner.graph(), &CostFn::Jaccard, max_prefix, max_suffix, false).map_err(value_err)?;
    Ok(r.map(|r| (PySchedule { inner: r.schedule }, r.cost)))
}

/// Büchi automaton for an LTL formula, as JSON.
#[pyfunction]
fn translate(formula: &str) -> PyResult<String> {
    let f = parse(formula).map_err(value_err)?;
    let nba = translate_to_nba(&f, &TranslateOptions::default()).map_err(runtime_err)?;
    Ok(serde_json::to_string(&nba.to_json()).unwrap())
}

/// Number of lassos where the automaton and the semantics disagree.
#[pyfunction]
#[pyo3(signature = (formula, max_len=3))]
fn verify_translation(formula: &str, max_len: usize) -> PyResult<usize> {
    let f = parse(formula).map_err(value_err)?;
    let r = core_verify_translation(&f, 2, max_len).map_err(value_err)?;
    Ok(r.disagreements.len())
}

#[pymodule]
fn lnc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PySchedule>()?;
    m.add_function(wrap_pyfunction!(plan_centralized, m)?)?;
    m.add_function(wrap_pyfunction!(plan_specialized, m)?)?;
    m.add_function(wrap_pyfunction!(plan_hlnc, m)?)?;
    m.add_function(wrap_pyfunction!(sequential_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_check, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_translation, m)?)?;
    Ok(())
}
