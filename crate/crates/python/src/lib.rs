//! Python bindings for the `balsub` crate.

use balsub::assembler::{top_level, KappaRule, Outcome, RunConfig};
use balsub::certify::{best_balanced_clique, verify_subdivision};
use balsub::connector::diameter_bound;
use balsub::drc::{dense_tk2, drc_select, DrcParams, DEFAULT_MAX_RETRIES};
use balsub::expander::{epsilon_of, verify_expander, ExpansionProfile, VerdictStatus, VerifyMode};
use balsub::{generators, io, Graph, SubdivisionCertificate, VertexSet};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph", module = "balsub", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { inner: Graph::from_edges(n, edges).map_err(value_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: io::parse_edge_list(text).map_err(value_err)? })
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        PyGraph { inner: generators::complete(n) }
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: generators::cycle(n).map_err(value_err)? })
    }

    #[staticmethod]
    fn hypercube(dim: u32) -> Self {
        PyGraph { inner: generators::hypercube(dim) }
    }

    #[staticmethod]
    fn kdd(d: usize, copies: usize) -> Self {
        PyGraph { inner: generators::kdd(d, copies) }
    }

    #[staticmethod]
    fn gnp(n: usize, p: f64, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: generators::gnp(n, p, seed).map_err(value_err)? })
    }

    #[staticmethod]
    fn bipartite_gnp(n1: usize, n2: usize, p: f64, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: generators::bipartite_gnp(n1, n2, p, seed).map_err(value_err)? })
    }

    #[staticmethod]
    fn incidence_plane(q: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: generators::incidence_plane(q).map_err(value_err)? })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        self.inner.check_vertex(v).map_err(value_err)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// Average degree as a `(numerator, denominator)` pair.
    fn average_degree(&self) -> (i64, i64) {
        let d = self.inner.average_degree();
        (*d.numer(), *d.denom())
    }

    fn to_edge_list(&self) -> String {
        io::write_edge_list(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

#[pyclass(name = "Certificate", module = "balsub", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCertificate {
    inner: SubdivisionCertificate,
}

#[pymethods]
impl PyCertificate {
    #[new]
    fn new(ell: usize, branch: Vec<usize>, paths: Vec<Vec<usize>>) -> Self {
        PyCertificate { inner: SubdivisionCertificate::new(ell, branch, paths) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCertificate { inner: SubdivisionCertificate::from_json(text).map_err(value_err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn ell(&self) -> usize {
        self.inner.ell
    }

    #[getter]
    fn branch(&self) -> Vec<usize> {
        self.inner.branch.clone()
    }

    #[getter]
    fn paths(&self) -> Vec<Vec<usize>> {
        self.inner.paths.iter().map(|p| p.vertices.clone()).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("Certificate(k={}, ell={})", self.inner.k(), self.inner.ell)
    }
}

fn certificate(c: SubdivisionCertificate) -> PyCertificate {
    PyCertificate { inner: c }
}

/// Runs the full pipeline. Returns a dict with `outcome`, `certificate`
/// (or None), `reason` (or None) and the trace as JSON text.
#[pyfunction]
#[pyo3(signature = (graph, mode = "desk", seed = 0, kappa = "sqrt", k_target = None, ell = None))]
fn find<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    mode: &str,
    seed: u64,
    kappa: &str,
    k_target: Option<usize>,
    ell: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = match mode {
        "desk" => RunConfig::desk(),
        "paper" if k_target.is_none() && ell.is_none() => RunConfig::paper(),
        "paper" => return Err(value_err("overrides are desk-mode only")),
        other => return Err(value_err(format!("unknown mode {other:?}"))),
    };
    cfg.seed = seed;
    cfg.kappa_rule = match kappa {
        "sqrt" => KappaRule::SqrtD,
        "linear" => KappaRule::LinearD,
        other => return Err(value_err(format!("unknown kappa rule {other:?}"))),
    };
    if let Some(o) = cfg.overrides.as_mut() {
        o.k_target = k_target;
        o.ell = ell;
    }
    let run = top_level(&graph.inner, &cfg).map_err(value_err)?;
    let (name, reason) = match &run.outcome {
        Outcome::Subdivision { .. } => ("subdivision", None),
        Outcome::DenseFallback { .. } => ("dense-fallback", None),
        Outcome::SparseRegime { .. } => ("sparse-regime", None),
        Outcome::Failure { reason } => ("failure", Some(reason.clone())),
    };
    let out = PyDict::new(py);
    out.set_item("outcome", name)?;
    out.set_item("certificate", run.outcome.certificate().cloned().map(certificate))?;
    out.set_item("reason", reason)?;
    out.set_item("trace", serde_json::to_string(&run.trace).map_err(value_err)?)?;
    Ok(out)
}

/// Checks a certificate; returns `(passed, [(clause, detail), ...])` with
/// one entry per failed clause.
#[pyfunction]
fn verify(graph: &PyGraph, cert: &PyCertificate) -> (bool, Vec<(String, String)>) {
    let r = verify_subdivision(&graph.inner, &cert.inner);
    let failures = r.failures().map(|c| (c.id.clone(), c.detail.clone().unwrap_or_default())).collect();
    (r.passed, failures)
}

/// Expansion check. Returns `(status, witness)` where status is one of
/// "certified", "refuted" or "sampled-ok".
#[pyfunction]
#[pyo3(signature = (graph, epsilon1, k, exhaustive = true, trials = 100, seed = 0))]
fn check_expander(
    graph: &PyGraph,
    epsilon1: f64,
    k: f64,
    exhaustive: bool,
    trials: usize,
    seed: u64,
) -> PyResult<(&'static str, Option<Vec<usize>>)> {
    let p = ExpansionProfile::new(epsilon1, k).map_err(value_err)?;
    let mode = if exhaustive { VerifyMode::exhaustive() } else { VerifyMode::Sampled { trials, seed } };
    let v = verify_expander(&graph.inner, &p, mode).map_err(value_err)?;
    let status = match v.status {
        VerdictStatus::Certified => "certified",
        VerdictStatus::Refuted => "refuted",
        VerdictStatus::SampledOk => "sampled-ok",
    };
    Ok((status, v.witness.map(|w| w.to_vec())))
}

#[pyfunction]
#[pyo3(signature = (graph, k, seed = 0))]
fn dense_subdivision(graph: &PyGraph, k: usize, seed: u64) -> PyResult<PyCertificate> {
    dense_tk2(&graph.inner, k, seed).map(certificate).map_err(value_err)
}

/// Largest `k` over all lengths; `(k, ell, certificate, complete)` or None.
#[pyfunction]
#[pyo3(signature = (graph, budget = 2_000_000))]
fn best_clique(graph: &PyGraph, budget: u64) -> Option<(usize, usize, PyCertificate, bool)> {
    best_balanced_clique(&graph.inner, budget).map(|b| (b.k, b.ell, certificate(b.certificate), b.complete))
}

#[pyfunction]
#[pyo3(signature = (graph, v1, v2, t, r, c, a, seed = 0, retries = DEFAULT_MAX_RETRIES))]
#[allow(clippy::too_many_arguments)]
fn drc(
    graph: &PyGraph,
    v1: Vec<usize>,
    v2: Vec<usize>,
    t: u32,
    r: usize,
    c: usize,
    a: usize,
    seed: u64,
    retries: usize,
) -> PyResult<Vec<usize>> {
    let p = DrcParams::new(t, r, c, a).map_err(value_err)?;
    let v1: VertexSet = v1.into_iter().collect();
    let v2: VertexSet = v2.into_iter().collect();
    drc_select(&graph.inner, &v1, &v2, &p, seed, retries).map(|s| s.to_vec()).map_err(value_err)
}

#[pyfunction]
fn epsilon(x: f64, epsilon1: f64, k: f64) -> PyResult<f64> {
    epsilon_of(x, &ExpansionProfile::new(epsilon1, k).map_err(value_err)?).map_err(value_err)
}

#[pyfunction]
fn diameter(epsilon1: f64, k: f64, n: usize) -> PyResult<u64> {
    Ok(diameter_bound(&ExpansionProfile::new(epsilon1, k).map_err(value_err)?, n))
}

#[pymodule]
#[pyo3(name = "balsub")]
fn balsub_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(find, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(check_expander, m)?)?;
    m.add_function(wrap_pyfunction!(dense_subdivision, m)?)?;
    m.add_function(wrap_pyfunction!(best_clique, m)?)?;
    m.add_function(wrap_pyfunction!(drc, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(diameter, m)?)?;
    Ok(())
}
