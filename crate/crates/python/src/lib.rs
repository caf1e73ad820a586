//! Python bindings: graphs, means, distances, geodesics and the learning
//! helpers. Matrices cross the boundary as lists of rows.

use std::collections::{BTreeMap, HashMap};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gbary::barycenter::EDGE_DROP_TOL;
use gbary::graphs::{balanced_partition, generate_sbm as sbm};
use gbary::io::{format_graph, parse_graph, read_graph, write_graph, GraphFormat};
use gbary::learn::{graph_metrics as metrics, kmeans_graphs, ssl_classify, KMeansConfig, SslProblem};
use gbary::{
    bw_mean, mean_of, BarycenterProblem, DistanceKind, FixedPointConfig, MeanConfig, MeanKind, MultiLayerGraph, SymMatrix,
    Weights,
};

fn err(e: gbary::Error) -> PyErr {
    match e {
        gbary::Error::NotConverged { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = gbary::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn rows(m: &SymMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<SymMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    SymMatrix::from_row_slice(n, &flat).map_err(err)
}

/// Undirected weighted graph on nodes `0..n`.
#[pyclass(name = "Graph", module = "gbary", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph(gbary::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges, labels = None))]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let g = gbary::Graph::new(n, edges).map_err(err)?;
        Ok(Self(match labels {
            Some(l) => g.with_labels(l).map_err(err)?,
            None => g,
        }))
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        read_graph(path).map(Self).map_err(err)
    }

    /// Parses edge-list TSV or a tagged dense CSV.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_graph(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_laplacian(laplacian: Vec<Vec<f64>>) -> PyResult<Self> {
        gbary::Graph::from_laplacian(&matrix(laplacian)?, EDGE_DROP_TOL).map(Self).map_err(err)
    }

    #[pyo3(signature = (path, format = "tsv"))]
    fn write(&self, path: &str, format: &str) -> PyResult<()> {
        write_graph(&self.0, path, parse::<GraphFormat>(format)?).map_err(err)
    }

    #[pyo3(signature = (format = "tsv"))]
    fn to_string(&self, format: &str) -> PyResult<String> {
        Ok(format_graph(&self.0, parse(format)?))
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.0.num_nodes()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.node_labels().to_vec()
    }

    /// `(i, j, w)` with `i < j`.
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.0.edges().iter().map(|e| (e.i, e.j, e.weight)).collect()
    }

    fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.0.weight(i, j)
    }

    fn laplacian(&self) -> Vec<Vec<f64>> {
        rows(self.0.laplacian().matrix())
    }

    fn adjacency(&self) -> Vec<Vec<f64>> {
        rows(&self.0.adjacency())
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    /// Relabels node `i` as `perm[i]`.
    fn permute(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.0.permute(&perm).map(Self).map_err(err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Graph(num_nodes={}, num_edges={})", self.0.num_nodes(), self.0.edges().len())
    }
}

fn unwrap_graphs(graphs: &[PyRef<'_, PyGraph>]) -> Vec<gbary::Graph> {
    graphs.iter().map(|g| g.0.clone()).collect()
}

fn weights_for(weights: Option<Vec<f64>>, m: usize) -> PyResult<Weights> {
    match weights {
        Some(w) if w.len() != m => Err(PyValueError::new_err(format!("{} weights for {m} graphs", w.len()))),
        Some(w) => Weights::new(w).map_err(err),
        None => Weights::uniform(m).map_err(err),
    }
}

/// Weighted mean graph. `kind`: "bw", "bw:<filter>", "arithmetic",
/// "harmonic", "power:<p>" or "karcher".
#[pyfunction]
#[pyo3(signature = (graphs, weights = None, kind = "bw", tol = 1e-9, max_iter = 100))]
fn mean(
    graphs: Vec<PyRef<'_, PyGraph>>,
    weights: Option<Vec<f64>>,
    kind: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<PyGraph> {
    let graphs = unwrap_graphs(&graphs);
    let w = weights_for(weights, graphs.len())?;
    let fixed_point = FixedPointConfig { tol, max_iter, ..Default::default() };
    let g = match parse::<MeanKind>(kind)? {
        MeanKind::BuresWasserstein(filter) => {
            let problem = BarycenterProblem::from_graphs(&graphs, w, filter).map_err(err)?;
            bw_mean(&problem, &fixed_point).map_err(err)?.mean_graph
        }
        other => {
            let ls: Vec<SymMatrix> = graphs.iter().map(|g| g.laplacian().into_matrix()).collect();
            let cfg = MeanConfig { fixed_point, ..Default::default() };
            let m = mean_of(&ls, &w, other, &cfg).map_err(err)?;
            gbary::Graph::from_laplacian(&m, EDGE_DROP_TOL).map_err(err)?
        }
    };
    Ok(PyGraph(g))
}

/// BW mean with solver diagnostics: `(graph, {"iterations", "residual", "final_step"})`.
#[pyfunction]
#[pyo3(signature = (graphs, weights = None, filter = "pinv_sqrt", tol = 1e-9, max_iter = 100))]
fn bw_mean_report(
    graphs: Vec<PyRef<'_, PyGraph>>,
    weights: Option<Vec<f64>>,
    filter: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<(PyGraph, HashMap<String, f64>)> {
    let graphs = unwrap_graphs(&graphs);
    let problem =
        BarycenterProblem::from_graphs(&graphs, weights_for(weights, graphs.len())?, parse(filter)?).map_err(err)?;
    let r = bw_mean(&problem, &FixedPointConfig { tol, max_iter, ..Default::default() }).map_err(err)?;
    let info = HashMap::from([
        ("iterations".to_string(), r.iterations as f64),
        ("residual".to_string(), r.residual),
        ("final_step".to_string(), r.final_step),
    ]);
    Ok((PyGraph(r.mean_graph), info))
}

/// `kind`: "bw", "bw:<filter>", "frobenius" or "frobenius-pinv".
#[pyfunction]
#[pyo3(signature = (g0, g1, kind = "bw"))]
fn distance(g0: &PyGraph, g1: &PyGraph, kind: &str) -> PyResult<f64> {
    gbary::graph_distance(&g0.0, &g1.0, parse::<DistanceKind>(kind)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (graphs, kind = "bw"))]
fn pairwise_distances(graphs: Vec<PyRef<'_, PyGraph>>, kind: &str) -> PyResult<Vec<Vec<f64>>> {
    let d = gbary::pairwise_distances(&unwrap_graphs(&graphs), parse(kind)?).map_err(err)?;
    Ok(d.row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// Point at time `t ∈ [0, 1]` on the BW geodesic from `g0` to `g1`.
#[pyfunction]
fn interpolate(g0: &PyGraph, g1: &PyGraph, t: f64) -> PyResult<PyGraph> {
    gbary::interpolate(&g0.0, &g1.0, t).map(PyGraph).map_err(err)
}

/// Connected SBM on `n` nodes split into `k` balanced blocks, unit weights.
#[pyfunction]
#[pyo3(signature = (n, k, p_in, p_out, seed = 0))]
fn generate_sbm(n: usize, k: usize, p_in: f64, p_out: f64, seed: u64) -> PyResult<PyGraph> {
    let partition = balanced_partition(n, k).map_err(err)?;
    sbm(&partition, p_in, p_out, seed).map(PyGraph).map_err(err)
}

/// K-means of graphs with a mean and its paired distance: `(assignment, inertia)`.
#[pyfunction]
#[pyo3(signature = (graphs, k, mean = "bw", seed = 0))]
fn kmeans(graphs: Vec<PyRef<'_, PyGraph>>, k: usize, mean: &str, seed: u64) -> PyResult<(Vec<usize>, f64)> {
    let r = kmeans_graphs(&unwrap_graphs(&graphs), &KMeansConfig::paired(k, parse(mean)?, seed)).map_err(err)?;
    Ok((r.assignment, r.inertia))
}

#[pyfunction]
fn nmi(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    gbary::learn::nmi(&a, &b).map_err(err)
}

/// Degree centrality, modularity and participation of a graph under a node partition.
#[pyfunction]
fn graph_metrics(graph: &PyGraph, partition: Vec<usize>) -> PyResult<HashMap<String, Py<PyAny>>> {
    let m = metrics(&graph.0, &partition).map_err(err)?;
    Python::attach(|py| {
        Ok(HashMap::from([
            ("degree_centrality".to_string(), m.degree_centrality.into_pyobject(py)?.into_any().unbind()),
            ("modularity".to_string(), m.modularity.into_pyobject(py)?.into_any().unbind()),
            ("participation".to_string(), m.participation.into_pyobject(py)?.into_any().unbind()),
        ]))
    })
}

/// Semi-supervised node labels on a multi-layer graph regularized by the
/// mean of the layers' normalized Laplacians.
#[pyfunction]
#[pyo3(signature = (layers, observed, n_classes, mean = "bw", rho = None))]
fn ssl(
    layers: Vec<PyRef<'_, PyGraph>>,
    observed: BTreeMap<usize, usize>,
    n_classes: usize,
    mean: &str,
    rho: Option<f64>,
) -> PyResult<Vec<usize>> {
    let graph = MultiLayerGraph::new(unwrap_graphs(&layers), None).map_err(err)?;
    let problem = SslProblem::from_multilayer(&graph, observed, n_classes, rho, parse(mean)?).map_err(err)?;
    Ok(ssl_classify(&problem, &MeanConfig::default()).map_err(err)?.labels)
}

#[pymodule]
#[pyo3(name = "gbary")]
fn gbary_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(mean, m)?)?;
    m.add_function(wrap_pyfunction!(bw_mean_report, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_distances, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(generate_sbm, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(graph_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(ssl, m)?)?;
    Ok(())
}
