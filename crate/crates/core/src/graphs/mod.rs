//! Labeled weighted undirected graphs and their Laplacians.

mod generators;

pub use generators::{
    balanced_partition, generate_line_communities, generate_multilayer_sbm, generate_sbm,
    generate_sbm_with, perturb_edges, perturb_edges_with, rng_from_seed, GraphRng, CONNECTIVITY_RETRIES,
};

use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::{EigenDecomposition, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected graph on nodes `0..num_nodes`. Edges are stored once with
/// `i < j`, sorted, without self-loops or duplicates. Weights may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    node_labels: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        let mut map = BTreeMap::new();
        for (a, b, w) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidParameter(format!("edge ({a}, {b}) has non-finite weight")));
            }
            let key = (a.min(b), a.max(b));
            if map.insert(key, w).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
        }
        let edges = map.into_iter().map(|((i, j), weight)| Edge { i, j, weight }).collect();
        Ok(Self { num_nodes, node_labels: default_labels(num_nodes), edges })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_nodes {
            return Err(Error::LengthMismatch(labels.len(), self.num_nodes));
        }
        self.node_labels = labels;
        Ok(self)
    }

    /// Reads edge weights off a symmetric adjacency matrix; the diagonal must be zero.
    pub fn from_adjacency(w: &SymMatrix) -> Result<Self> {
        let n = w.dim();
        if let Some(i) = (0..n).find(|&i| w[(i, i)] != 0.0) {
            return Err(Error::InvalidParameter(format!("adjacency has nonzero diagonal at node {i}")));
        }
        Self::new(n, upper_entries(w, 1.0, 0.0))
    }

    /// Recovers the graph of a Laplacian, `w_ij = -L_ij`. Entries with
    /// `|w_ij| <= drop_tol · max|L|` are treated as absent edges.
    pub fn from_laplacian(l: &SymMatrix, drop_tol: f64) -> Result<Self> {
        let scale = l.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Self::new(l.dim(), upper_entries(l, -1.0, drop_tol * scale))
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn has_default_labels(&self) -> bool {
        self.node_labels == default_labels(self.num_nodes)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .ok()
            .map(|k| self.edges[k].weight)
    }

    pub fn adjacency(&self) -> SymMatrix {
        let mut w = DMatrix::zeros(self.num_nodes, self.num_nodes);
        for e in &self.edges {
            w[(e.i, e.j)] = e.weight;
            w[(e.j, e.i)] = e.weight;
        }
        SymMatrix::symmetrize(w)
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.num_nodes];
        for e in &self.edges {
            d[e.i] += e.weight;
            d[e.j] += e.weight;
        }
        d
    }

    /// `L = D - W`
    pub fn laplacian(&self) -> LaplacianMatrix {
        let mut l = DMatrix::zeros(self.num_nodes, self.num_nodes);
        for e in &self.edges {
            l[(e.i, e.j)] -= e.weight;
            l[(e.j, e.i)] -= e.weight;
            l[(e.i, e.i)] += e.weight;
            l[(e.j, e.j)] += e.weight;
        }
        LaplacianMatrix { matrix: SymMatrix::symmetrize(l) }
    }

    /// Connectivity over edges with nonzero weight.
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for e in self.edges.iter().filter(|e| e.weight != 0.0) {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.num_nodes
    }

    /// Relabels node `i` as `perm[i]`, so that `L' = P L Pᵀ`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        validate_permutation(perm, self.num_nodes)?;
        let mut labels = vec![String::new(); self.num_nodes];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.node_labels[i].clone();
        }
        let g = Graph::new(self.num_nodes, self.edges.iter().map(|e| (perm[e.i], perm[e.j], e.weight)))?;
        g.with_labels(labels)
    }

    pub(crate) fn from_sorted_edges(num_nodes: usize, edges: Vec<Edge>) -> Self {
        Self { num_nodes, node_labels: default_labels(num_nodes), edges }
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn upper_entries(m: &SymMatrix, sign: f64, drop: f64) -> Vec<(usize, usize, f64)> {
    let n = m.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = sign * m[(i, j)];
            if w.abs() > drop {
                out.push((i, j, w));
            }
        }
    }
    out
}

pub fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {} nodes", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
    }
    Ok(())
}

/// `P` with `P[perm[i], i] = 1`.
pub fn permutation_matrix(perm: &[usize]) -> Result<DMatrix<f64>> {
    validate_permutation(perm, perm.len())?;
    let n = perm.len();
    let mut p = DMatrix::zeros(n, n);
    for (i, &pi) in perm.iter().enumerate() {
        p[(pi, i)] = 1.0;
    }
    Ok(p)
}

/// Outcome of the single-zero-eigenvalue PSD check.
#[derive(Debug, Clone)]
pub struct AssumptionCheck {
    pub holds: bool,
    pub tolerance: f64,
    pub min_eigenvalue: f64,
    pub second_eigenvalue: f64,
    pub nullity: usize,
    pub diagnostics: String,
}

/// Combinatorial (possibly signed) graph Laplacian with zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    matrix: SymMatrix,
}

impl LaplacianMatrix {
    /// Accepts any symmetric matrix whose rows sum to zero.
    pub fn from_matrix(matrix: SymMatrix) -> Result<Self> {
        let ones = DVector::from_element(matrix.dim(), 1.0);
        let row_sums = matrix.as_matrix() * ones;
        let worst = row_sums.amax();
        if worst > 1e-10 * (1.0 + matrix.frobenius_norm()) {
            return Err(Error::InvalidParameter(format!("Laplacian row sums not zero (max {worst:e})")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: SymMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }

    pub fn to_graph(&self, drop_tol: f64) -> Result<Graph> {
        Graph::from_laplacian(&self.matrix, drop_tol)
    }

    pub fn max_row_sum(&self) -> f64 {
        (self.matrix.as_matrix() * DVector::from_element(self.dim(), 1.0)).amax()
    }

    /// Checks PSD with exactly one zero eigenvalue. `tol = None` uses `1e-8 · λ_max`.
    pub fn check_assumption1(&self, tol: Option<f64>) -> AssumptionCheck {
        check_assumption1_eig(&self.matrix.eig(), tol)
    }

    pub fn validated(self, tol: Option<f64>) -> Result<Self> {
        let check = self.check_assumption1(tol);
        if check.holds {
            Ok(self)
        } else {
            Err(Error::AssumptionViolated(check.diagnostics))
        }
    }

    /// `P L Pᵀ`
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self { matrix: self.matrix.transform(&permutation_matrix(perm)?) })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { matrix: self.matrix.scaled(c) }
    }
}

pub(crate) fn check_assumption1_eig(eig: &EigenDecomposition, tol: Option<f64>) -> AssumptionCheck {
    let n = eig.dim();
    let tol = tol.unwrap_or_else(|| (1e-8 * eig.max_eigenvalue().max(0.0)).max(f64::MIN_POSITIVE));
    let min = eig.min_eigenvalue();
    let second = if n > 1 { eig.eigenvalues[1] } else { f64::INFINITY };
    let nullity = eig.nullity(tol);
    let mut problems = Vec::new();
    if min <= -tol {
        problems.push(format!("negative eigenvalue {min:e}"));
    }
    if nullity != 1 {
        problems.push(format!("{nullity} eigenvalues with |λ| < {tol:e}"));
    }
    if n > 1 && second <= tol {
        problems.push(format!("second eigenvalue {second:e} not above {tol:e}"));
    }
    AssumptionCheck {
        holds: problems.is_empty(),
        tolerance: tol,
        min_eigenvalue: min,
        second_eigenvalue: second,
        nullity,
        diagnostics: problems.join("; "),
    }
}

/// Convenience wrapper matching the free-function form of the check.
pub fn check_assumption1(l: &LaplacianMatrix, tol: Option<f64>) -> AssumptionCheck {
    l.check_assumption1(tol)
}

/// `D^{-1/2} L D^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedLaplacian {
    matrix: SymMatrix,
    null_vector: DVector<f64>,
}

impl NormalizedLaplacian {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }

    /// `D^{1/2} 1`, normalized.
    pub fn null_vector(&self) -> &DVector<f64> {
        &self.null_vector
    }
}

pub fn normalized_laplacian(g: &Graph) -> Result<NormalizedLaplacian> {
    let d = g.degrees();
    if let Some(i) = d.iter().position(|&v| v <= 0.0) {
        return Err(Error::ZeroDegree(i));
    }
    let inv_sqrt: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut l = g.laplacian().into_matrix().into_matrix();
    for i in 0..l.nrows() {
        for j in 0..l.ncols() {
            l[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let null_vector = DVector::from_iterator(d.len(), d.iter().map(|v| v.sqrt())).normalize();
    Ok(NormalizedLaplacian { matrix: SymMatrix::symmetrize(l), null_vector })
}

/// Several edge sets over one shared node set, with optional node classes.
#[derive(Debug, Clone)]
pub struct MultiLayerGraph {
    layers: Vec<Graph>,
    labels: Option<Vec<usize>>,
}

impl MultiLayerGraph {
    pub fn new(layers: Vec<Graph>, labels: Option<Vec<usize>>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidParameter("multi-layer graph needs at least one layer".into()))?;
        for layer in &layers[1..] {
            if layer.num_nodes() != first.num_nodes() {
                return Err(Error::DimensionMismatch { expected: first.num_nodes(), found: layer.num_nodes() });
            }
            if layer.node_labels() != first.node_labels() {
                return Err(Error::InvalidParameter("layers must share node labels".into()));
            }
        }
        if let Some(l) = &labels {
            if l.len() != first.num_nodes() {
                return Err(Error::LengthMismatch(l.len(), first.num_nodes()));
            }
        }
        Ok(Self { layers, labels })
    }

    pub fn layers(&self) -> &[Graph] {
        &self.layers
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn num_nodes(&self) -> usize {
        self.layers[0].num_nodes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path2(w: f64) -> Graph {
        Graph::new(2, [(0, 1, w)]).unwrap()
    }

    fn triangle(w: f64) -> Graph {
        Graph::new(3, [(0, 1, w), (0, 2, w), (1, 2, w)]).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(path2(1.0).laplacian().matrix().as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(path2(4.0).laplacian().matrix().as_slice(), &[4.0, -4.0, -4.0, 4.0]);
        let t = triangle(1.0).laplacian();
        let expect = SymMatrix::from_row_slice(3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]).unwrap();
        assert_eq!(t.matrix(), &expect);
    }

    #[test]
    fn edges_are_canonicalized() {
        let g = Graph::new(3, [(2, 0, 1.5), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.edges()[0], Edge { i: 0, j: 1, weight: 2.0 });
        assert_eq!(g.edges()[1], Edge { i: 0, j: 2, weight: 1.5 });
        assert!(Graph::new(3, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(Graph::new(3, [(1, 1, 1.0)]).is_err());
        assert!(Graph::new(3, [(0, 3, 1.0)]).is_err());
    }

    #[test]
    fn assumption1_examples() {
        assert!(path2(1.0).laplacian().check_assumption1(None).holds);
        let empty = Graph::new(2, []).unwrap().laplacian().check_assumption1(None);
        assert!(!empty.holds);
        assert_eq!(empty.nullity, 2);
        let neg = path2(-1.0).laplacian().check_assumption1(None);
        assert!(!neg.holds);
        assert!((neg.min_eigenvalue + 2.0).abs() < 1e-14);
    }

    #[test]
    fn signed_graph_can_satisfy_assumption() {
        // triangle with one mildly negative edge stays PSD with a single zero eigenvalue
        let g = Graph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, -0.2)]).unwrap();
        assert!(g.laplacian().check_assumption1(None).holds);
    }

    #[test]
    fn normalized_laplacian_examples() {
        let n = normalized_laplacian(&path2(1.0)).unwrap();
        assert_eq!(n.matrix(), path2(1.0).laplacian().matrix());

        let t = normalized_laplacian(&triangle(1.0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { -0.5 };
                assert!((t.matrix()[(i, j)] - want).abs() < 1e-15);
            }
        }

        let star = Graph::new(3, [(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let s = normalized_laplacian(&star).unwrap();
        assert!((s.matrix()[(0, 1)] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.matrix()[(0, 2)] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((0..3).all(|i| (s.matrix()[(i, i)] - 1.0).abs() < 1e-15));
        let residual = s.matrix().as_matrix() * s.null_vector();
        assert!(residual.amax() < 1e-8);

        let isolated = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(normalized_laplacian(&isolated), Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn permutation_examples() {
        let g = triangle(1.0);
        assert_eq!(g.permute(&[0, 1, 2]).unwrap(), g);
        let p2 = path2(3.0);
        assert_eq!(p2.permute(&[1, 0]).unwrap().laplacian(), p2.laplacian());

        let path3 = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let perm = [1, 2, 0];
        let p = permutation_matrix(&perm).unwrap();
        let want = path3.laplacian().matrix().transform(&p);
        assert_eq!(path3.permute(&perm).unwrap().laplacian().matrix(), &want);
        assert!(matches!(path3.permute(&[0, 0, 1]), Err(Error::InvalidPermutation(_))));
    }

    #[test]
    fn laplacian_round_trip_through_matrix() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, -0.5), (2, 3, 2.0), (0, 3, 0.25)]).unwrap();
        let back = Graph::from_laplacian(g.laplacian().matrix(), 0.0).unwrap();
        assert_eq!(back, g);
        assert_eq!(Graph::from_adjacency(&g.adjacency()).unwrap(), g);
    }

    #[test]
    fn multilayer_requires_shared_nodes() {
        assert!(MultiLayerGraph::new(vec![path2(1.0), triangle(1.0)], None).is_err());
        assert!(MultiLayerGraph::new(vec![], None).is_err());
        let ml = MultiLayerGraph::new(vec![path2(1.0), path2(2.0)], Some(vec![0, 1])).unwrap();
        assert_eq!(ml.num_nodes(), 2);
    }
}
