//! Semi-supervised node classification regularized by a mean of layer
//! Laplacians: `f^{(r)} = argmin ‖f − Y^{(r)}‖² + ρ fᵀ L̄ f = (I + ρL̄)⁻¹ Y^{(r)}`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;

use crate::barycenter::Weights;
use crate::baselines::{mean_of, MeanConfig, MeanKind, NullSpace};
use crate::error::{Error, Result};
use crate::graphs::{normalized_laplacian, rng_from_seed, MultiLayerGraph};
use crate::learn::default_rho;
use crate::spectral::SymMatrix;

#[derive(Debug, Clone)]
pub struct SslProblem {
    /// Normalized Laplacians of the layers.
    pub layers: Vec<SymMatrix>,
    /// Observed node → class in `0..n_classes`.
    pub observed: BTreeMap<usize, usize>,
    pub n_classes: usize,
    pub rho: f64,
    pub mean_kind: MeanKind,
}

impl SslProblem {
    pub fn new(
        layers: Vec<SymMatrix>,
        observed: BTreeMap<usize, usize>,
        n_classes: usize,
        rho: Option<f64>,
        mean_kind: MeanKind,
    ) -> Result<Self> {
        let n = layers.first().map(SymMatrix::dim).ok_or(Error::InvalidParameter("no layers".into()))?;
        if let Some(l) = layers.iter().find(|l| l.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: l.dim() });
        }
        if observed.is_empty() {
            return Err(Error::InvalidParameter("no observed nodes".into()));
        }
        if let Some((&node, &class)) = observed.iter().find(|(&i, &c)| i >= n || c >= n_classes) {
            return Err(Error::InvalidParameter(format!("observation node {node} class {class} out of range")));
        }
        for r in 0..n_classes {
            if !observed.values().any(|&c| c == r) {
                return Err(Error::InvalidParameter(format!("class {r} has no observed node")));
            }
        }
        let rho = rho.unwrap_or_else(|| default_rho(mean_kind));
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be nonnegative, got {rho}")));
        }
        Ok(Self { layers, observed, n_classes, rho, mean_kind })
    }

    /// Builds the layers' normalized Laplacians from a multi-layer graph.
    pub fn from_multilayer(
        graph: &MultiLayerGraph,
        observed: BTreeMap<usize, usize>,
        n_classes: usize,
        rho: Option<f64>,
        mean_kind: MeanKind,
    ) -> Result<Self> {
        let layers = graph
            .layers()
            .iter()
            .map(|g| Ok(normalized_laplacian(g)?.into_matrix()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers, observed, n_classes, rho, mean_kind)
    }

    pub fn num_nodes(&self) -> usize {
        self.layers[0].dim()
    }

    /// One-hot matrix `Y` (N × k) of the observations.
    pub fn targets(&self) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(self.num_nodes(), self.n_classes);
        for (&i, &c) in &self.observed {
            y[(i, c)] = 1.0;
        }
        y
    }
}

#[derive(Debug, Clone)]
pub struct SslResult {
    pub labels: Vec<usize>,
    /// `f^{(r)}` as columns.
    pub scores: DMatrix<f64>,
    pub mean: SymMatrix,
}

impl SslResult {
    /// Error rate over nodes that were not observed.
    pub fn unobserved_error(&self, truth: &[usize], observed: &BTreeMap<usize, usize>) -> Result<f64> {
        if truth.len() != self.labels.len() {
            return Err(Error::LengthMismatch(truth.len(), self.labels.len()));
        }
        let (mut wrong, mut total) = (0usize, 0usize);
        for (i, (a, b)) in self.labels.iter().zip(truth).enumerate() {
            if !observed.contains_key(&i) {
                total += 1;
                wrong += usize::from(a != b);
            }
        }
        Ok(if total == 0 { 0.0 } else { wrong as f64 / total as f64 })
    }
}

/// Row-wise argmax; ties go to the smallest class index.
pub fn argmax_rows(scores: &DMatrix<f64>) -> Vec<usize> {
    scores
        .row_iter()
        .map(|row| {
            let mut best = 0;
            for (r, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = r;
                }
            }
            best
        })
        .collect()
}

/// Solves `(I + ρ L̄) F = Y` given an already computed mean `L̄`.
pub fn ssl_solve(mean: &SymMatrix, y: &DMatrix<f64>, rho: f64) -> Result<DMatrix<f64>> {
    let n = mean.dim();
    let system = DMatrix::identity(n, n) + mean.as_matrix() * rho;
    if let Some(chol) = system.clone().cholesky() {
        return Ok(chol.solve(y));
    }
    system.lu().solve(y).ok_or(Error::SingularSystem)
}

pub fn ssl_classify(problem: &SslProblem, cfg: &MeanConfig) -> Result<SslResult> {
    let cfg = MeanConfig { null_space: NullSpace::PerMatrix, ..cfg.clone() };
    let weights = Weights::uniform(problem.layers.len())?;
    let mean = mean_of(&problem.layers, &weights, problem.mean_kind, &cfg)?;
    let scores = ssl_solve(&mean, &problem.targets(), problem.rho)?;
    Ok(SslResult { labels: argmax_rows(&scores), scores, mean })
}

/// Reveals `⌈fraction · |class|⌉` (at least one) uniformly chosen nodes of
/// every class.
pub fn stratified_observed(labels: &[usize], fraction: f64, seed: u64) -> Result<BTreeMap<usize, usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("observed fraction {fraction} not in (0, 1]")));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut rng = rng_from_seed(seed);
    let mut observed = BTreeMap::new();
    for (c, mut members) in by_class {
        members.shuffle(&mut rng);
        let take = ((fraction * members.len() as f64).ceil() as usize).max(1);
        observed.extend(members[..take].iter().map(|&i| (i, c)));
    }
    Ok(observed)
}
