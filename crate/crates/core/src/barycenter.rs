//! Bures-Wasserstein means of graphs.
//!
//! The mean of Laplacians `L_1..L_m` with weights `λ` is found in the
//! embedding space: each `L_j` becomes the SPD covariance `Σ_j` and the
//! barycenter `S` solves `S = Σ_j λ_j (S^{1/2} Σ_j S^{1/2})^{1/2}`, iterated as
//!
//! ```text
//! S ← S^{-1/2} (Σ_j λ_j (S^{1/2} Σ_j S^{1/2})^{1/2})² S^{-1/2}
//! ```
//!
//! until successive iterates differ by at most `tol` in Frobenius norm. The
//! mean Laplacian is recovered with the inverse of the embedding.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::embedding::{embed_filtered, embed_general, ones_unit, unembed_filtered, CovarianceEmbedding, SpectralFilter};
use crate::error::{Error, Result};
use crate::graphs::{Graph, LaplacianMatrix};
use crate::metric::DistanceKind;
use crate::spectral::{psd_pinv, psd_pinv_rel, psd_pinv_sqrt, psd_sqrt, SymMatrix};

/// Relative magnitude below which mean-Laplacian entries are not reported as edges.
pub const EDGE_DROP_TOL: f64 = 1e-12;

/// Strictly positive weights, normalized to sum to one at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(w) = raw.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not strictly positive")));
        }
        let total: f64 = raw.iter().sum();
        Ok(Self(raw.into_iter().map(|w| w / total).collect()))
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct BarycenterProblem {
    laplacians: Vec<LaplacianMatrix>,
    weights: Weights,
    filter: SpectralFilter,
}

impl BarycenterProblem {
    /// Validates dimensions, weight count and the single-zero-eigenvalue
    /// assumption of every input.
    pub fn new(laplacians: Vec<LaplacianMatrix>, weights: Weights, filter: SpectralFilter) -> Result<Self> {
        let n = laplacians.first().map(LaplacianMatrix::dim).ok_or(Error::InvalidParameter("no graphs".into()))?;
        if laplacians.len() != weights.len() {
            return Err(Error::LengthMismatch(laplacians.len(), weights.len()));
        }
        let laplacians = laplacians
            .into_iter()
            .map(|l| {
                if l.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: l.dim() });
                }
                l.validated(None)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { laplacians, weights, filter })
    }

    pub fn from_graphs(graphs: &[Graph], weights: Weights, filter: SpectralFilter) -> Result<Self> {
        Self::new(graphs.iter().map(Graph::laplacian).collect(), weights, filter)
    }

    pub fn laplacians(&self) -> &[LaplacianMatrix] {
        &self.laplacians
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn filter(&self) -> SpectralFilter {
        self.filter
    }

    pub fn dim(&self) -> usize {
        self.laplacians[0].dim()
    }

    pub fn embeddings(&self) -> Result<Vec<CovarianceEmbedding>> {
        self.laplacians.par_iter().map(|l| embed_filtered(l, self.filter)).collect()
    }

    /// `Σ_j λ_j d(L, L_j)²` under the problem's filtered BW distance.
    pub fn objective(&self, l: &SymMatrix) -> Result<f64> {
        let kind = DistanceKind::BuresWasserstein(self.filter);
        let target = kind.feature(l)?;
        self.laplacians
            .iter()
            .zip(self.weights.as_slice())
            .map(|(lj, w)| Ok(w * target.distance(&kind.feature(lj.matrix())?)?.powi(2)))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    FirstEmbedding,
    #[default]
    ArithmeticEmbedding,
    /// An SPD starting point in the embedding space.
    Provided(SymMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 100, init: Init::default() }
    }
}

impl FixedPointConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "fixed point needs tol > 0 and max_iter ≥ 1 (got {}, {})",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

/// Raw result of the fixed-point iteration in the embedding space.
#[derive(Debug, Clone)]
pub struct FixedPointSolution {
    pub barycenter: SymMatrix,
    pub iterations: usize,
    /// `‖S⁽ⁿ⁾ − S⁽ⁿ⁻¹⁾‖_F` for every update, in order.
    pub steps: Vec<f64>,
    /// `‖S − Σ_j λ_j (S^{1/2} Σ_j S^{1/2})^{1/2}‖_F` at the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

impl FixedPointSolution {
    pub fn final_step(&self) -> f64 {
        self.steps.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Weighted sum `Σ_j λ_j (S^{1/2} Σ_j S^{1/2})^{1/2}`, plus `S^{-1/2}`.
fn weighted_root_sum(s: &SymMatrix, sigmas: &[SymMatrix], weights: &[f64]) -> Result<(SymMatrix, SymMatrix)> {
    let eig = s.eig();
    if eig.min_eigenvalue() <= 0.0 {
        return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
    }
    let s_half = eig.map(f64::sqrt, Some(0.0))?;
    let s_inv_half = eig.map(|x| 1.0 / x.sqrt(), Some(0.0))?;
    let roots = sigmas
        .par_iter()
        .map(|sigma| psd_sqrt(&sigma.congruence(&s_half)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = DMatrix::zeros(s.dim(), s.dim());
    for (root, w) in roots.iter().zip(weights) {
        total += root.as_matrix() * *w;
    }
    Ok((SymMatrix::symmetrize(total), s_inv_half))
}

/// Runs the barycenter fixed point on SPD matrices. Never fails on slow
/// convergence; the caller inspects `converged`.
pub fn solve_fixed_point(
    sigmas: &[SymMatrix],
    weights: &Weights,
    init: SymMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointSolution> {
    let w = weights.as_slice();
    let mut s = init;
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let (t, s_inv_half) = weighted_root_sum(&s, sigmas, w)?;
        let t_sq = SymMatrix::symmetrize(t.as_matrix() * t.as_matrix());
        let next = t_sq.congruence(&s_inv_half);
        let step = next.frobenius_distance(&s);
        steps.push(step);
        s = next;
        if step <= tol {
            converged = true;
            break;
        }
    }
    let (t, _) = weighted_root_sum(&s, sigmas, w)?;
    let residual = s.frobenius_distance(&t);
    Ok(FixedPointSolution { barycenter: s, iterations: steps.len(), steps, residual, converged })
}

fn initial_point(cfg: &FixedPointConfig, sigmas: &[SymMatrix], weights: &Weights) -> Result<SymMatrix> {
    let n = sigmas[0].dim();
    match &cfg.init {
        Init::FirstEmbedding => Ok(sigmas[0].clone()),
        Init::ArithmeticEmbedding => {
            let mut total = DMatrix::zeros(n, n);
            for (s, w) in sigmas.iter().zip(weights.as_slice()) {
                total += s.as_matrix() * *w;
            }
            Ok(SymMatrix::symmetrize(total))
        }
        Init::Provided(m) => {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
            }
            Ok(m.clone())
        }
    }
}

fn run(sigmas: &[SymMatrix], weights: &Weights, cfg: &FixedPointConfig, init: SymMatrix) -> Result<FixedPointSolution> {
    let solution = solve_fixed_point(sigmas, weights, init, cfg.tol, cfg.max_iter)?;
    if !solution.converged {
        return Err(Error::NotConverged { iterations: solution.iterations, final_step: solution.final_step() });
    }
    Ok(solution)
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub mean_graph: Graph,
    pub mean_laplacian: LaplacianMatrix,
    /// The barycenter in the embedding space.
    pub covariance: SymMatrix,
    pub iterations: usize,
    pub steps: Vec<f64>,
    pub final_step: f64,
    pub residual: f64,
    pub converged: bool,
}

impl FixedPointReport {
    fn from_solution(solution: FixedPointSolution, mean_laplacian: LaplacianMatrix) -> Result<Self> {
        let mean_graph = mean_laplacian.to_graph(EDGE_DROP_TOL)?;
        Ok(Self {
            mean_graph,
            mean_laplacian,
            final_step: solution.final_step(),
            covariance: solution.barycenter,
            iterations: solution.iterations,
            steps: solution.steps,
            residual: solution.residual,
            converged: solution.converged,
        })
    }
}

/// Bures-Wasserstein (filter) mean of the problem's graphs.
pub fn bw_mean(problem: &BarycenterProblem, cfg: &FixedPointConfig) -> Result<FixedPointReport> {
    cfg.validate()?;
    let sigmas: Vec<SymMatrix> = problem.embeddings()?.into_iter().map(|e| e.matrix().clone()).collect();
    let init = initial_point(cfg, &sigmas, problem.weights())?;
    let solution = run(&sigmas, problem.weights(), cfg, init)?;
    let n = problem.dim();
    let cov = CovarianceEmbedding::from_spd(solution.barycenter.clone(), ones_unit(n), problem.filter())?;
    let mean = unembed_filtered(&cov, problem.filter())?;
    FixedPointReport::from_solution(solution, mean)
}

/// Result of [`bw_mean_general`].
#[derive(Debug, Clone)]
pub struct GeneralMeanReport {
    pub mean: SymMatrix,
    pub null_vector: DVector<f64>,
    pub solution: FixedPointSolution,
}

/// Mean of PSD operators whose one-dimensional null spaces may differ (for
/// example normalized Laplacians). Each operator `M_j` with null direction
/// `v_j` is embedded as `g(M_j + v_j v_jᵀ)²`; the mean is read back as
/// `g⁻¹(S^{1/2}) − v̄ v̄ᵀ` with `v̄` the normalized weighted average of the
/// `v_j`, and negative eigenvalues of the result are clamped to zero.
/// When all null spaces equal span{1} this coincides with [`bw_mean`].
pub fn bw_mean_general(
    operators: &[SymMatrix],
    weights: &Weights,
    filter: SpectralFilter,
    cfg: &FixedPointConfig,
) -> Result<GeneralMeanReport> {
    cfg.validate()?;
    if operators.is_empty() || operators.len() != weights.len() {
        return Err(Error::LengthMismatch(operators.len(), weights.len()));
    }
    let embeddings = operators
        .par_iter()
        .map(|m| embed_general(m, filter))
        .collect::<Result<Vec<_>>>()?;
    let n = operators[0].dim();
    let mut v_bar = DVector::zeros(n);
    for (e, w) in embeddings.iter().zip(weights.as_slice()) {
        if e.source_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: e.source_dim() });
        }
        v_bar += e.null_vector() * *w;
    }
    let v_bar = v_bar.normalize();
    let sigmas: Vec<SymMatrix> = embeddings.iter().map(|e| e.matrix().clone()).collect();
    let init = initial_point(cfg, &sigmas, weights)?;
    let solution = run(&sigmas, weights, cfg, init)?;
    let cov = CovarianceEmbedding::from_spd(solution.barycenter.clone(), v_bar.clone(), filter)?;
    let raw = cov.to_operator()?;
    let mean = raw.eig().map(|x| x.max(0.0), Some(0.0))?;
    Ok(GeneralMeanReport { mean, null_vector: v_bar, solution })
}

fn check_pair(l0: &LaplacianMatrix, l1: &LaplacianMatrix) -> Result<()> {
    if l0.dim() != l1.dim() {
        return Err(Error::DimensionMismatch { expected: l0.dim(), found: l1.dim() });
    }
    for l in [l0, l1] {
        let check = l.check_assumption1(None);
        if !check.holds {
            return Err(Error::AssumptionViolated(check.diagnostics));
        }
    }
    Ok(())
}

/// `(L0^{†/2} L1^† L0^{†/2})^{1/2}` together with `L0^{1/2}` and `L0^†`.
fn geodesic_parts(l0: &LaplacianMatrix, l1: &LaplacianMatrix) -> Result<(SymMatrix, SymMatrix, SymMatrix)> {
    let l0_half = psd_sqrt(l0.matrix())?;
    let l0_pinv = psd_pinv(l0.matrix())?;
    let l0_pinv_half = psd_pinv_sqrt(l0.matrix())?;
    let l1_pinv = psd_pinv(l1.matrix())?;
    let inner = psd_sqrt(&l1_pinv.congruence(&l0_pinv_half))?;
    Ok((inner, l0_half, l0_pinv))
}

/// Closed-form two-graph mean with weights `(1 − t, t)`:
/// `L_t = S_t^†`, `S_t = L0^{1/2} ((1−t) L0^† + t (L0^{†/2} L1^† L0^{†/2})^{1/2})² L0^{1/2}`.
pub fn interpolate_laplacian(l0: &LaplacianMatrix, l1: &LaplacianMatrix, t: f64) -> Result<LaplacianMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("interpolation parameter {t} outside [0, 1]")));
    }
    check_pair(l0, l1)?;
    if t == 0.0 {
        return Ok(l0.clone());
    }
    if t == 1.0 {
        return Ok(l1.clone());
    }
    let (inner, l0_half, l0_pinv) = geodesic_parts(l0, l1)?;
    let mid = l0_pinv.scaled(1.0 - t).add(&inner.scaled(t));
    let mid_sq = SymMatrix::symmetrize(mid.as_matrix() * mid.as_matrix());
    let cov = mid_sq.congruence(&l0_half);
    Ok(LaplacianMatrix::from_matrix_unchecked(psd_pinv_rel(&cov)?))
}

pub fn interpolate(g0: &Graph, g1: &Graph, t: f64) -> Result<Graph> {
    if t == 0.0 || t == 1.0 {
        check_pair(&g0.laplacian(), &g1.laplacian())?;
        return Ok(if t == 0.0 { g0.clone() } else { g1.clone() });
    }
    interpolate_laplacian(&g0.laplacian(), &g1.laplacian(), t)?.to_graph(EDGE_DROP_TOL)
}

/// Symmetric optimal transport map between the smooth-signal Gaussians of
/// two graphs, `T = L0^{1/2} (L0^{†/2} L1^† L0^{†/2})^{1/2} L0^{1/2}`, which
/// satisfies `T L0^† T = L1^†` and has range span{1}⊥.
pub fn transport_map(g0: &Graph, g1: &Graph) -> Result<SymMatrix> {
    let (l0, l1) = (g0.laplacian(), g1.laplacian());
    check_pair(&l0, &l1)?;
    let (inner, l0_half, _) = geodesic_parts(&l0, &l1)?;
    Ok(inner.congruence(&l0_half))
}

/// `N × (N−1)` orthonormal basis of span{1}⊥ (Helmert contrasts).
pub fn centered_basis(n: usize) -> DMatrix<f64> {
    let mut u = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            u[(i, k - 1)] = 1.0 / norm;
        }
        u[(k, k - 1)] = -(k as f64) / norm;
    }
    u
}

/// Independent route to the default-filter mean: project the degenerate
/// covariances `L_j^†` onto an orthonormal basis `U` of span{1}⊥, solve the
/// nondegenerate `(N−1)`-dimensional barycenter there, and lift back as
/// `L = (U Σ̄ Uᵀ)^†`. Residual and steps refer to the projected problem.
pub fn bw_mean_projected_oracle(problem: &BarycenterProblem, cfg: &FixedPointConfig) -> Result<FixedPointReport> {
    cfg.validate()?;
    if problem.filter() != SpectralFilter::PinvSqrt {
        return Err(Error::InvalidParameter("the projected solver supports only the default filter".into()));
    }
    let n = problem.dim();
    let u = centered_basis(n);
    let u_t = u.transpose();
    let sigmas = problem
        .laplacians()
        .par_iter()
        .map(|l| Ok(psd_pinv_rel(l.matrix())?.transform(&u_t)))
        .collect::<Result<Vec<_>>>()?;
    let init = match &cfg.init {
        Init::Provided(m) => {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
            }
            Init::Provided(m.transform(&u_t))
        }
        other => other.clone(),
    };
    let projected_cfg = FixedPointConfig { init, ..cfg.clone() };
    let start = initial_point(&projected_cfg, &sigmas, problem.weights())?;
    let solution = run(&sigmas, problem.weights(), cfg, start)?;
    let lifted = solution.barycenter.transform(&u);
    let mean = LaplacianMatrix::from_matrix_unchecked(psd_pinv_rel(&lifted)?);
    FixedPointReport::from_solution(solution, mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path2(w: f64) -> Graph {
        Graph::new(2, [(0, 1, w)]).unwrap()
    }

    fn half_half(graphs: &[Graph]) -> BarycenterProblem {
        BarycenterProblem::from_graphs(graphs, Weights::uniform(graphs.len()).unwrap(), SpectralFilter::PinvSqrt)
            .unwrap()
    }

    #[test]
    fn weights_normalize_and_validate() {
        let w = Weights::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.75]);
        assert!(Weights::new(vec![]).is_err());
        assert!(Weights::new(vec![1.0, 0.0]).is_err());
        assert!(Weights::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn single_graph_mean_is_itself() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.5)]).unwrap();
        let r = bw_mean(&half_half(std::slice::from_ref(&g)), &FixedPointConfig::default()).unwrap();
        assert!(r.mean_laplacian.matrix().frobenius_distance(g.laplacian().matrix()) < 1e-9);
    }

    #[test]
    fn identical_inputs_converge_immediately() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let cfg = FixedPointConfig { init: Init::FirstEmbedding, ..Default::default() };
        let r = bw_mean(&half_half(&[g.clone(), g.clone(), g.clone()]), &cfg).unwrap();
        assert!(r.iterations <= 1);
        assert!(r.mean_laplacian.matrix().frobenius_distance(g.laplacian().matrix()) < 1e-9);
    }

    #[test]
    fn path2_mean_weight() {
        let r = bw_mean(&half_half(&[path2(1.0), path2(4.0)]), &FixedPointConfig::default()).unwrap();
        assert!((r.mean_graph.weight(0, 1).unwrap() - 16.0 / 9.0).abs() < 1e-10);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn interpolation_examples() {
        let (g0, g1) = (path2(1.0), path2(4.0));
        assert_eq!(interpolate(&g0, &g1, 0.0).unwrap(), g0);
        assert_eq!(interpolate(&g0, &g1, 1.0).unwrap(), g1);
        let mid = interpolate(&g0, &g1, 0.5).unwrap();
        assert!((mid.weight(0, 1).unwrap() - 16.0 / 9.0).abs() < 1e-12);
        for t in [0.1, 0.5, 0.9] {
            let same = interpolate(&g1, &g1, t).unwrap();
            assert!((same.weight(0, 1).unwrap() - 4.0).abs() < 1e-12);
        }
        assert!(interpolate(&g0, &g1, 1.5).is_err());
    }

    #[test]
    fn transport_map_examples() {
        let t = transport_map(&path2(1.0), &path2(4.0)).unwrap();
        let e = t.eig();
        assert!(e.eigenvalues[0].abs() < 1e-14 && (e.eigenvalues[1] - 0.5).abs() < 1e-14);

        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let t = transport_map(&g, &g).unwrap();
        let projector = SymMatrix::identity(3).sub(&SymMatrix::ones_projector(3));
        assert!(t.frobenius_distance(&projector) < 1e-12);
    }

    #[test]
    fn projected_oracle_matches_closed_form() {
        let p = half_half(&[path2(1.0), path2(4.0)]);
        let r = bw_mean_projected_oracle(&p, &FixedPointConfig::default()).unwrap();
        assert!((r.mean_graph.weight(0, 1).unwrap() - 16.0 / 9.0).abs() < 1e-10);
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let single = bw_mean_projected_oracle(&half_half(std::slice::from_ref(&g)), &FixedPointConfig::default())
            .unwrap();
        assert!(single.mean_laplacian.matrix().frobenius_distance(g.laplacian().matrix()) < 1e-9);
    }

    #[test]
    fn centered_basis_is_orthonormal() {
        let u = centered_basis(6);
        let gram = u.transpose() * &u;
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-15);
        assert!((u.transpose() * DVector::from_element(6, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let disconnected = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            BarycenterProblem::from_graphs(&[disconnected], Weights::uniform(1).unwrap(), SpectralFilter::PinvSqrt),
            Err(Error::AssumptionViolated(_))
        ));
        assert!(BarycenterProblem::from_graphs(&[path2(1.0)], Weights::uniform(2).unwrap(), SpectralFilter::PinvSqrt)
            .is_err());
        let cfg = FixedPointConfig { max_iter: 1, tol: 1e-300, init: Init::FirstEmbedding };
        let p = half_half(&[path2(1.0), path2(4.0)]);
        assert!(matches!(bw_mean(&p, &cfg), Err(Error::NotConverged { iterations: 1, .. })));
    }
}
