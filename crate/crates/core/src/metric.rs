//! Bures-Wasserstein and baseline distances between graphs.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::embedding::SpectralFilter;
use crate::error::{Error, Result};
use crate::graphs::{Graph, LaplacianMatrix};
use crate::spectral::{psd_pinv_rel, psd_sqrt, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// Wasserstein-2 distance between `N(0, g(L0)²)` and `N(0, g(L1)²)`.
    BuresWasserstein(SpectralFilter),
    /// `‖L0 − L1‖_F`
    LaplacianFrobenius,
    /// `‖L0^† − L1^†‖_F`
    PinvLaplacianFrobenius,
}

impl Default for DistanceKind {
    fn default() -> Self {
        DistanceKind::BuresWasserstein(SpectralFilter::PinvSqrt)
    }
}

impl DistanceKind {
    pub fn is_bures_wasserstein(self) -> bool {
        matches!(self, DistanceKind::BuresWasserstein(_))
    }

    /// Per-matrix representation whose pairwise comparison gives the distance:
    /// `g(L)` (the covariance square root) for BW kinds, `L` or `L^†` otherwise.
    pub fn feature(self, l: &SymMatrix) -> Result<DistanceFeature> {
        let matrix = match self {
            DistanceKind::BuresWasserstein(g) => g.apply(l)?,
            DistanceKind::LaplacianFrobenius => l.clone(),
            DistanceKind::PinvLaplacianFrobenius => psd_pinv_rel(l)?,
        };
        Ok(DistanceFeature { kind: self, matrix })
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceKind::BuresWasserstein(SpectralFilter::PinvSqrt) => f.write_str("bw"),
            DistanceKind::BuresWasserstein(g) => write!(f, "bw:{g}"),
            DistanceKind::LaplacianFrobenius => f.write_str("frobenius"),
            DistanceKind::PinvLaplacianFrobenius => f.write_str("frobenius-pinv"),
        }
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bw" => Ok(DistanceKind::BuresWasserstein(SpectralFilter::PinvSqrt)),
            "frobenius" => Ok(DistanceKind::LaplacianFrobenius),
            "frobenius-pinv" => Ok(DistanceKind::PinvLaplacianFrobenius),
            other => match other.strip_prefix("bw:") {
                Some(filter) => Ok(DistanceKind::BuresWasserstein(filter.parse()?)),
                None => Err(Error::UnknownName(other.to_string())),
            },
        }
    }
}

/// A matrix prepared for repeated distance evaluations.
#[derive(Debug, Clone)]
pub struct DistanceFeature {
    kind: DistanceKind,
    matrix: SymMatrix,
}

impl DistanceFeature {
    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn distance(&self, other: &DistanceFeature) -> Result<f64> {
        if self.kind != other.kind {
            return Err(Error::InvalidParameter(format!("cannot compare {} with {}", self.kind, other.kind)));
        }
        if self.matrix.dim() != other.matrix.dim() {
            return Err(Error::DimensionMismatch { expected: self.matrix.dim(), found: other.matrix.dim() });
        }
        Ok(match self.kind {
            DistanceKind::BuresWasserstein(_) => procrustes_distance(&self.matrix, &other.matrix),
            _ => self.matrix.frobenius_distance(&other.matrix),
        })
    }
}

/// `min_U ‖A0 − A1 U‖_F` over orthogonal `U`, for symmetric PSD roots
/// `A_k = Σ_k^{1/2}`. This equals the Wasserstein-2 distance
/// `√(tr Σ0 + tr Σ1 − 2 tr (Σ0^{1/2} Σ1 Σ0^{1/2})^{1/2})`, but evaluated as a
/// difference of matrices it stays accurate when the distance is tiny.
pub fn procrustes_distance(a0: &SymMatrix, a1: &SymMatrix) -> f64 {
    let cross = a0.as_matrix() * a1.as_matrix();
    let rotation = polar_factor(&cross).transpose();
    (a0.as_matrix() - a1.as_matrix() * rotation).norm()
}

/// Orthogonal factor `Q` of `M = Q P`, from the eigenvectors `V` of `MᵀM`:
/// `Q = U Vᵀ` with `u_k = M v_k / ‖M v_k‖`. Directions with (near-)zero
/// singular values are completed orthonormally; any completion is optimal.
/// (nalgebra's bidiagonal SVD can return wrong factors for rank-deficient
/// products, which is the common case here.)
fn polar_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let eig = SymMatrix::symmetrize(m.transpose() * m).eig();
    // Descending singular values first, so QR keeps the reliable columns.
    let v = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, n - 1 - k)]);
    let floor = 1e-10 * eig.max_abs_eigenvalue().sqrt();
    let mut u = m * &v;
    for k in 0..n {
        let norm = u.column(k).norm();
        if norm > floor && norm > 0.0 {
            u.column_mut(k).unscale_mut(norm);
        } else {
            u.column_mut(k).copy_from(&v.column(k));
        }
    }
    let mut q = u.clone().qr().q();
    for k in 0..n {
        if q.column(k).dot(&u.column(k)) < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q * v.transpose()
}

/// Wasserstein-2 distance between `N(0, Σ0)` and `N(0, Σ1)`; degenerate
/// covariances are allowed.
pub fn bw_gaussian_distance(sigma0: &SymMatrix, sigma1: &SymMatrix) -> Result<f64> {
    check_same_dim(sigma0.dim(), sigma1.dim())?;
    Ok(procrustes_distance(&psd_sqrt(sigma0)?, &psd_sqrt(sigma1)?))
}

/// The same distance through the trace formula: eigenvalues of the symmetric
/// product `Σ0^{1/2} Σ1 Σ0^{1/2}`, with negatives down to `−1e-10` clamped to 0.
pub fn bw_gaussian_distance_trace(sigma0: &SymMatrix, sigma1: &SymMatrix) -> Result<f64> {
    check_same_dim(sigma0.dim(), sigma1.dim())?;
    let root0 = psd_sqrt(sigma0)?;
    psd_sqrt(sigma1)?;
    let inner = sigma1.congruence(&root0).eig();
    if inner.min_eigenvalue() < -1e-10 {
        return Err(Error::NotPsd { min_eigenvalue: inner.min_eigenvalue() });
    }
    let cross: f64 = inner.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((sigma0.trace() + sigma1.trace() - 2.0 * cross).max(0.0).sqrt())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a, found: b })
    }
}

/// Distance between two (Laplacian) matrices without assumption checks.
pub fn laplacian_distance(l0: &SymMatrix, l1: &SymMatrix, kind: DistanceKind) -> Result<f64> {
    check_same_dim(l0.dim(), l1.dim())?;
    kind.feature(l0)?.distance(&kind.feature(l1)?)
}

fn validated_laplacian(g: &Graph, kind: DistanceKind) -> Result<LaplacianMatrix> {
    let l = g.laplacian();
    if kind.is_bures_wasserstein() {
        l.validated(None)
    } else {
        Ok(l)
    }
}

pub fn graph_distance(g0: &Graph, g1: &Graph, kind: DistanceKind) -> Result<f64> {
    check_same_dim(g0.num_nodes(), g1.num_nodes())?;
    let l0 = validated_laplacian(g0, kind)?;
    let l1 = validated_laplacian(g1, kind)?;
    laplacian_distance(l0.matrix(), l1.matrix(), kind)
}

/// Symmetric table of all pairwise distances of prepared features.
pub fn pairwise_feature_distances(features: &[DistanceFeature]) -> Result<DMatrix<f64>> {
    let n = features.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| features[i].distance(&features[j]))
        .collect::<Result<Vec<_>>>()?;
    let mut d = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[(i, j)] = v;
        d[(j, i)] = v;
    }
    Ok(d)
}

pub fn pairwise_distances(graphs: &[Graph], kind: DistanceKind) -> Result<DMatrix<f64>> {
    if let Some(first) = graphs.first() {
        for g in graphs {
            check_same_dim(first.num_nodes(), g.num_nodes())?;
        }
    }
    let features = graphs
        .par_iter()
        .map(|g| kind.feature(validated_laplacian(g, kind)?.matrix()))
        .collect::<Result<Vec<_>>>()?;
    pairwise_feature_distances(&features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::psd_pinv;

    fn path2(w: f64) -> Graph {
        Graph::new(2, [(0, 1, w)]).unwrap()
    }

    fn triangle(w: f64) -> Graph {
        Graph::new(3, [(0, 1, w), (0, 2, w), (1, 2, w)]).unwrap()
    }

    fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix::symmetrize(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(d)))
    }

    #[test]
    fn gaussian_distance_examples() {
        let s = diag(&[1.0, 2.0, 0.5]);
        assert!(bw_gaussian_distance(&s, &s).unwrap() < 1e-14);

        let a = [1.0, 4.0, 0.25, 0.0];
        let b = [9.0, 1.0, 0.36, 2.0];
        let want: f64 = a.iter().zip(&b).map(|(x, y): (&f64, &f64)| (x.sqrt() - y.sqrt()).powi(2)).sum::<f64>().sqrt();
        assert!((bw_gaussian_distance(&diag(&a), &diag(&b)).unwrap() - want).abs() < 1e-12);
        assert!((bw_gaussian_distance_trace(&diag(&a), &diag(&b)).unwrap() - want).abs() < 1e-12);

        let p1 = psd_pinv(path2(1.0).laplacian().matrix()).unwrap();
        let p4 = psd_pinv(path2(4.0).laplacian().matrix()).unwrap();
        let d = bw_gaussian_distance(&p1, &p4).unwrap();
        assert!((d - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);

        assert!(matches!(bw_gaussian_distance(&diag(&[-1.0, 1.0]), &diag(&[1.0, 1.0])), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn graph_distance_examples() {
        let kinds = [
            DistanceKind::default(),
            DistanceKind::BuresWasserstein(SpectralFilter::Pinv),
            DistanceKind::BuresWasserstein(SpectralFilter::Sqrt),
            DistanceKind::BuresWasserstein(SpectralFilter::Identity),
            DistanceKind::LaplacianFrobenius,
            DistanceKind::PinvLaplacianFrobenius,
        ];
        for kind in kinds {
            assert!(graph_distance(&triangle(2.0), &triangle(2.0), kind).unwrap() < 1e-12, "{kind}");
        }
        let d = graph_distance(&path2(1.0), &path2(4.0), DistanceKind::default()).unwrap();
        assert!((d - 0.353_553_390_593_273_8).abs() < 1e-12);
        let want = (2.0 / 3.0 + 2.0 / 9.0 - 4.0 / 27f64.sqrt()).sqrt();
        let d = graph_distance(&triangle(1.0), &triangle(3.0), DistanceKind::default()).unwrap();
        assert!((d - want).abs() < 1e-12 && (want - 0.345_092).abs() < 1e-6);
    }

    #[test]
    fn graph_distance_errors() {
        let disconnected = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            graph_distance(&disconnected, &triangle(1.0), DistanceKind::default()),
            Err(Error::AssumptionViolated(_))
        ));
        assert!(matches!(
            graph_distance(&path2(1.0), &triangle(1.0), DistanceKind::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(graph_distance(&disconnected, &triangle(1.0), DistanceKind::LaplacianFrobenius).is_ok());
    }

    #[test]
    fn pairwise_examples() {
        let d = pairwise_distances(&[path2(1.0)], DistanceKind::default()).unwrap();
        assert_eq!(d, DMatrix::zeros(1, 1));
        let d = pairwise_distances(&[triangle(1.0), triangle(1.0)], DistanceKind::default()).unwrap();
        assert!(d.amax() < 1e-12);
        let d = pairwise_distances(&[path2(1.0), path2(4.0)], DistanceKind::default()).unwrap();
        assert!((d[(0, 1)] - 0.35355339).abs() < 1e-8 && d[(0, 1)] == d[(1, 0)] && d[(0, 0)] == 0.0);
    }

    #[test]
    fn kind_names_round_trip() {
        for s in ["bw", "bw:pinv", "bw:sqrt", "bw:identity", "frobenius", "frobenius-pinv"] {
            assert_eq!(s.parse::<DistanceKind>().unwrap().to_string(), s);
        }
        assert_eq!("bw:pinv_sqrt".parse::<DistanceKind>().unwrap(), DistanceKind::default());
        assert!("l2".parse::<DistanceKind>().is_err());
    }
}
