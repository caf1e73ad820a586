//! Covariance embeddings of graphs.
//!
//! A Laplacian `L` with a one-dimensional null space spanned by the unit
//! vector `v` is shifted to the SPD matrix `L + v vᵀ`, filtered eigenvalue-wise
//! and squared: `Σ = g(L + v vᵀ)²`. For combinatorial Laplacians `v = 1/√N`,
//! so the shift is `J/N`, and the default filter `g(x) = x^{-1/2}` gives
//! `Σ = L^† + J/N`. The null direction always carries eigenvalue 1 since
//! `g(1) = 1` for every filter.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graphs::LaplacianMatrix;
use crate::spectral::{null_space_tol, EigenDecomposition, SymMatrix};

/// Eigenvalue maps of the supported graph filters, from most low-pass to most high-pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SpectralFilter {
    /// `g(L) = L^†`
    Pinv,
    /// `g(L) = L^{†/2}`, the plain smooth-signal embedding.
    #[default]
    PinvSqrt,
    /// `g(L) = L^{1/2}`
    Sqrt,
    /// `g(L) = L`
    Identity,
}

impl SpectralFilter {
    pub const ALL: [SpectralFilter; 4] =
        [SpectralFilter::Pinv, SpectralFilter::PinvSqrt, SpectralFilter::Sqrt, SpectralFilter::Identity];

    pub fn forward(self, x: f64) -> f64 {
        match self {
            SpectralFilter::Pinv => 1.0 / x,
            SpectralFilter::PinvSqrt => 1.0 / x.sqrt(),
            SpectralFilter::Sqrt => x.sqrt(),
            SpectralFilter::Identity => x,
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            SpectralFilter::Pinv => 1.0 / y,
            SpectralFilter::PinvSqrt => 1.0 / (y * y),
            SpectralFilter::Sqrt => y * y,
            SpectralFilter::Identity => y,
        }
    }

    /// Forward map with pseudo semantics at zero: every filter sends 0 to 0.
    pub fn forward_pseudo(self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.forward(x)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpectralFilter::Pinv => "pinv",
            SpectralFilter::PinvSqrt => "pinv_sqrt",
            SpectralFilter::Sqrt => "sqrt",
            SpectralFilter::Identity => "identity",
        }
    }

    /// `g(L)` of a PSD matrix with pseudo semantics on its null space, which
    /// is identified with the relative [`null_space_tol`].
    pub fn apply(self, l: &SymMatrix) -> Result<SymMatrix> {
        let eig = l.eig();
        let tol = null_space_tol(&eig);
        if eig.min_eigenvalue() < -tol {
            return Err(Error::NotPsd { min_eigenvalue: eig.min_eigenvalue() });
        }
        eig.map(|x| self.forward_pseudo(x), Some(tol))
    }
}

impl fmt::Display for SpectralFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpectralFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pinv" => Ok(SpectralFilter::Pinv),
            "pinv_sqrt" => Ok(SpectralFilter::PinvSqrt),
            "sqrt" => Ok(SpectralFilter::Sqrt),
            "identity" => Ok(SpectralFilter::Identity),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

/// Strictly positive definite covariance `Σ = g(L + v vᵀ)²` together with its
/// eigendecomposition and the null direction `v` of the source operator.
#[derive(Debug, Clone)]
pub struct CovarianceEmbedding {
    matrix: SymMatrix,
    eig: EigenDecomposition,
    null_vector: DVector<f64>,
    filter: SpectralFilter,
}

impl CovarianceEmbedding {
    /// Wraps an SPD matrix (for example a barycenter) as an embedding.
    pub fn from_spd(matrix: SymMatrix, null_vector: DVector<f64>, filter: SpectralFilter) -> Result<Self> {
        if null_vector.len() != matrix.dim() {
            return Err(Error::DimensionMismatch { expected: matrix.dim(), found: null_vector.len() });
        }
        let eig = matrix.eig();
        if eig.min_eigenvalue() <= 0.0 {
            return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
        }
        Ok(Self { matrix, eig, null_vector, filter })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn filter(&self) -> SpectralFilter {
        self.filter
    }

    pub fn null_vector(&self) -> &DVector<f64> {
        &self.null_vector
    }

    /// `Σ^{1/2}`
    pub fn sqrt(&self) -> SymMatrix {
        let values: Vec<f64> = self.eig.eigenvalues.iter().map(|v| v.sqrt()).collect();
        self.eig.assemble(&values)
    }

    /// `g⁻¹(Σ^{1/2}) − v vᵀ`, using the embedding's own filter.
    pub fn to_operator(&self) -> Result<SymMatrix> {
        self.to_operator_with(self.filter)
    }

    pub fn to_operator_with(&self, filter: SpectralFilter) -> Result<SymMatrix> {
        let values = self
            .eig
            .eigenvalues
            .iter()
            .map(|&s| {
                let y = filter.inverse(s.sqrt());
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::InverseFilterDomain { eigenvalue: s })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eig.assemble(&values).sub(&SymMatrix::outer(&self.null_vector)))
    }
}

pub(crate) fn ones_unit(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0 / (n as f64).sqrt())
}

/// Shift-and-filter core shared by every embedding constructor.
fn embed_shifted(m: &SymMatrix, v: DVector<f64>, filter: SpectralFilter) -> Result<CovarianceEmbedding> {
    let shifted = m.add(&SymMatrix::outer(&v));
    let eig = shifted.eig();
    if eig.min_eigenvalue() <= 0.0 {
        return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
    }
    let values = eig
        .eigenvalues
        .iter()
        .map(|&x| {
            let g = filter.forward(x);
            if g.is_finite() {
                Ok(g * g)
            } else {
                Err(Error::Domain { eigenvalue: x })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = eig.assemble(&values);
    let eig = EigenDecomposition::from_parts(&values, &eig.eigenvectors);
    Ok(CovarianceEmbedding { matrix, eig, null_vector: v, filter })
}

/// `(L + J/N)^{-1} = L^† + J/N` for a Laplacian satisfying the
/// single-zero-eigenvalue PSD assumption.
pub fn embed(l: &LaplacianMatrix) -> Result<CovarianceEmbedding> {
    embed_filtered(l, SpectralFilter::PinvSqrt)
}

/// `g(L + J/N)²`
pub fn embed_filtered(l: &LaplacianMatrix, filter: SpectralFilter) -> Result<CovarianceEmbedding> {
    let check = l.check_assumption1(None);
    if !check.holds {
        return Err(Error::AssumptionViolated(check.diagnostics));
    }
    embed_shifted(l.matrix(), ones_unit(l.dim()), filter)
}

/// Embeds a PSD operator with a single null direction `v` (found from its
/// spectrum) as `g(M + v vᵀ)²`; for the default filter this is `M^† + v vᵀ`.
/// `v` is oriented so that its entries sum to a nonnegative value.
pub fn embed_general(m: &SymMatrix, filter: SpectralFilter) -> Result<CovarianceEmbedding> {
    let eig = m.eig();
    let tol = 1e-8 * eig.max_abs_eigenvalue();
    if eig.min_eigenvalue() < -tol {
        return Err(Error::NotPsd { min_eigenvalue: eig.min_eigenvalue() });
    }
    let nullity = eig.nullity(tol);
    if nullity != 1 {
        return Err(Error::Rank { nullity });
    }
    let mut v = eig.eigenvectors.column(0).into_owned();
    if v.sum() < 0.0 {
        v.neg_mut();
    }
    embed_shifted(m, v, filter)
}

/// `Σ⁻¹ − J/N`
pub fn unembed(sigma: &CovarianceEmbedding) -> Result<LaplacianMatrix> {
    unembed_filtered(sigma, SpectralFilter::PinvSqrt)
}

/// `g⁻¹(Σ^{1/2}) − J/N`
pub fn unembed_filtered(sigma: &CovarianceEmbedding, filter: SpectralFilter) -> Result<LaplacianMatrix> {
    Ok(LaplacianMatrix::from_matrix_unchecked(sigma.to_operator_with(filter)?))
}
