//! Dense symmetric spectral kernel.
//!
//! Every matrix function in the crate (square roots, pseudo-inverses, powers,
//! logarithms) goes through a single eigendecomposition path: decompose,
//! map the eigenvalues, reassemble. Eigenvalues whose magnitude falls below a
//! rank tolerance are treated as exact zeros.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative symmetry tolerance used when validating raw input matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates symmetry: `|a_ij - a_ji| <= 1e-12 * max(1, |a_ij|)`.
    /// The stored matrix is the exact symmetric part of the input.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let n = matrix.nrows();
        let mut worst = 0.0f64;
        let mut violated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = (matrix[(i, j)] - matrix[(j, i)]).abs();
                worst = worst.max(diff);
                if diff > SYMMETRY_TOL * matrix[(i, j)].abs().max(1.0) || diff.is_nan() {
                    violated = true;
                }
            }
        }
        if violated {
            return Err(Error::NotSymmetric { max_asymmetry: worst });
        }
        Ok(Self::symmetrize(matrix))
    }

    /// Takes the symmetric part `(A + Aᵀ)/2` of a square matrix. Used for
    /// products that are symmetric in exact arithmetic.
    pub fn symmetrize(mut matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square(), "symmetrize needs a square matrix");
        let n = matrix.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
                matrix[(i, j)] = avg;
                matrix[(j, i)] = avg;
            }
        }
        Self(matrix)
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `v vᵀ`
    pub fn outer(v: &DVector<f64>) -> Self {
        Self(v * v.transpose())
    }

    /// The all-ones matrix scaled by `1/n`, i.e. the orthogonal projector onto span{1}.
    pub fn ones_projector(n: usize) -> Self {
        Self(DMatrix::from_element(n, n, 1.0 / n as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn frobenius_distance(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymMatrix) -> Self {
        Self(&self.0 - &other.0)
    }

    /// `B A B` for symmetric `B`, symmetrized.
    pub fn congruence(&self, by: &SymMatrix) -> Self {
        Self::symmetrize(&by.0 * &self.0 * &by.0)
    }

    /// `P A Pᵀ` for an arbitrary (e.g. permutation or basis) matrix `P`.
    pub fn transform(&self, p: &DMatrix<f64>) -> Self {
        Self::symmetrize(p * &self.0 * p.transpose())
    }

    pub fn eig(&self) -> EigenDecomposition {
        eig_sym_unchecked(self)
    }
}

impl Deref for SymMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

/// Eigenvalues in nondecreasing order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Builds a decomposition from eigenpairs in any order, sorting them.
    pub fn from_parts(values: &[f64], vectors: &DMatrix<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| values[k]));
        let mut eigenvectors = DMatrix::zeros(vectors.nrows(), n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &vectors.column(src));
        }
        Self { eigenvalues, eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// `N · ε · max|λ|`
    pub fn default_rank_tol(&self) -> f64 {
        self.dim() as f64 * f64::EPSILON * self.max_abs_eigenvalue()
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.assemble(self.eigenvalues.as_slice())
    }

    /// `V diag(values) Vᵀ`
    pub fn assemble(&self, values: &[f64]) -> SymMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (k, &v) in values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        SymMatrix::symmetrize(scaled * self.eigenvectors.transpose())
    }

    /// Applies `f` eigenvalue-wise with pseudo-function semantics; see [`spectral_apply`].
    pub fn map<F>(&self, f: F, rank_tol: Option<f64>) -> Result<SymMatrix>
    where
        F: Fn(f64) -> f64,
    {
        let values = self.mapped_values(f, rank_tol)?;
        Ok(self.assemble(&values))
    }

    pub fn mapped_values<F>(&self, f: F, rank_tol: Option<f64>) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> f64,
    {
        let tol = rank_tol.unwrap_or_else(|| self.default_rank_tol());
        let at_zero = f(0.0);
        self.eigenvalues
            .iter()
            .map(|&lambda| {
                if lambda.abs() < tol {
                    Ok(if at_zero.is_finite() { at_zero } else { 0.0 })
                } else {
                    let value = f(lambda);
                    if value.is_finite() {
                        Ok(value)
                    } else {
                        Err(Error::Domain { eigenvalue: lambda })
                    }
                }
            })
            .collect()
    }

    /// Number of eigenvalues with `|λ| < tol`.
    pub fn nullity(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|v| v.abs() < tol).count()
    }
}

/// Symmetric eigendecomposition with symmetry validation.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let sym = SymMatrix::new(a.clone())?;
    Ok(eig_sym_unchecked(&sym))
}

fn eig_sym_unchecked(a: &SymMatrix) -> EigenDecomposition {
    let n = a.dim();
    if n == 0 {
        return EigenDecomposition { eigenvalues: DVector::zeros(0), eigenvectors: DMatrix::zeros(0, 0) };
    }
    let raw = SymmetricEigen::new(a.as_matrix().clone());
    EigenDecomposition::from_parts(raw.eigenvalues.as_slice(), &raw.eigenvectors)
}

/// Returns `V diag(f(λ)) Vᵀ`.
///
/// Eigenvalues with `|λ| < rank_tol` are treated as exactly zero: they map to
/// `f(0)` when that is finite and are dropped from the range otherwise
/// (pseudo-function semantics, so `x ↦ 1/x` yields the Moore-Penrose inverse).
/// A non-finite `f(λ)` on a retained eigenvalue is a [`Error::Domain`].
/// `rank_tol = None` selects `N · ε · max|λ|`.
pub fn spectral_apply<F>(a: &SymMatrix, f: F, rank_tol: Option<f64>) -> Result<SymMatrix>
where
    F: Fn(f64) -> f64,
{
    a.eig().map(f, rank_tol)
}

fn check_psd(eig: &EigenDecomposition, rank_tol: Option<f64>) -> Result<f64> {
    let tol = rank_tol.unwrap_or_else(|| eig.default_rank_tol());
    if eig.dim() > 0 && eig.min_eigenvalue() < -tol {
        return Err(Error::NotPsd { min_eigenvalue: eig.min_eigenvalue() });
    }
    Ok(tol)
}

fn clamped_sqrt(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    psd_sqrt_eig(&a.eig(), None)
}

pub fn psd_sqrt_eig(eig: &EigenDecomposition, rank_tol: Option<f64>) -> Result<SymMatrix> {
    let tol = check_psd(eig, rank_tol)?;
    eig.map(clamped_sqrt, Some(tol))
}

/// Moore-Penrose pseudo-inverse of a PSD matrix.
pub fn psd_pinv(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = a.eig();
    let tol = check_psd(&eig, None)?;
    eig.map(|x| 1.0 / x, Some(tol))
}

/// Relative threshold below which an eigenvalue of a Laplacian-like operator
/// is considered part of its null space.
pub const NULL_SPACE_RTOL: f64 = 1e-8;

/// `NULL_SPACE_RTOL · max|λ|`, never below the machine-precision rank tolerance.
pub fn null_space_tol(eig: &EigenDecomposition) -> f64 {
    (NULL_SPACE_RTOL * eig.max_abs_eigenvalue()).max(eig.default_rank_tol())
}

/// Pseudo-inverse of a PSD matrix whose null eigenvalues carry accumulated
/// round-off (e.g. a computed mean Laplacian); see [`null_space_tol`].
pub fn psd_pinv_rel(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = a.eig();
    let tol = check_psd(&eig, Some(null_space_tol(&eig)))?;
    eig.map(|x| 1.0 / x, Some(tol))
}

/// Pseudo-inverse of any symmetric matrix (no definiteness requirement).
pub fn sym_pinv(a: &SymMatrix) -> SymMatrix {
    a.eig()
        .map(|x| 1.0 / x, None)
        .expect("reciprocal is finite on every retained eigenvalue")
}

/// Pseudo-inverse square root `A^{†/2}` of a PSD matrix.
pub fn psd_pinv_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = a.eig();
    let tol = check_psd(&eig, None)?;
    eig.map(|x| 1.0 / x.sqrt(), Some(tol))
}

/// Inverse of a strictly positive definite matrix.
pub fn spd_inv(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = a.eig();
    let tol = eig.default_rank_tol();
    if eig.dim() > 0 && eig.min_eigenvalue() <= tol {
        return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
    }
    eig.map(|x| 1.0 / x, Some(0.0))
}

/// Pseudo-power `A^p` of a PSD matrix (zero eigenvalues stay zero for `p < 0`).
pub fn psd_pow(a: &SymMatrix, p: f64) -> Result<SymMatrix> {
    let eig = a.eig();
    let tol = check_psd(&eig, None)?;
    eig.map(|x| x.max(0.0).powf(p), Some(tol))
}

/// Matrix logarithm of an SPD matrix.
pub fn spd_log(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = a.eig();
    if eig.dim() > 0 && eig.min_eigenvalue() <= 0.0 {
        return Err(Error::NotSpd { min_eigenvalue: eig.min_eigenvalue() });
    }
    eig.map(f64::ln, Some(0.0))
}

/// Matrix exponential of a symmetric matrix.
pub fn sym_exp(a: &SymMatrix) -> SymMatrix {
    a.eig().map(f64::exp, Some(0.0)).expect("exp is finite for finite input")
}
