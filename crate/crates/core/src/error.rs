use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix function undefined on eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("matrix is not positive semi-definite (most negative eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not strictly positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotSpd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Laplacian violates the single-zero-eigenvalue PSD assumption: {0}")]
    AssumptionViolated(String),

    #[error("node {0} has zero degree")]
    ZeroDegree(usize),

    #[error("could not draw a connected graph after {0} attempts")]
    NotConnectedAfterRetries(usize),

    #[error("infeasible perturbation: {0}")]
    InfeasiblePerturbation(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("expected exactly one null eigenvalue, found {nullity}")]
    Rank { nullity: usize },

    #[error("inverse filter undefined on eigenvalue {eigenvalue:e}")]
    InverseFilterDomain { eigenvalue: f64 },

    #[error("fixed point did not converge in {iterations} iterations (last step {final_step:e})")]
    NotConverged { iterations: usize, final_step: f64 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input matrix is not symmetric")]
    NonSymmetricInput,

    #[error("unknown name '{0}'")]
    UnknownName(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
