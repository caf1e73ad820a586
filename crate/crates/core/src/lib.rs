//! Graph means and distances through the Bures-Wasserstein geometry of
//! smooth graph signals.

pub mod barycenter;
pub mod baselines;
pub mod embedding;
pub mod error;
pub mod graphs;
pub mod io;
pub mod learn;
pub mod metric;
pub mod spectral;

pub use barycenter::{
    bw_mean, bw_mean_general, bw_mean_projected_oracle, interpolate, interpolate_laplacian, transport_map,
    BarycenterProblem, FixedPointConfig, FixedPointReport, Init, Weights,
};
pub use baselines::{mean_of, MeanConfig, MeanKind, NullSpace};
pub use embedding::{embed, embed_filtered, embed_general, unembed, unembed_filtered, CovarianceEmbedding, SpectralFilter};
pub use error::{Error, Result};
pub use graphs::{Graph, LaplacianMatrix, MultiLayerGraph};
pub use metric::{graph_distance, laplacian_distance, pairwise_distances, DistanceKind};
pub use spectral::SymMatrix;
