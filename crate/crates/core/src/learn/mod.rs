//! Downstream tasks built on graph means: fusion quality, k-means of graphs,
//! nearest-centroid classification and semi-supervised node labeling.

mod classify;
mod fusion;
mod kmeans;
pub mod metrics;
mod nmi;
mod ssl;

pub use classify::{nearest_centroid_classify, two_class_sbm_dataset, Classification};
pub use fusion::{fusion_errors, fusion_experiment, perturbed_family, trial_seeds, FusionErrors, FusionReport};
pub use kmeans::{community_count_dataset, kmeans_graphs, kmeans_laplacians, KMeansConfig, KMeansResult};
pub use metrics::{graph_metrics, GraphMetrics};
pub use nmi::nmi;
pub use ssl::{argmax_rows, ssl_classify, ssl_solve, stratified_observed, SslProblem, SslResult};

use crate::baselines::MeanKind;
use crate::metric::DistanceKind;

/// Distance whose Fréchet mean is the given mean (the natural pairing).
pub fn paired_distance(kind: MeanKind) -> DistanceKind {
    match kind {
        MeanKind::BuresWasserstein(filter) => DistanceKind::BuresWasserstein(filter),
        MeanKind::Harmonic => DistanceKind::PinvLaplacianFrobenius,
        MeanKind::Arithmetic | MeanKind::Power(_) | MeanKind::Karcher => DistanceKind::LaplacianFrobenius,
    }
}

/// Regularization strengths for semi-supervised labeling: 1 for BW, 10 for
/// arithmetic, 0.1 for harmonic and negative power means.
pub fn default_rho(kind: MeanKind) -> f64 {
    match kind {
        MeanKind::BuresWasserstein(_) | MeanKind::Karcher => 1.0,
        MeanKind::Arithmetic => 10.0,
        MeanKind::Harmonic => 0.1,
        MeanKind::Power(p) if p < 0.0 => 0.1,
        MeanKind::Power(p) if p == 1.0 => 10.0,
        MeanKind::Power(_) => 1.0,
    }
}
