//! Graph fusion: average a family of perturbed copies of a base graph and
//! measure how far each mean lands from the base.

use rand::Rng;

use crate::barycenter::Weights;
use crate::baselines::{mean_of, MeanConfig, MeanKind};
use crate::error::Result;
use crate::graphs::{perturb_edges_with, rng_from_seed, Graph};
use crate::learn::metrics::{adjacency_from_laplacian, adjacency_metrics, mse, GraphMetrics};
use crate::metric::{laplacian_distance, DistanceKind};
use crate::spectral::{psd_pinv_rel, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FusionErrors {
    pub bw_distance: f64,
    pub laplacian_frobenius: f64,
    /// Frobenius error of the pseudo-inverse Laplacians (covariances of the
    /// smooth-signal Gaussians).
    pub covariance_frobenius: f64,
    pub degree_centrality_mse: f64,
    pub modularity_absdiff: f64,
    pub participation_mse: f64,
}

impl FusionErrors {
    pub const NAMES: [&'static str; 6] = [
        "bw_distance",
        "laplacian_frobenius",
        "covariance_frobenius",
        "degree_centrality_mse",
        "modularity_absdiff",
        "participation_mse",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.bw_distance,
            self.laplacian_frobenius,
            self.covariance_frobenius,
            self.degree_centrality_mse,
            self.modularity_absdiff,
            self.participation_mse,
        ]
    }

    /// Entrywise average of several error rows.
    pub fn average(rows: &[FusionErrors]) -> FusionErrors {
        let n = rows.len().max(1) as f64;
        let mut acc = [0.0; 6];
        for r in rows {
            for (a, v) in acc.iter_mut().zip(r.values()) {
                *a += v / n;
            }
        }
        FusionErrors {
            bw_distance: acc[0],
            laplacian_frobenius: acc[1],
            covariance_frobenius: acc[2],
            degree_centrality_mse: acc[3],
            modularity_absdiff: acc[4],
            participation_mse: acc[5],
        }
    }
}

#[derive(Debug, Clone)]
pub struct FusionReport {
    pub rows: Vec<(MeanKind, FusionErrors)>,
}

impl FusionReport {
    pub fn get(&self, kind: MeanKind) -> Option<&FusionErrors> {
        self.rows.iter().find(|(k, _)| *k == kind).map(|(_, e)| e)
    }
}

/// Errors of a candidate mean Laplacian against the base graph.
pub fn fusion_errors(mean: &SymMatrix, base: &Graph, partition: &[usize]) -> Result<FusionErrors> {
    let base_l = base.laplacian().into_matrix();
    let base_metrics = adjacency_metrics(&base.adjacency(), partition)?;
    fusion_errors_against(mean, &base_l, &base_metrics, partition)
}

fn fusion_errors_against(
    mean: &SymMatrix,
    base_l: &SymMatrix,
    base: &GraphMetrics,
    partition: &[usize],
) -> Result<FusionErrors> {
    let m = adjacency_metrics(&adjacency_from_laplacian(mean), partition)?;
    Ok(FusionErrors {
        bw_distance: laplacian_distance(mean, base_l, DistanceKind::default())?,
        laplacian_frobenius: mean.frobenius_distance(base_l),
        covariance_frobenius: psd_pinv_rel(mean)?.frobenius_distance(&psd_pinv_rel(base_l)?),
        degree_centrality_mse: mse(&m.degree_centrality, &base.degree_centrality),
        modularity_absdiff: (m.modularity - base.modularity).abs(),
        participation_mse: mse(&m.participation, &base.participation),
    })
}

/// `n_graphs` perturbed copies of `base` (each removes and adds `n_perturb`
/// edges while staying connected), drawn from one seeded stream.
pub fn perturbed_family(base: &Graph, n_graphs: usize, n_perturb: usize, seed: u64) -> Result<Vec<Graph>> {
    let mut rng = rng_from_seed(seed);
    (0..n_graphs)
        .map(|_| perturb_edges_with(base, n_perturb, n_perturb, &mut rng))
        .collect()
}

/// One fusion trial: perturb, average with every requested mean, score.
pub fn fusion_experiment(
    base: &Graph,
    partition: &[usize],
    n_graphs: usize,
    n_perturb: usize,
    kinds: &[MeanKind],
    seed: u64,
    cfg: &MeanConfig,
) -> Result<FusionReport> {
    let family = perturbed_family(base, n_graphs, n_perturb, seed)?;
    let ls: Vec<SymMatrix> = family.iter().map(|g| g.laplacian().into_matrix()).collect();
    let weights = Weights::uniform(ls.len())?;
    let base_l = base.laplacian().into_matrix();
    let base_metrics = adjacency_metrics(&base.adjacency(), partition)?;
    let rows = kinds
        .iter()
        .map(|&kind| {
            let mean = mean_of(&ls, &weights, kind, cfg)?;
            Ok((kind, fusion_errors_against(&mean, &base_l, &base_metrics, partition)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FusionReport { rows })
}

/// Per-trial seeds derived from a master seed.
pub fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut rng = rng_from_seed(seed);
    (0..trials).map(|_| rng.random()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{balanced_partition, generate_sbm};

    fn base() -> (Graph, Vec<usize>) {
        let part = balanced_partition(20, 2).unwrap();
        (generate_sbm(&part, 0.5, 0.1, 3).unwrap(), part)
    }

    const KINDS: [MeanKind; 4] =
        [MeanKind::BuresWasserstein(crate::SpectralFilter::PinvSqrt), MeanKind::Arithmetic, MeanKind::Harmonic, MeanKind::Karcher];

    #[test]
    fn no_perturbation_means_no_error() {
        let (g, part) = base();
        let report = fusion_experiment(&g, &part, 5, 0, &KINDS, 1, &MeanConfig::default()).unwrap();
        for (kind, e) in &report.rows {
            let tol = if matches!(kind, MeanKind::Arithmetic | MeanKind::Harmonic) { 1e-9 } else { 1e-6 };
            for v in e.values() {
                assert!((0.0..tol).contains(&v), "{kind}: {e:?}");
            }
        }
    }

    #[test]
    fn arithmetic_row_matches_direct_average() {
        let (g, part) = base();
        let family = perturbed_family(&g, 4, 3, 8).unwrap();
        let mut avg = SymMatrix::zeros(20);
        for f in &family {
            avg = avg.add(&f.laplacian().into_matrix().scaled(0.25));
        }
        let direct = fusion_errors(&avg, &g, &part).unwrap();
        let report = fusion_experiment(&g, &part, 4, 3, &[MeanKind::Arithmetic], 8, &MeanConfig::default()).unwrap();
        let e = report.get(MeanKind::Arithmetic).unwrap();
        for (a, b) in e.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(e.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn trial_seeds_are_reproducible() {
        assert_eq!(trial_seeds(5, 4), trial_seeds(5, 4));
        assert_ne!(trial_seeds(5, 4), trial_seeds(6, 4));
    }
}
