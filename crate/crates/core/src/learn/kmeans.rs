//! Lloyd k-means over graphs with a pluggable mean and distance.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use crate::barycenter::Weights;
use crate::baselines::{mean_of, MeanConfig, MeanKind};
use crate::error::{Error, Result};
use crate::graphs::{generate_line_communities, rng_from_seed, Graph, GraphRng};
use crate::learn::paired_distance;
use crate::metric::{pairwise_feature_distances, DistanceFeature, DistanceKind};
use crate::spectral::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub mean_kind: MeanKind,
    pub distance_kind: DistanceKind,
    pub max_iter: usize,
    pub n_init: usize,
    pub seed: u64,
    pub mean: MeanConfig,
}

impl KMeansConfig {
    /// Mean with its natural distance: BW/BW, arithmetic/Frobenius of `L`,
    /// harmonic/Frobenius of `L^†`.
    pub fn paired(k: usize, mean_kind: MeanKind, seed: u64) -> Self {
        Self {
            k,
            mean_kind,
            distance_kind: paired_distance(mean_kind),
            max_iter: 50,
            n_init: 5,
            seed,
            mean: MeanConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centroids: Vec<SymMatrix>,
    pub inertia: f64,
    /// Inertia of the k-means++ seeding of the winning restart.
    pub initial_inertia: f64,
    /// Inertia after every Lloyd update of the winning restart.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

/// Index and distance of the nearest candidate; ties go to the smallest index.
fn nearest(distances: impl Iterator<Item = f64>) -> (usize, f64) {
    distances
        .enumerate()
        .fold((0, f64::INFINITY), |best, (c, d)| if d < best.1 { (c, d) } else { best })
}

fn seed_plus_plus(table: &nalgebra::DMatrix<f64>, k: usize, rng: &mut GraphRng) -> Vec<usize> {
    let n = table.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    while chosen.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| chosen.iter().map(|&c| table[(i, c)]).fold(f64::INFINITY, f64::min).powi(2))
            .collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            Err(_) => {
                let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                free[rng.random_range(0..free.len())]
            }
        };
        chosen.push(next);
    }
    chosen
}

struct Run {
    assignment: Vec<usize>,
    centroids: Vec<SymMatrix>,
    inertia: f64,
    initial_inertia: f64,
    trace: Vec<f64>,
}

fn lloyd(
    laplacians: &[SymMatrix],
    features: &[DistanceFeature],
    table: &nalgebra::DMatrix<f64>,
    cfg: &KMeansConfig,
    rng: &mut GraphRng,
) -> Result<Run> {
    let seeds = seed_plus_plus(table, cfg.k, rng);
    let mut assignment: Vec<usize> = (0..laplacians.len())
        .map(|i| nearest(seeds.iter().map(|&s| table[(i, s)])).0)
        .collect();
    let initial_inertia: f64 = (0..laplacians.len())
        .map(|i| seeds.iter().map(|&s| table[(i, s)]).fold(f64::INFINITY, f64::min).powi(2))
        .sum();
    let mut trace = Vec::new();
    let mut last_distance: Vec<f64> = (0..laplacians.len())
        .map(|i| table[(i, seeds[assignment[i]])])
        .collect();
    let mut centroids;
    loop {
        // an emptied cluster takes the graph farthest from its current centroid
        for c in 0..cfg.k {
            if !assignment.contains(&c) {
                let far = (0..laplacians.len())
                    .filter(|&i| assignment.iter().filter(|&&a| a == assignment[i]).count() > 1)
                    .max_by(|&a, &b| last_distance[a].total_cmp(&last_distance[b]).then(b.cmp(&a)))
                    .ok_or_else(|| Error::InvalidParameter("not enough graphs to fill every cluster".into()))?;
                assignment[far] = c;
                last_distance[far] = 0.0;
            }
        }
        centroids = (0..cfg.k)
            .into_par_iter()
            .map(|c| {
                let members: Vec<SymMatrix> = laplacians
                    .iter()
                    .zip(&assignment)
                    .filter(|(_, &a)| a == c)
                    .map(|(l, _)| l.clone())
                    .collect();
                mean_of(&members, &Weights::uniform(members.len())?, cfg.mean_kind, &cfg.mean)
            })
            .collect::<Result<Vec<_>>>()?;
        let centroid_features = centroids
            .par_iter()
            .map(|c| cfg.distance_kind.feature(c))
            .collect::<Result<Vec<_>>>()?;
        let distances = features
            .par_iter()
            .map(|f| nearest_feature(f, &centroid_features))
            .collect::<Result<Vec<_>>>()?;
        let next: Vec<usize> = distances.iter().map(|d| d.0).collect();
        last_distance = distances.iter().map(|d| d.1).collect();
        trace.push(last_distance.iter().map(|d| d * d).sum());
        if next == assignment || trace.len() >= cfg.max_iter {
            assignment = next;
            break;
        }
        assignment = next;
    }
    let inertia = *trace.last().expect("at least one Lloyd update");
    Ok(Run { assignment, centroids, inertia, initial_inertia, trace })
}

fn nearest_feature(f: &DistanceFeature, centroids: &[DistanceFeature]) -> Result<(usize, f64)> {
    let d = centroids.iter().map(|c| f.distance(c)).collect::<Result<Vec<_>>>()?;
    Ok(nearest(d.into_iter()))
}

/// Best of `n_init` k-means++-seeded Lloyd runs by final inertia.
pub fn kmeans_laplacians(laplacians: &[SymMatrix], cfg: &KMeansConfig) -> Result<KMeansResult> {
    if cfg.k == 0 || cfg.n_init == 0 || cfg.max_iter == 0 {
        return Err(Error::InvalidParameter("k, n_init and max_iter must be at least 1".into()));
    }
    if laplacians.len() < cfg.k {
        return Err(Error::InvalidParameter(format!("{} graphs cannot form {} clusters", laplacians.len(), cfg.k)));
    }
    let features = laplacians
        .par_iter()
        .map(|l| cfg.distance_kind.feature(l))
        .collect::<Result<Vec<_>>>()?;
    let table = pairwise_feature_distances(&features)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<Run> = None;
    for _ in 0..cfg.n_init {
        let run = lloyd(laplacians, &features, &table, cfg, &mut rng)?;
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let best = best.expect("n_init ≥ 1");
    Ok(KMeansResult {
        iterations: best.trace.len(),
        assignment: best.assignment,
        centroids: best.centroids,
        inertia: best.inertia,
        initial_inertia: best.initial_inertia,
        inertia_trace: best.trace,
    })
}

pub fn kmeans_graphs(graphs: &[Graph], cfg: &KMeansConfig) -> Result<KMeansResult> {
    let ls: Vec<SymMatrix> = graphs.iter().map(|g| g.laplacian().into_matrix()).collect();
    kmeans_laplacians(&ls, cfg)
}

/// Graphs whose class is their number of communities: class `c` holds
/// `per_class` line-of-communities graphs with `c + 1` communities.
pub fn community_count_dataset(
    n_nodes: usize,
    n_classes: usize,
    p_in: f64,
    per_class: usize,
    seed: u64,
) -> Result<(Vec<Graph>, Vec<usize>)> {
    let mut rng = rng_from_seed(seed);
    let mut graphs = Vec::with_capacity(n_classes * per_class);
    let mut labels = Vec::with_capacity(n_classes * per_class);
    for c in 0..n_classes {
        for _ in 0..per_class {
            graphs.push(generate_line_communities(n_nodes, c + 1, p_in, rng.random())?);
            labels.push(c);
        }
    }
    Ok((graphs, labels))
}
