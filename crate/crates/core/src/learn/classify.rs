use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use crate::barycenter::Weights;
use crate::baselines::{mean_of, MeanConfig, MeanKind};
use crate::error::{Error, Result};
use crate::graphs::{balanced_partition, generate_sbm, rng_from_seed, Graph};
use crate::metric::DistanceKind;
use crate::spectral::SymMatrix;

#[derive(Debug, Clone)]
pub struct Classification {
    pub labels: Vec<usize>,
    /// Class label of each centroid, ascending.
    pub classes: Vec<usize>,
    pub centroids: Vec<SymMatrix>,
}

impl Classification {
    /// Fraction of `truth` that disagrees with the predicted labels.
    pub fn misclassification_rate(&self, truth: &[usize]) -> Result<f64> {
        if truth.len() != self.labels.len() {
            return Err(Error::LengthMismatch(truth.len(), self.labels.len()));
        }
        let wrong = self.labels.iter().zip(truth).filter(|(a, b)| a != b).count();
        Ok(wrong as f64 / truth.len().max(1) as f64)
    }
}

/// Assigns each test Laplacian the class of the nearest per-class centroid.
/// Ties go to the smallest class label.
pub fn nearest_centroid_classify(
    train: &[SymMatrix],
    train_labels: &[usize],
    test: &[SymMatrix],
    mean_kind: MeanKind,
    distance_kind: DistanceKind,
    cfg: &MeanConfig,
) -> Result<Classification> {
    if train.len() != train_labels.len() {
        return Err(Error::LengthMismatch(train.len(), train_labels.len()));
    }
    let classes: Vec<usize> = train_labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.is_empty() {
        return Err(Error::InvalidParameter("no training graphs".into()));
    }
    let centroids = classes
        .par_iter()
        .map(|&c| {
            let members: Vec<SymMatrix> = train
                .iter()
                .zip(train_labels)
                .filter(|(_, &l)| l == c)
                .map(|(m, _)| m.clone())
                .collect();
            mean_of(&members, &Weights::uniform(members.len())?, mean_kind, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let features = centroids.iter().map(|c| distance_kind.feature(c)).collect::<Result<Vec<_>>>()?;
    let labels = test
        .par_iter()
        .map(|t| {
            let f = distance_kind.feature(t)?;
            let mut best = (0, f64::INFINITY);
            for (k, c) in features.iter().enumerate() {
                let d = f.distance(c)?;
                if d < best.1 {
                    best = (k, d);
                }
            }
            Ok(classes[best.0])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification { labels, classes, centroids })
}

/// Two SBM families on the same balanced partition that differ only in
/// `p_in`: class 0 uses `p_in[0]`, class 1 `p_in[1]`. Labels alternate.
pub fn two_class_sbm_dataset(
    n_nodes: usize,
    n_communities: usize,
    p_in: [f64; 2],
    p_out: f64,
    per_class: usize,
    seed: u64,
) -> Result<(Vec<Graph>, Vec<usize>)> {
    let partition = balanced_partition(n_nodes, n_communities)?;
    let mut rng = rng_from_seed(seed);
    let mut graphs = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        for (c, &p) in p_in.iter().enumerate() {
            graphs.push(generate_sbm(&partition, p, p_out, rng.random())?);
            labels.push(c);
        }
    }
    Ok((graphs, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap(g: Graph) -> SymMatrix {
        g.laplacian().into_matrix()
    }

    #[test]
    fn training_singletons_classify_themselves() {
        let a = lap(Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap());
        let b = lap(Graph::new(4, [(0, 1, 3.0), (0, 2, 3.0), (0, 3, 3.0)]).unwrap());
        let train = [a.clone(), b.clone()];
        for kind in [MeanKind::default(), MeanKind::Arithmetic, MeanKind::Harmonic] {
            let r = nearest_centroid_classify(
                &train,
                &[4, 7],
                &[b.clone(), a.clone()],
                kind,
                crate::learn::paired_distance(kind),
                &MeanConfig::default(),
            )
            .unwrap();
            assert_eq!(r.labels, vec![7, 4], "{kind}");
            assert_eq!(r.misclassification_rate(&[7, 4]).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_class_dataset_is_deterministic_and_balanced() {
        let (a, la) = two_class_sbm_dataset(12, 2, [0.9, 0.5], 0.1, 3, 4).unwrap();
        let (b, lb) = two_class_sbm_dataset(12, 2, [0.9, 0.5], 0.1, 3, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(la, lb);
        assert_eq!(la.iter().filter(|&&l| l == 1).count(), 3);
        assert!(a.iter().all(Graph::is_connected));
    }

    #[test]
    fn identical_classes_tie_to_smallest_label() {
        let a = lap(Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap());
        let r = nearest_centroid_classify(
            &[a.clone(), a.clone()],
            &[1, 0],
            &[a],
            MeanKind::Arithmetic,
            DistanceKind::LaplacianFrobenius,
            &MeanConfig::default(),
        )
        .unwrap();
        assert_eq!(r.labels, vec![0]);
    }
}
