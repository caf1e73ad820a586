//! Structural graph metrics on (possibly dense, signed) weighted adjacencies.

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::spectral::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphMetrics {
    pub degree_centrality: Vec<f64>,
    pub modularity: f64,
    pub participation: Vec<f64>,
}

/// Adjacency implied by a Laplacian-like matrix: `W_ij = −L_ij` off the diagonal.
pub fn adjacency_from_laplacian(l: &SymMatrix) -> SymMatrix {
    let mut w = -l.as_matrix().clone();
    w.fill_diagonal(0.0);
    SymMatrix::symmetrize(w)
}

fn check_partition(n: usize, partition: &[usize]) -> Result<usize> {
    if partition.len() != n {
        return Err(Error::LengthMismatch(partition.len(), n));
    }
    Ok(partition.iter().max().map_or(0, |c| c + 1))
}

fn degrees(w: &SymMatrix) -> Vec<f64> {
    w.row_iter().map(|r| r.sum()).collect()
}

/// Weighted degree divided by `N − 1`.
pub fn degree_centrality(w: &SymMatrix) -> Vec<f64> {
    let scale = (w.dim().max(2) - 1) as f64;
    degrees(w).into_iter().map(|k| k / scale).collect()
}

/// `Q = Σ_c [ W_in(c) / 2m − (K_c / 2m)² ]`, the per-community form of
/// `(1/2m) Σ_ij (W_ij − k_i k_j / 2m) [c_i = c_j]`.
pub fn modularity(w: &SymMatrix, partition: &[usize]) -> Result<f64> {
    let n_comm = check_partition(w.dim(), partition)?;
    let k = degrees(w);
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return Err(Error::InvalidParameter("modularity of a graph without edge weight".into()));
    }
    let mut inside = vec![0.0; n_comm];
    let mut total = vec![0.0; n_comm];
    for i in 0..w.dim() {
        let c = partition[i];
        total[c] += k[i];
        for j in 0..w.dim() {
            if partition[j] == c {
                inside[c] += w[(i, j)];
            }
        }
    }
    Ok(inside.iter().zip(&total).map(|(a, t)| a / two_m - (t / two_m).powi(2)).sum())
}

/// `p_i = 1 − Σ_c (k_{i,c} / k_i)²`.
pub fn participation(w: &SymMatrix, partition: &[usize]) -> Result<Vec<f64>> {
    let n_comm = check_partition(w.dim(), partition)?;
    let mut out = Vec::with_capacity(w.dim());
    for (i, row) in w.row_iter().enumerate() {
        let mut per = vec![0.0; n_comm];
        for (j, x) in row.iter().enumerate() {
            per[partition[j]] += x;
        }
        let k: f64 = per.iter().sum();
        if k == 0.0 {
            return Err(Error::ZeroDegree(i));
        }
        out.push(1.0 - per.iter().map(|p| (p / k).powi(2)).sum::<f64>());
    }
    Ok(out)
}

pub fn adjacency_metrics(w: &SymMatrix, partition: &[usize]) -> Result<GraphMetrics> {
    Ok(GraphMetrics {
        degree_centrality: degree_centrality(w),
        modularity: modularity(w, partition)?,
        participation: participation(w, partition)?,
    })
}

pub fn graph_metrics(g: &Graph, partition: &[usize]) -> Result<GraphMetrics> {
    adjacency_metrics(&g.adjacency(), partition)
}

pub(crate) fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_modularity(w: &SymMatrix, c: &[usize]) -> f64 {
        let n = w.dim();
        let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| w[(i, j)]).sum()).collect();
        let two_m: f64 = k.iter().sum();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if c[i] == c[j] {
                    q += w[(i, j)] - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    fn two_triangles() -> Graph {
        Graph::new(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)])
            .unwrap()
    }

    #[test]
    fn single_community_has_zero_modularity() {
        let g = two_triangles();
        assert!(modularity(&g.adjacency(), &[0; 6]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_triangles_match_brute_force() {
        let g = two_triangles();
        let part = [0, 0, 0, 1, 1, 1];
        let q = modularity(&g.adjacency(), &part).unwrap();
        assert!((q - brute_modularity(&g.adjacency(), &part)).abs() < 1e-12);
        // 7 edges: each triangle has 3 inside edges and degree sum 7
        assert!((q - 2.0 * (6.0 / 14.0 - 0.25)).abs() < 1e-12);
    }

    #[test]
    fn participation_examples() {
        let g = two_triangles();
        let p = participation(&g.adjacency(), &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[2] - (1.0 - (4.0 / 9.0 + 1.0 / 9.0))).abs() < 1e-15);
        let isolated = Graph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(participation(&isolated.adjacency(), &[0, 0, 0]), Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn degree_centrality_of_star() {
        let g = Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(degree_centrality(&g.adjacency()), vec![1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn adjacency_from_laplacian_inverts() {
        let g = two_triangles();
        assert_eq!(adjacency_from_laplacian(g.laplacian().matrix()), g.adjacency());
    }

    #[test]
    fn partition_length_checked() {
        assert!(matches!(modularity(&two_triangles().adjacency(), &[0, 1]), Err(Error::LengthMismatch(2, 6))));
    }
}
