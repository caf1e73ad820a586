//! Seeded random graph generators.
//!
//! All generators draw from [`GraphRng`] (ChaCha8) seeded with a `u64`, so a
//! given seed reproduces the same graph on every platform.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Graph, MultiLayerGraph};
use crate::error::{Error, Result};

pub type GraphRng = ChaCha8Rng;

/// Maximum number of samples drawn when rejecting disconnected graphs.
pub const CONNECTIVITY_RETRIES: usize = 1000;

pub fn rng_from_seed(seed: u64) -> GraphRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
    }
}

/// Splits `n` nodes into `k` contiguous blocks whose sizes differ by at most
/// one; the first `n mod k` blocks get the extra node.
pub fn balanced_partition(n: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cannot split {n} nodes into {k} blocks")));
    }
    let base = n / k;
    let extra = n % k;
    let mut out = Vec::with_capacity(n);
    for block in 0..k {
        let size = base + usize::from(block < extra);
        out.extend(std::iter::repeat_n(block, size));
    }
    Ok(out)
}

fn block_ranges(partition: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut ranges: Vec<std::ops::Range<usize>> = Vec::new();
    for (i, &c) in partition.iter().enumerate() {
        match ranges.get_mut(c) {
            Some(r) => r.end = i + 1,
            None => ranges.push(i..i + 1),
        }
    }
    ranges
}

fn sample_sbm_once(partition: &[usize], p_in: f64, p_out: f64, rng: &mut GraphRng) -> Graph {
    let n = partition.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if partition[i] == partition[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push(Edge { i, j, weight: 1.0 });
            }
        }
    }
    Graph::from_sorted_edges(n, edges)
}

/// Stochastic block model with unit weights. `communities[i]` is the block
/// of node `i`. Disconnected draws are rejected, up to [`CONNECTIVITY_RETRIES`].
pub fn generate_sbm(communities: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    generate_sbm_with(communities, p_in, p_out, &mut rng)
}

pub fn generate_sbm_with(
    communities: &[usize],
    p_in: f64,
    p_out: f64,
    rng: &mut GraphRng,
) -> Result<Graph> {
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    if communities.is_empty() {
        return Err(Error::InvalidParameter("SBM needs at least one node".into()));
    }
    for _ in 0..CONNECTIVITY_RETRIES {
        let g = sample_sbm_once(communities, p_in, p_out, rng);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::NotConnectedAfterRetries(CONNECTIVITY_RETRIES))
}

/// Removes `n_remove` uniformly chosen edges (rejecting any removal that would
/// disconnect the graph) and adds `n_add` uniformly chosen unit-weight edges
/// among the node pairs that are not edges of `g`.
pub fn perturb_edges(g: &Graph, n_remove: usize, n_add: usize, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    perturb_edges_with(g, n_remove, n_add, &mut rng)
}

pub fn perturb_edges_with(g: &Graph, n_remove: usize, n_add: usize, rng: &mut GraphRng) -> Result<Graph> {
    if n_remove == 0 && n_add == 0 {
        return Ok(g.clone());
    }
    if !g.is_connected() {
        return Err(Error::InfeasiblePerturbation("input graph is disconnected".into()));
    }
    let n = g.num_nodes();

    let mut non_edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.weight(i, j).is_none() {
                non_edges.push((i, j));
            }
        }
    }
    if non_edges.len() < n_add {
        return Err(Error::InfeasiblePerturbation(format!(
            "{} non-edges available, {} requested",
            non_edges.len(),
            n_add
        )));
    }

    let mut current = g.clone();
    for _ in 0..n_remove {
        let mut order: Vec<usize> = (0..current.num_edges()).collect();
        order.shuffle(rng);
        let mut removed = None;
        for k in order {
            let mut edges = current.edges().to_vec();
            edges.remove(k);
            let candidate = Graph::from_sorted_edges(n, edges);
            if candidate.is_connected() {
                removed = Some(candidate);
                break;
            }
        }
        current = removed.ok_or_else(|| {
            Error::InfeasiblePerturbation("every remaining edge is a bridge".into())
        })?;
    }

    let picks = index::sample(rng, non_edges.len(), n_add);
    let mut edges = current.edges().to_vec();
    edges.extend(picks.into_iter().map(|k| Edge { i: non_edges[k].0, j: non_edges[k].1, weight: 1.0 }));
    edges.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
    Graph::from_sorted_edges(n, edges).with_labels(g.node_labels().to_vec())
}

/// Communities on a line: balanced contiguous blocks, each a connected
/// Erdős–Rényi graph with edge probability `p_in`, and one edge between each
/// pair of consecutive blocks. With probability ½ each, that edge joins
/// (last node of block k, first node of block k+1) or
/// (first node of block k, last node of block k+1).
pub fn generate_line_communities(n_nodes: usize, n_communities: usize, p_in: f64, seed: u64) -> Result<Graph> {
    check_probability("p_in", p_in)?;
    let partition = balanced_partition(n_nodes, n_communities)?;
    let ranges = block_ranges(&partition);
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();

    for r in &ranges {
        let size = r.len();
        let block = (0..CONNECTIVITY_RETRIES)
            .map(|_| sample_sbm_once(&vec![0; size], p_in, 0.0, &mut rng))
            .find(Graph::is_connected)
            .ok_or(Error::NotConnectedAfterRetries(CONNECTIVITY_RETRIES))?;
        edges.extend(block.edges().iter().map(|e| Edge { i: e.i + r.start, j: e.j + r.start, weight: 1.0 }));
    }
    for pair in ranges.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (i, j) = if rng.random_bool(0.5) { (a.end - 1, b.start) } else { (a.start, b.end - 1) };
        edges.push(Edge { i, j, weight: 1.0 });
    }
    edges.sort_by(|x, y| (x.i, x.j).cmp(&(y.i, y.j)));
    Ok(Graph::from_sorted_edges(n_nodes, edges))
}

/// Independent SBM layers over a shared ground-truth labeling. Layer `k`
/// uses `(p_in, p_out) = layer_params[k]`.
pub fn generate_multilayer_sbm(labels: &[usize], layer_params: &[(f64, f64)], seed: u64) -> Result<MultiLayerGraph> {
    let mut rng = rng_from_seed(seed);
    let layers = layer_params
        .iter()
        .map(|&(p_in, p_out)| generate_sbm_with(labels, p_in, p_out, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    MultiLayerGraph::new(layers, Some(labels.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                e.push((i, j, 1.0));
            }
        }
        Graph::new(n, e).unwrap()
    }

    #[test]
    fn partition_is_balanced() {
        assert_eq!(balanced_partition(7, 3).unwrap(), vec![0, 0, 0, 1, 1, 2, 2]);
        assert!(balanced_partition(3, 4).is_err());
        assert!(balanced_partition(3, 0).is_err());
    }

    #[test]
    fn sbm_extremes_are_complete() {
        let parts = balanced_partition(6, 2).unwrap();
        assert_eq!(generate_sbm(&parts, 1.0, 1.0, 3).unwrap(), complete(6));
        assert_eq!(generate_sbm(&[0; 5], 1.0, 0.0, 3).unwrap(), complete(5));
        assert!(matches!(generate_sbm(&parts, 1.0, 0.0, 3), Err(Error::NotConnectedAfterRetries(_))));
        assert!(generate_sbm(&parts, 1.5, 0.0, 3).is_err());
    }

    #[test]
    fn sbm_intra_edge_count_is_plausible() {
        let parts = balanced_partition(50, 5).unwrap();
        let mut total = 0usize;
        let trials = 40;
        for seed in 0..trials {
            let g = generate_sbm(&parts, 0.3, 0.1, seed).unwrap();
            assert!(g.is_connected());
            total += g.edges().iter().filter(|e| parts[e.i] == parts[e.j]).count();
        }
        let mean = total as f64 / trials as f64;
        // expectation 67.5, per-graph std ≈ 6.9, so the 40-draw mean has std ≈ 1.1
        assert!((mean - 67.5).abs() < 5.0, "mean intra edges {mean}");
    }

    #[test]
    fn sbm_is_deterministic() {
        let parts = balanced_partition(30, 3).unwrap();
        assert_eq!(generate_sbm(&parts, 0.3, 0.05, 9).unwrap(), generate_sbm(&parts, 0.3, 0.05, 9).unwrap());
    }

    #[test]
    fn perturbation_identity_and_infeasible() {
        let g = complete(4);
        assert_eq!(perturb_edges(&g, 0, 0, 1).unwrap(), g);
        assert!(matches!(perturb_edges(&g, 0, 1, 1), Err(Error::InfeasiblePerturbation(_))));
        let tree = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(matches!(perturb_edges(&tree, 1, 0, 1), Err(Error::InfeasiblePerturbation(_))));
    }

    #[test]
    fn perturbation_keeps_edge_count_and_connectivity() {
        let parts = balanced_partition(50, 5).unwrap();
        let base = generate_sbm(&parts, 0.3, 0.1, 11).unwrap();
        for seed in 0..10 {
            let p = perturb_edges(&base, 10, 10, seed).unwrap();
            assert_eq!(p.num_nodes(), 50);
            assert_eq!(p.num_edges(), base.num_edges());
            assert!(p.is_connected());
            let removed = base.edges().iter().filter(|e| p.weight(e.i, e.j).is_none()).count();
            assert_eq!(removed, 10);
        }
    }

    #[test]
    fn line_communities_structure() {
        assert_eq!(generate_line_communities(6, 1, 1.0, 0).unwrap(), complete(6));
        let parts = balanced_partition(50, 5).unwrap();
        for seed in 0..20 {
            let g = generate_line_communities(50, 5, 0.2, seed).unwrap();
            assert!(g.is_connected());
            let inter: Vec<_> = g.edges().iter().filter(|e| parts[e.i] != parts[e.j]).collect();
            assert_eq!(inter.len(), 4);
            for e in inter {
                let (bi, bj) = (parts[e.i], parts[e.j]);
                assert_eq!(bj, bi + 1);
                let a = 10 * bi..10 * bi + 10;
                let b = 10 * bj..10 * bj + 10;
                let pattern_a = e.i == a.end - 1 && e.j == b.start;
                let pattern_b = e.i == a.start && e.j == b.end - 1;
                assert!(pattern_a || pattern_b, "{e:?}");
            }
        }
    }

    #[test]
    fn line_communities_uses_both_patterns() {
        let mut first_pattern = 0;
        let mut total = 0;
        for seed in 0..30 {
            let g = generate_line_communities(20, 2, 0.5, seed).unwrap();
            let e = g.edges().iter().find(|e| e.i < 10 && e.j >= 10).unwrap();
            total += 1;
            if e.i == 9 {
                first_pattern += 1;
            }
        }
        assert!(first_pattern > 0 && first_pattern < total);
    }

    #[test]
    fn multilayer_shares_labels() {
        let labels = balanced_partition(30, 3).unwrap();
        let ml = generate_multilayer_sbm(&labels, &[(0.5, 0.05), (0.3, 0.1)], 4).unwrap();
        assert_eq!(ml.layers().len(), 2);
        assert_ne!(ml.layers()[0], ml.layers()[1]);
        assert!(ml.layers().iter().all(Graph::is_connected));
    }
}
