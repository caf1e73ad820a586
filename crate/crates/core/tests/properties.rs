use gbary::graphs::Graph;
use gbary::io::{format_graph, parse_graph, GraphFormat};
use gbary::learn::nmi;
use gbary::{graph_distance, mean_of, DistanceKind, MeanConfig, MeanKind, SpectralFilter, SymMatrix, Weights};
use proptest::prelude::*;

/// Connected weighted graph: a random spanning path plus optional chords.
fn connected_graph(n: usize) -> impl Strategy<Value = Graph> {
    (
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        prop::collection::vec(0.2f64..3.0, n - 1),
        prop::collection::vec((0..n, 0..n, 0.2f64..3.0), 0..2 * n),
    )
        .prop_map(move |(order, path_w, chords)| {
            let mut edges: Vec<(usize, usize, f64)> = order.windows(2).zip(path_w).map(|(p, w)| (p[0], p[1], w)).collect();
            edges.extend(chords.into_iter().filter(|(i, j, _)| i != j));
            // Duplicate pairs accumulate, which keeps the graph valid.
            let mut acc = std::collections::BTreeMap::new();
            for (i, j, w) in edges {
                *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
            }
            Graph::new(n, acc.into_iter().map(|((i, j), w)| (i, j, w))).unwrap()
        })
}

fn graphs(count: usize) -> impl Strategy<Value = Vec<Graph>> {
    (3usize..9).prop_flat_map(move |n| prop::collection::vec(connected_graph(n), count))
}

fn filter() -> impl Strategy<Value = SpectralFilter> {
    prop::sample::select(SpectralFilter::ALL.to_vec())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bw_distance_is_a_metric(gs in graphs(3), f in filter()) {
        let k = DistanceKind::BuresWasserstein(f);
        let d = |a: &Graph, b: &Graph| graph_distance(a, b, k).unwrap();
        let (ab, bc, ac) = (d(&gs[0], &gs[1]), d(&gs[1], &gs[2]), d(&gs[0], &gs[2]));
        prop_assert!(ab >= 0.0 && bc >= 0.0 && ac >= 0.0);
        prop_assert!((ab - d(&gs[1], &gs[0])).abs() <= 1e-9);
        prop_assert!(d(&gs[0], &gs[0]) <= 1e-9);
        prop_assert!(ac <= ab + bc + 1e-8);
    }

    #[test]
    fn distances_ignore_node_order(
        (gs, perm) in graphs(2).prop_flat_map(|gs| { let n = gs[0].num_nodes(); (Just(gs), permutation(n)) }),
        f in filter(),
    ) {
        for k in [DistanceKind::BuresWasserstein(f), DistanceKind::LaplacianFrobenius, DistanceKind::PinvLaplacianFrobenius] {
            let a = graph_distance(&gs[0], &gs[1], k).unwrap();
            let b = graph_distance(&gs[0].permute(&perm).unwrap(), &gs[1].permute(&perm).unwrap(), k).unwrap();
            prop_assert!((a - b).abs() <= 1e-9, "{k}: {a} vs {b}");
        }
    }

    #[test]
    fn means_are_permutation_equivariant(
        (gs, perm) in graphs(3).prop_flat_map(|gs| { let n = gs[0].num_nodes(); (Just(gs), permutation(n)) }),
        raw in prop::collection::vec(0.1f64..1.0, 3),
        kind in prop::sample::select(vec![MeanKind::default(), MeanKind::Arithmetic, MeanKind::Harmonic, MeanKind::Power(-2.0), MeanKind::Karcher]),
    ) {
        let w = Weights::new(raw).unwrap();
        let lap = |g: &Graph| g.laplacian().into_matrix();
        let ls: Vec<SymMatrix> = gs.iter().map(lap).collect();
        let pls: Vec<SymMatrix> = gs.iter().map(|g| lap(&g.permute(&perm).unwrap())).collect();
        let p = gbary::graphs::permutation_matrix(&perm).unwrap();
        let a = mean_of(&ls, &w, kind, &MeanConfig::default()).unwrap().transform(&p);
        let b = mean_of(&pls, &w, kind, &MeanConfig::default()).unwrap();
        prop_assert!(a.frobenius_distance(&b) <= 1e-8);
    }

    #[test]
    fn mean_of_identical_inputs_is_the_input(gs in graphs(1), m in 1usize..4) {
        let l = gs[0].laplacian().into_matrix();
        let ls = vec![l.clone(); m];
        for kind in [MeanKind::default(), MeanKind::Arithmetic, MeanKind::Harmonic, MeanKind::Karcher] {
            let mean = mean_of(&ls, &Weights::uniform(m).unwrap(), kind, &MeanConfig::default()).unwrap();
            prop_assert!(mean.frobenius_distance(&l) <= 1e-8 * l.frobenius_norm().max(1.0), "{kind}");
        }
    }

    #[test]
    fn weights_normalize(raw in prop::collection::vec(1e-3f64..1e3, 1..8)) {
        let w = Weights::new(raw.clone()).unwrap();
        prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let total: f64 = raw.iter().sum();
        for (a, b) in w.as_slice().iter().zip(&raw) {
            prop_assert!((a - b / total).abs() <= 1e-12);
        }
    }

    #[test]
    fn nmi_is_symmetric_and_label_invariant(
        a in prop::collection::vec(0usize..4, 2..40),
        seed in any::<u64>(),
    ) {
        let b: Vec<usize> = a.iter().enumerate().map(|(i, x)| (x + (seed as usize >> (i % 16)) % 2) % 4).collect();
        let ab = nmi(&a, &b).unwrap();
        prop_assert!((ab - nmi(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        let relabeled: Vec<usize> = a.iter().map(|x| 7 - x).collect();
        prop_assert!((nmi(&a, &relabeled).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn graph_files_round_trip(gs in graphs(1)) {
        for format in [GraphFormat::EdgeList, GraphFormat::DenseLaplacian, GraphFormat::DenseAdjacency] {
            prop_assert_eq!(&parse_graph(&format_graph(&gs[0], format)).unwrap(), &gs[0]);
        }
    }
}
