//! Neighbourhood-function and diameter estimates against exhaustive BFS.

mod common;

use common::{exact_diameter, exact_hop_counts, random_graph};
use proptest::prelude::*;
use tailgraph_core::distances::{anf_hopplot, bfs_diameter_lower_bound, effective_diameter, effective_diameter_of, AnfOptions};
use tailgraph_core::{AdjacencyGraph, NodeId};

fn within_counter_error(est: &[f64], exact: &[f64], rel: f64) -> bool {
    let last = |v: &[f64], h: usize| v.get(h).or(v.last()).copied().unwrap();
    (0..est.len().max(exact.len())).all(|h| (last(est, h) - last(exact, h)).abs() <= rel * last(exact, h))
}

#[test]
fn small_graphs_hop_counts() {
    let cycle = AdjacencyGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let path = AdjacencyGraph::from_arcs(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(exact_hop_counts(&cycle), [3.0, 6.0, 9.0]);
    assert_eq!(exact_hop_counts(&path), [4.0, 7.0, 9.0, 10.0]);
    for (g, exact) in [(cycle, vec![3.0, 6.0, 9.0]), (path, vec![4.0, 7.0, 9.0, 10.0])] {
        let hp = anf_hopplot(&g, &AnfOptions::default()).unwrap();
        assert_eq!(hp.counts[0], exact[0]);
        assert!(within_counter_error(&hp.counts, &exact, 3.0 * hp.pair_estimate_error), "{:?}", hp.counts);
    }
}

#[test]
fn effective_diameter_interpolation() {
    assert_eq!(effective_diameter_of(&[4.0, 7.0, 9.0, 10.0], 0.9).unwrap(), 2.0);
    let n = 50.0;
    assert!(effective_diameter_of(&[n, n * n], 0.9).unwrap() <= 1.0);
    assert!(effective_diameter_of(&[4.0, 7.0], 1.0).is_err());
    assert!(effective_diameter_of(&[4.0, 7.0], 0.0).is_err());
    assert_eq!(effective_diameter_of(&[10.0, 10.0], 0.9).unwrap(), 0.0);
}

#[test]
fn bfs_bound_small_cases() {
    let path = AdjacencyGraph::from_arcs(11, (0..10).map(|i| (i, i + 1))).unwrap();
    assert_eq!(bfs_diameter_lower_bound(&path, 11, 0).unwrap(), 10);
    let cycle = AdjacencyGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    for seed in 0..3 {
        assert_eq!(bfs_diameter_lower_bound(&cycle, 1, seed).unwrap(), 2);
    }
    assert!(bfs_diameter_lower_bound(&cycle, 0, 0).is_err());
}

#[test]
fn exhaustive_bfs_bound_is_exact() {
    for seed in 0..4 {
        let g = random_graph(500, 1.5, seed);
        assert_eq!(bfs_diameter_lower_bound(&g, 500, seed).unwrap() as usize, exact_diameter(&g));
    }
}

#[test]
fn more_trials_reduce_variance() {
    let g = random_graph(300, 2.0, 7);
    let exact = exact_hop_counts(&g);
    let spread = |trials: usize| {
        let runs: Vec<Vec<f64>> = (0..30)
            .map(|seed| anf_hopplot(&g, &AnfOptions { trials, seed, ..AnfOptions::default() }).unwrap().counts)
            .collect();
        (1..exact.len())
            .map(|h| {
                let vals: Vec<f64> = runs.iter().map(|c| c[h.min(c.len() - 1)]).collect();
                let m = vals.iter().sum::<f64>() / vals.len() as f64;
                vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64
            })
            .sum::<f64>()
    };
    let (coarse, fine) = (spread(16), spread(128));
    assert!(fine < coarse, "variance with 128 trials {fine} not below 16 trials {coarse}");
}

#[test]
fn effective_diameter_close_to_exact() {
    let g = random_graph(1000, 3.0, 3);
    let exact = effective_diameter_of(&exact_hop_counts(&g), 0.9).unwrap();
    let hp = anf_hopplot(&g, &AnfOptions { trials: 256, ..AnfOptions::default() }).unwrap();
    let est = effective_diameter(&hp, 0.9).unwrap();
    assert!((est - exact).abs() < 0.5, "{est} vs {exact}");
    let (mean, sd) = hp.effective_diameter_spread(0.9).unwrap().unwrap();
    assert!(sd > 0.0 && (mean - exact).abs() < 1.0);
}

fn small_graph() -> impl Strategy<Value = AdjacencyGraph> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n as NodeId, 0..n as NodeId), 0..120)
            .prop_map(move |arcs| AdjacencyGraph::from_arcs(n, arcs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hop_plot_is_monotone_and_deterministic(g in small_graph(), seed in any::<u64>(), undirected in any::<bool>()) {
        let opts = AnfOptions { trials: 32, seed, undirected, ..AnfOptions::default() };
        let hp = anf_hopplot(&g, &opts).unwrap();
        prop_assert!(hp.counts.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(hp.counts[0], g.node_count() as f64);
        prop_assert_eq!(&anf_hopplot(&g, &opts).unwrap(), &hp);
    }

    #[test]
    fn bfs_bound_never_exceeds_diameter(g in small_graph(), sample in 1usize..50, seed in any::<u64>()) {
        prop_assert!(bfs_diameter_lower_bound(&g, sample, seed).unwrap() as usize <= exact_diameter(&g));
    }
}
