//! Shared fixtures and brute-force oracles for integration tests.
#![allow(dead_code)]

use tailgraph_core::rng::{below, stream};
use tailgraph_core::{AdjacencyGraph, NodeId};

/// `G(n, m)` with `m = round(mean_out_degree * n)` arcs drawn with
/// replacement; duplicates collapse and self-loops are kept.
pub fn random_graph(n: usize, mean_out_degree: f64, seed: u64) -> AdjacencyGraph {
    let mut r = stream(seed, 0);
    let m = (mean_out_degree * n as f64).round() as usize;
    let arcs: Vec<(NodeId, NodeId)> =
        (0..m).map(|_| (below(&mut r, n as u64) as NodeId, below(&mut r, n as u64) as NodeId)).collect();
    AdjacencyGraph::from_arcs(n, arcs).unwrap()
}

/// Hop distances from `s`, `usize::MAX` for unreachable nodes.
pub fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut frontier = vec![s];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for u in frontier {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = d;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    dist
}

pub fn adjacency(g: &AdjacencyGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for (u, v) in g.arcs() {
        adj[u as usize].push(v as usize);
    }
    adj
}

/// Exact `N(h)` for `h = 0..=max distance`, ordered pairs with self-pairs.
pub fn exact_hop_counts(g: &AdjacencyGraph) -> Vec<f64> {
    let adj = adjacency(g);
    let mut hist = vec![0u64; adj.len() + 1];
    for s in 0..adj.len() {
        for d in bfs(&adj, s) {
            if d != usize::MAX {
                hist[d] += 1;
            }
        }
    }
    let last = hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    let mut acc = 0u64;
    hist[..=last].iter().map(|&c| {
        acc += c;
        acc as f64
    }).collect()
}

/// Longest finite shortest-path distance over ordered pairs.
pub fn exact_diameter(g: &AdjacencyGraph) -> usize {
    let adj = adjacency(g);
    (0..adj.len())
        .flat_map(|s| bfs(&adj, s).into_iter().filter(|&d| d != usize::MAX))
        .max()
        .unwrap_or(0)
}

/// Canonical form of a partition: each node mapped to the smallest node of its block.
pub fn canonical(assignment: &[u32]) -> Vec<usize> {
    let mut first = std::collections::HashMap::new();
    assignment.iter().enumerate().map(|(i, &c)| *first.entry(c).or_insert(i)).collect()
}
