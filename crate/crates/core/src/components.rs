//! Weakly connected components by disjoint-set union and strongly connected
//! components by an iterative Tarjan traversal.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::AdjacencyGraph;
use crate::tailfit::EmpiricalDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Strong,
    Weak,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Strong => "scc",
            ComponentKind::Weak => "wcc",
        }
    }
}

/// Partition of the nodes into components. Component ids are dense and
/// follow discovery order; only the partition is meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub kind: ComponentKind,
    pub assignment: Vec<u32>,
    /// `sizes[c]` is the node count of component `c`.
    pub sizes: Vec<u64>,
    pub largest_fraction: f64,
}

impl ComponentSummary {
    fn from_assignment(kind: ComponentKind, assignment: Vec<u32>, count: usize) -> Self {
        let mut sizes = vec![0u64; count];
        for &c in &assignment {
            sizes[c as usize] += 1;
        }
        let n = assignment.len();
        let largest = sizes.iter().copied().max().unwrap_or(0);
        let largest_fraction = if n == 0 { 0.0 } else { largest as f64 / n as f64 };
        ComponentSummary { kind, assignment, sizes, largest_fraction }
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> u64 {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Component sizes as a distribution, one observation per component.
    pub fn size_distribution(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::from_observations(self.sizes.iter().copied())
    }

    /// Whether `u` and `v` share a component.
    pub fn same(&self, u: u32, v: u32) -> bool {
        self.assignment[u as usize] == self.assignment[v as usize]
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns whether two distinct sets were merged.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

pub fn weakly_connected_components(g: &AdjacencyGraph) -> ComponentSummary {
    let n = g.node_count();
    let mut sets = DisjointSets::new(n);
    for (u, v) in g.arcs() {
        sets.union(u, v);
    }
    let mut id_of_root = vec![u32::MAX; n];
    let mut assignment = Vec::with_capacity(n);
    let mut next = 0u32;
    for u in 0..n as u32 {
        let r = sets.find(u) as usize;
        if id_of_root[r] == u32::MAX {
            id_of_root[r] = next;
            next += 1;
        }
        assignment.push(id_of_root[r]);
    }
    ComponentSummary::from_assignment(ComponentKind::Weak, assignment, next as usize)
}

/// Tarjan's algorithm with an explicit call stack; memory is linear in the
/// graph and independent of path lengths.
pub fn strongly_connected_components(g: &AdjacencyGraph) -> ComponentSummary {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let offsets = g.offsets();
    let targets = g.targets();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut assignment = vec![UNVISITED; n];
    let mut stack: Vec<u32> = Vec::new();
    // (node, next arc position)
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        calls.push((root, offsets[root as usize]));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (u, ref mut pos)) = calls.last_mut() {
            let ui = u as usize;
            if *pos < offsets[ui + 1] {
                let v = targets[*pos];
                *pos += 1;
                let vi = v as usize;
                if index[vi] == UNVISITED {
                    index[vi] = next_index;
                    low[vi] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[vi] = true;
                    calls.push((v, offsets[vi]));
                } else if on_stack[vi] {
                    low[ui] = low[ui].min(index[vi]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[ui]);
            }
            if low[ui] == index[ui] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w as usize] = false;
                    assignment[w as usize] = next_comp;
                    if w == u {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    ComponentSummary::from_assignment(ComponentKind::Strong, assignment, next_comp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_sizes(s: &ComponentSummary) -> Vec<u64> {
        let mut v = s.sizes.clone();
        v.sort_unstable();
        v
    }

    #[test]
    fn weak_pairs_and_isolated() {
        let g = AdjacencyGraph::from_arcs(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(sorted_sizes(&weakly_connected_components(&g)), [2, 2]);
        let e = AdjacencyGraph::from_arcs(5, []).unwrap();
        let w = weakly_connected_components(&e);
        assert_eq!(sorted_sizes(&w), [1, 1, 1, 1, 1]);
        assert!((w.largest_fraction - 0.2).abs() < 1e-15);
    }

    #[test]
    fn cycle_with_tail() {
        let g = AdjacencyGraph::from_arcs(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let s = strongly_connected_components(&g);
        assert_eq!(sorted_sizes(&s), [1, 3]);
        assert!(s.same(0, 2) && !s.same(2, 3));
        let d = s.size_distribution();
        assert_eq!(d.values(), &[1, 3]);
    }

    #[test]
    fn dag_is_all_singletons() {
        let g = AdjacencyGraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(sorted_sizes(&strongly_connected_components(&g)), [1, 1, 1]);
    }

    #[test]
    fn long_path_does_not_recurse() {
        let n = 200_000u32;
        let mut arcs: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        arcs.push((n - 1, 0));
        let g = AdjacencyGraph::from_arcs(n as usize, arcs).unwrap();
        let s = strongly_connected_components(&g);
        assert_eq!(s.count(), 1);
        assert_eq!(s.largest_fraction, 1.0);
    }

    #[test]
    fn equal_sizes_distribution() {
        let g = AdjacencyGraph::from_arcs(4, [(0, 1), (2, 3)]).unwrap();
        let d = weakly_connected_components(&g).size_distribution();
        assert_eq!(d.iter().collect::<Vec<_>>(), [(2, 2)]);
    }
}
