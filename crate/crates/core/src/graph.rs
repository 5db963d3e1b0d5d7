//! Immutable directed graphs in compressed adjacency (CSR) form.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense node index, `0 <= id < node_count`.
pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoopPolicy {
    #[default]
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    In,
    Out,
    Total,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
            Direction::Total => "total",
        }
    }
}

/// Collects arcs and builds an [`AdjacencyGraph`].
///
/// Arcs are sorted and deduplicated at build time. With `dedup` disabled a
/// repeated arc is reported as [`Error::DuplicateArc`] instead of merged.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    node_count: usize,
    arcs: Vec<(NodeId, NodeId)>,
    dedup: bool,
    self_loops: SelfLoopPolicy,
    self_loops_dropped: u64,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        GraphBuilder { node_count, arcs: Vec::new(), dedup: true, self_loops: SelfLoopPolicy::Keep, self_loops_dropped: 0 }
    }

    pub fn with_capacity(node_count: usize, arcs: usize) -> Self {
        let mut b = Self::new(node_count);
        b.arcs.reserve(arcs);
        b
    }

    pub fn dedup(mut self, dedup: bool) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn self_loops(mut self, policy: SelfLoopPolicy) -> Self {
        self.self_loops = policy;
        self
    }

    /// Grows the node count so that `node` is a valid id.
    pub fn ensure_node(&mut self, node: NodeId) {
        self.node_count = self.node_count.max(node as usize + 1);
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Adds an arc, growing the node count to cover both endpoints.
    pub fn add_arc(&mut self, src: NodeId, dst: NodeId) {
        if src == dst && self.self_loops == SelfLoopPolicy::Drop {
            self.ensure_node(src);
            self.self_loops_dropped += 1;
            return;
        }
        self.ensure_node(src.max(dst));
        self.arcs.push((src, dst));
    }

    pub fn self_loops_dropped(&self) -> u64 {
        self.self_loops_dropped
    }

    pub fn build(self) -> Result<AdjacencyGraph> {
        let GraphBuilder { node_count, mut arcs, dedup, .. } = self;
        if node_count > NodeId::MAX as usize {
            return Err(Error::invalid("node count exceeds the 32-bit id space"));
        }
        arcs.sort_unstable();
        if !dedup {
            if let Some(w) = arcs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateArc { src: w[0].0, dst: w[0].1 });
            }
        }
        arcs.dedup();
        Ok(AdjacencyGraph::from_sorted_arcs(node_count, &arcs))
    }
}

/// Directed graph with sorted, duplicate-free out-lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    labels: Option<Vec<String>>,
}

impl AdjacencyGraph {
    pub fn empty(node_count: usize) -> Self {
        AdjacencyGraph { offsets: vec![0; node_count + 1], targets: Vec::new(), labels: None }
    }

    /// Builds from arcs that are already sorted by `(src, dst)` and unique.
    pub(crate) fn from_sorted_arcs(node_count: usize, arcs: &[(NodeId, NodeId)]) -> Self {
        let mut offsets = vec![0usize; node_count + 1];
        for &(s, _) in arcs {
            offsets[s as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|&(_, t)| t).collect();
        AdjacencyGraph { offsets, targets, labels: None }
    }

    /// Convenience constructor; deduplicates and keeps self-loops.
    pub fn from_arcs(node_count: usize, arcs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut b = GraphBuilder::new(node_count);
        for (s, t) in arcs {
            if s as usize >= node_count || t as usize >= node_count {
                return Err(Error::NodeOutOfRange { node: s.max(t) as u64, node_count: node_count as u64 });
            }
            b.add_arc(s, t);
        }
        b.build()
    }

    /// Attaches a label table. Its length must equal the node count.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::invalid("label table length differs from node count"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, node: NodeId) -> Option<&str> {
        self.labels.as_ref().map(|l| l[node as usize].as_str())
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Concatenated successor lists, indexed by [`offsets`](Self::offsets).
    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        let n = node as usize;
        &self.targets[self.offsets[n]..self.offsets[n + 1]]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        let n = node as usize;
        self.offsets[n + 1] - self.offsets[n]
    }

    pub fn has_arc(&self, src: NodeId, dst: NodeId) -> bool {
        self.successors(src).binary_search(&dst).is_ok()
    }

    pub fn nodes(&self) -> core::ops::Range<NodeId> {
        0..self.node_count() as NodeId
    }

    /// All arcs in `(src, dst)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn in_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.node_count()];
        for &t in &self.targets {
            deg[t as usize] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<u64> {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as u64).collect()
    }

    pub fn degrees(&self, direction: Direction) -> Vec<u64> {
        match direction {
            Direction::In => self.in_degrees(),
            Direction::Out => self.out_degrees(),
            Direction::Total => {
                let mut d = self.in_degrees();
                for (x, o) in d.iter_mut().zip(self.offsets.windows(2)) {
                    *x += (o[1] - o[0]) as u64;
                }
                d
            }
        }
    }

    /// Reverses every arc. Labels are carried over.
    pub fn transpose(&self) -> AdjacencyGraph {
        let n = self.node_count();
        let mut offsets = vec![0usize; n + 1];
        for &t in &self.targets {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0 as NodeId; self.targets.len()];
        // sources are visited in increasing order, so each reversed list comes out sorted
        for u in self.nodes() {
            for &v in self.successors(u) {
                let slot = &mut cursor[v as usize];
                targets[*slot] = u;
                *slot += 1;
            }
        }
        AdjacencyGraph { offsets, targets, labels: self.labels.clone() }
    }

    /// Out-lists merged with in-lists: the underlying undirected graph, still
    /// stored as a directed CSR with both arc directions.
    pub fn symmetrized(&self) -> AdjacencyGraph {
        let t = self.transpose();
        let n = self.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(self.arc_count() * 2);
        offsets.push(0);
        for u in self.nodes() {
            let (a, b) = (self.successors(u), t.successors(u));
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let next = match (a.get(i), b.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        j += 1;
                        y
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                targets.push(next);
            }
            offsets.push(targets.len());
        }
        AdjacencyGraph { offsets, targets, labels: None }
    }

    /// Average total degree, `2 * arcs / nodes` (0 for the empty graph).
    pub fn average_degree(&self) -> f64 {
        average_total_degree(self.node_count() as u64, self.arc_count() as u64)
    }

    pub fn degree_histogram(&self, direction: Direction) -> DegreeHistogram {
        DegreeHistogram::from_degrees(direction, &self.degrees(direction))
    }
}

/// Average total degree from raw counts: every arc contributes one in and one out.
pub fn average_total_degree(nodes: u64, arcs: u64) -> f64 {
    if nodes == 0 {
        0.0
    } else {
        2.0 * arcs as f64 / nodes as f64
    }
}

/// Frequency of each degree value. Zero-degree nodes are counted in
/// `zero_degree_nodes` and also appear under key 0 of `counts`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub direction: Direction,
    pub counts: BTreeMap<u64, u64>,
    pub zero_degree_nodes: u64,
}

impl DegreeHistogram {
    pub fn from_degrees(direction: Direction, degrees: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &d in degrees {
            *counts.entry(d).or_insert(0u64) += 1;
        }
        let zero_degree_nodes = counts.get(&0).copied().unwrap_or(0);
        DegreeHistogram { direction, counts, zero_degree_nodes }
    }

    pub fn node_count(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum_d d * count(d)`; equals the arc count for in/out, twice it for total.
    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(d, c)| d * c).sum()
    }

    pub fn max_degree(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}
