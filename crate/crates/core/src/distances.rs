//! Neighbourhood-function estimation with Flajolet-Martin bit-string
//! counters, effective diameter by interpolation, and a sampled-BFS lower
//! bound on the diameter.
//!
//! Each node keeps `trials` independent counters of `L = ceil(log2 n) +
//! bias_bits` bits. An item sets bit `j` of a counter with probability
//! `2^-(j+1)` (the last bit absorbs the remainder). After `h` rounds of
//! OR-ing along out-arcs, the counters of `u` summarize every node within
//! `h` hops of `u`. Cardinalities are recovered per node by maximizing the
//! composite likelihood of the per-bit fill counts, which stays unbiased for
//! small neighbourhoods where the classic `2^mean / 0.77351` rule does not.

use alloc::vec;
use alloc::vec::Vec;
use alloc::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyGraph, NodeId};
use crate::rng::{self, mix64, stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnfOptions {
    pub trials: usize,
    pub bias_bits: u32,
    pub max_h: usize,
    /// Stop once `N(h) / N(h-1) - 1` falls below this.
    pub epsilon: f64,
    pub seed: u64,
    /// Follow arcs in both directions.
    pub undirected: bool,
}

impl Default for AnfOptions {
    fn default() -> Self {
        AnfOptions { trials: 64, bias_bits: 8, max_h: 1000, epsilon: 1e-4, seed: 0, undirected: false }
    }
}

/// Trial groups used to measure the spread of derived quantities.
const GROUPS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct HopPlot {
    /// `counts[h]` estimates the ordered pairs (self-pairs included) within `h` hops.
    pub counts: Vec<f64>,
    pub node_count: usize,
    pub trials: usize,
    pub bias_bits: u32,
    pub seed: u64,
    /// Nominal relative standard error of one node's cardinality estimate, `0.78 / sqrt(trials)`.
    pub pair_estimate_error: f64,
    /// Independent hop plots from disjoint groups of trials; empty when
    /// there are too few trials to split.
    pub group_counts: Vec<Vec<f64>>,
}

impl HopPlot {
    /// Largest hop emitted.
    pub fn horizon(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// Mean and population standard deviation of the effective diameter
    /// across trial groups.
    pub fn effective_diameter_spread(&self, quantile: f64) -> Result<Option<(f64, f64)>> {
        if self.group_counts.is_empty() {
            return Ok(None);
        }
        let mut values = Vec::with_capacity(self.group_counts.len());
        for g in &self.group_counts {
            values.push(effective_diameter_of(g, quantile)?);
        }
        let m = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
        Ok(Some((m, libm::sqrt(var))))
    }
}

/// Composite maximum-likelihood cardinality from per-bit fill counts.
///
/// Solves `sum_j a_j (s_j / (1 - q_j^t) - k) = 0` for `t` with
/// `a_j = -ln q_j`, where `q_j` is the probability that one item leaves
/// bit `j` clear.
struct CardinalityEstimator {
    ln_q: Vec<f64>,
}

impl CardinalityEstimator {
    fn new(bits: usize) -> Self {
        let ln_q = (0..bits)
            .map(|j| {
                let p = if j + 1 < bits { libm::ldexp(1.0, -(j as i32 + 1)) } else { libm::ldexp(1.0, -(j as i32)) };
                libm::log1p(-p)
            })
            .collect();
        CardinalityEstimator { ln_q }
    }

    /// `None` when every bit is saturated (cardinality beyond resolution).
    fn estimate(&self, fills: &[u32], k: u32) -> Option<f64> {
        if fills.iter().all(|&s| s == 0) {
            return Some(0.0);
        }
        if fills.iter().all(|&s| s == k) {
            return None;
        }
        let kf = k as f64;
        let g = |t: f64| -> (f64, f64) {
            let (mut val, mut der) = (0.0, 0.0);
            for (&s, &lq) in fills.iter().zip(&self.ln_q) {
                let a = -lq;
                if s > 0 {
                    let one_minus = -libm::expm1(t * lq);
                    let qt = 1.0 - one_minus;
                    val += a * (s as f64 / one_minus - kf);
                    der -= a * a * s as f64 * qt / (one_minus * one_minus);
                } else {
                    val -= a * kf;
                }
            }
            (val, der)
        };
        // start where the fill fraction crosses one half, then bracket in log space
        let half = fills.iter().position(|&s| 2 * s < k).unwrap_or(fills.len() - 1);
        let mut u = libm::log(core::f64::consts::LN_2 * libm::ldexp(1.0, half as i32 + 1));
        let (mut lo, mut hi) = (u - 1.0, u + 1.0);
        while g(libm::exp(hi)).0 > 0.0 {
            lo = hi;
            hi += 2.0;
            if hi > 700.0 {
                return None;
            }
        }
        while g(libm::exp(lo)).0 < 0.0 {
            hi = lo;
            lo -= 2.0;
        }
        u = u.clamp(lo, hi);
        for _ in 0..100 {
            let t = libm::exp(u);
            let (val, der) = g(t);
            if val > 0.0 {
                lo = u;
            } else {
                hi = u;
            }
            // Newton in u = ln t: dg/du = t g'(t)
            let mut next = u - val / (t * der);
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            let done = (next - u).abs() < 1e-10 || hi - lo < 1e-10;
            u = next;
            if done {
                break;
            }
        }
        Some(libm::exp(u))
    }
}

/// Counter state: `bits` positions by `words` 64-trial words per node, stored bit-major.
struct Counters {
    bits: usize,
    words: usize,
    data: Vec<u64>,
}

impl Counters {
    #[inline]
    fn node(&self, u: usize) -> &[u64] {
        let w = self.bits * self.words;
        &self.data[u * w..(u + 1) * w]
    }
}

/// Population count of trials `start..end` within one bit row.
fn count_range(row: &[u64], start: usize, end: usize) -> u32 {
    let mut total = 0;
    let mut t = start;
    while t < end {
        let w = t / 64;
        let lo = t % 64;
        let hi = (end - w * 64).min(64);
        let mask = if hi - lo == 64 { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
        total += (row[w] & mask).count_ones();
        t = w * 64 + hi;
    }
    total
}

/// Approximate neighbourhood function. `counts[0]` is exactly `n`, counts
/// never decrease, and iteration ends when no counter changes, growth falls
/// below `epsilon`, or `max_h` is reached.
pub fn anf_hopplot(g: &AdjacencyGraph, opts: &AnfOptions) -> Result<HopPlot> {
    if opts.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let sym;
    let g = if opts.undirected {
        sym = g.symmetrized();
        &sym
    } else {
        g
    };
    let n = g.node_count();
    let k = opts.trials;
    let log2n = if n <= 1 { 0 } else { usize::BITS - (n - 1).leading_zeros() } as usize;
    let bits = (log2n + opts.bias_bits as usize).max(1);
    let words = k.div_ceil(64);
    let row = bits * words;
    let groups = if k >= 2 * GROUPS { GROUPS } else { 0 };

    let mut cur = Counters { bits, words, data: vec![0u64; n * row] };
    let salt = mix64(opts.seed);
    for u in 0..n {
        for t in 0..k {
            let h = mix64(salt ^ mix64(((u as u64) << 24) ^ t as u64));
            let j = (h.trailing_zeros() as usize).min(bits - 1);
            cur.data[u * row + j * words + t / 64] |= 1u64 << (t % 64);
        }
    }

    let est = CardinalityEstimator::new(bits);
    let mut fills = vec![0u32; bits];
    let group_bounds: Vec<(usize, usize)> = (0..groups).map(|i| (i * k / groups, (i + 1) * k / groups)).collect();
    let n_f = n as f64;
    let mut node_est = vec![0.0f64; n];
    let mut node_group_est = vec![0.0f64; n * groups];
    let estimate_node = |c: &Counters, u: usize, fills: &mut [u32], out: &mut f64, out_groups: &mut [f64]| {
        let data = c.node(u);
        for j in 0..bits {
            fills[j] = data[j * words..(j + 1) * words].iter().map(|w| w.count_ones()).sum();
        }
        *out = est.estimate(fills, k as u32).unwrap_or(n_f).clamp(1.0, n_f);
        for (gi, &(s, e)) in group_bounds.iter().enumerate() {
            for j in 0..bits {
                fills[j] = count_range(&data[j * words..(j + 1) * words], s, e);
            }
            out_groups[gi] = est.estimate(fills, (e - s) as u32).unwrap_or(n_f).clamp(1.0, n_f);
        }
    };

    let mut counts = vec![n_f];
    let mut group_counts: Vec<Vec<f64>> = vec![vec![n_f]; groups];
    for u in 0..n {
        estimate_node(&cur, u, &mut fills, &mut node_est[u], &mut node_group_est[u * groups..(u + 1) * groups]);
    }

    let mut next = Counters { bits, words, data: cur.data.clone() };
    let mut changed = vec![false; n];
    for _h in 1..=opts.max_h {
        let mut any = false;
        for u in 0..n {
            let base = u * row;
            let dst = &mut next.data[base..base + row];
            dst.copy_from_slice(&cur.data[base..base + row]);
            for &v in g.successors(u as NodeId) {
                let src = cur.node(v as usize);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= *s;
                }
            }
            changed[u] = dst != &cur.data[base..base + row];
            any |= changed[u];
        }
        if !any {
            break;
        }
        core::mem::swap(&mut cur, &mut next);
        for u in (0..n).filter(|&u| changed[u]) {
            estimate_node(&cur, u, &mut fills, &mut node_est[u], &mut node_group_est[u * groups..(u + 1) * groups]);
        }
        let prev = *counts.last().unwrap();
        let total = node_est.iter().sum::<f64>().max(prev);
        counts.push(total);
        for (gi, gc) in group_counts.iter_mut().enumerate() {
            let s: f64 = (0..n).map(|u| node_group_est[u * groups + gi]).sum();
            let p = *gc.last().unwrap();
            gc.push(s.max(p));
        }
        if total / prev - 1.0 < opts.epsilon {
            break;
        }
    }

    Ok(HopPlot {
        counts,
        node_count: n,
        trials: k,
        bias_bits: opts.bias_bits,
        seed: opts.seed,
        pair_estimate_error: 0.78 / libm::sqrt(k as f64),
        group_counts,
    })
}

/// Smallest interpolated hop at which `quantile` of the final pair count is reached.
pub fn effective_diameter(hp: &HopPlot, quantile: f64) -> Result<f64> {
    effective_diameter_of(&hp.counts, quantile)
}

/// [`effective_diameter`] on a bare cumulative pair-count sequence.
pub fn effective_diameter_of(counts: &[f64], quantile: f64) -> Result<f64> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::invalid("quantile must lie strictly between 0 and 1"));
    }
    let Some(&last) = counts.last() else {
        return Err(Error::invalid("empty hop plot"));
    };
    let threshold = quantile * last;
    let h = counts.iter().position(|&c| c >= threshold).unwrap_or(counts.len() - 1);
    if h == 0 {
        return Ok(0.0);
    }
    let (a, b) = (counts[h - 1], counts[h]);
    Ok((h - 1) as f64 + (threshold - a) / (b - a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiameterEstimates {
    pub effective_diameter: f64,
    pub full_diameter_lower_bound: u32,
    pub bfs_sample_size: usize,
    pub seed: u64,
}

/// `sample` distinct start nodes drawn without replacement, or every node
/// when `sample >= n`, in ascending order.
pub fn sample_sources(n: usize, sample: usize, seed: u64) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..n as NodeId).collect();
    if sample >= n {
        return ids;
    }
    let mut r = stream(seed, 0);
    for i in 0..sample {
        let j = i + rng::below(&mut r, (n - i) as u64) as usize;
        ids.swap(i, j);
    }
    ids.truncate(sample);
    ids.sort_unstable();
    ids
}

/// Reusable BFS buffers.
#[derive(Debug, Clone, Default)]
pub struct BfsScratch {
    dist: Vec<u32>,
    queue: VecDeque<NodeId>,
}

/// Largest finite hop distance from `source` along arcs.
pub fn eccentricity(g: &AdjacencyGraph, source: NodeId, scratch: &mut BfsScratch) -> u32 {
    let n = g.node_count();
    scratch.dist.clear();
    scratch.dist.resize(n, u32::MAX);
    scratch.queue.clear();
    scratch.dist[source as usize] = 0;
    scratch.queue.push_back(source);
    let mut far = 0;
    while let Some(u) = scratch.queue.pop_front() {
        let du = scratch.dist[u as usize];
        far = far.max(du);
        for &v in g.successors(u) {
            if scratch.dist[v as usize] == u32::MAX {
                scratch.dist[v as usize] = du + 1;
                scratch.queue.push_back(v);
            }
        }
    }
    far
}

/// Maximum eccentricity over sampled start nodes; never exceeds the
/// diameter over connected ordered pairs.
pub fn bfs_diameter_lower_bound(g: &AdjacencyGraph, sample: usize, seed: u64) -> Result<u32> {
    if sample == 0 {
        return Err(Error::invalid("BFS sample must be at least 1"));
    }
    let mut scratch = BfsScratch::default();
    Ok(sample_sources(g.node_count(), sample, seed)
        .into_iter()
        .map(|s| eccentricity(g, s, &mut scratch))
        .max()
        .unwrap_or(0))
}
