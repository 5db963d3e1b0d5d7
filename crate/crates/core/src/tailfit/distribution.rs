use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graph::DegreeHistogram;

/// Multiset of positive integer observations stored as sorted distinct
/// values with multiplicities. Zero observations are kept aside in
/// [`zero_count`](Self::zero_count) and never fitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    values: Vec<u64>,
    counts: Vec<u64>,
    total: u64,
    zeros: u64,
}

impl EmpiricalDistribution {
    pub fn from_observations<I: IntoIterator<Item = u64>>(obs: I) -> Self {
        let mut v: Vec<u64> = obs.into_iter().collect();
        v.sort_unstable();
        let mut d = EmpiricalDistribution::default();
        for x in v {
            d.push_sorted(x, 1);
        }
        d
    }

    /// Builds from `(value, count)` pairs in any order; repeated values are summed.
    pub fn from_frequencies<I: IntoIterator<Item = (u64, u64)>>(freq: I) -> Self {
        let mut map = BTreeMap::new();
        for (x, c) in freq {
            *map.entry(x).or_insert(0u64) += c;
        }
        let mut d = EmpiricalDistribution::default();
        for (x, c) in map {
            d.push_sorted(x, c);
        }
        d
    }

    pub fn from_histogram(h: &DegreeHistogram) -> Self {
        Self::from_frequencies(h.counts.iter().map(|(&d, &c)| (d, c)))
    }

    fn push_sorted(&mut self, x: u64, c: u64) {
        if c == 0 {
            return;
        }
        if x == 0 {
            self.zeros += c;
            return;
        }
        match self.values.last() {
            Some(&last) if last == x => *self.counts.last_mut().unwrap() += c,
            _ => {
                self.values.push(x);
                self.counts.push(c);
            }
        }
        self.total += c;
    }

    /// Distinct positive values, ascending.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of positive observations.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn zero_count(&self) -> u64 {
        self.zeros
    }

    pub fn distinct(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn max(&self) -> Option<u64> {
        self.values.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.values.iter().copied().zip(self.counts.iter().copied())
    }

    /// Observations `>= xmin`.
    pub fn tail_count(&self, xmin: u64) -> u64 {
        let i = self.values.partition_point(|&v| v < xmin);
        self.counts[i..].iter().sum()
    }

    pub fn to_sample(&self) -> WeightedSample {
        WeightedSample {
            values: self.values.iter().map(|&v| v as f64).collect(),
            counts: self.counts.clone(),
            total: self.total,
        }
    }
}

/// Sorted distinct positive reals with multiplicities; the working form for
/// fitting, which also carries real-valued synthetic data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedSample {
    pub(crate) values: Vec<f64>,
    pub(crate) counts: Vec<u64>,
    pub(crate) total: u64,
}

impl WeightedSample {
    /// Sorts and merges raw observations. Non-positive and non-finite values are dropped.
    pub fn from_values(mut raw: Vec<f64>) -> Self {
        raw.retain(|x| x.is_finite() && *x > 0.0);
        raw.sort_unstable_by(f64::total_cmp);
        let mut s = WeightedSample::default();
        for x in raw {
            s.push_sorted(x, 1);
        }
        s
    }

    pub(crate) fn push_sorted(&mut self, x: f64, c: u64) {
        if c == 0 {
            return;
        }
        match self.values.last() {
            Some(&last) if last == x => *self.counts.last_mut().unwrap() += c,
            _ => {
                self.values.push(x);
                self.counts.push(c);
            }
        }
        self.total += c;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn tail_start(&self, xmin: f64) -> usize {
        self.values.partition_point(|&v| v < xmin)
    }

    /// Converts back when every value is an integer.
    pub fn to_distribution(&self) -> Option<EmpiricalDistribution> {
        if self.values.iter().any(|&v| v != libm::trunc(v)) {
            return None;
        }
        Some(EmpiricalDistribution::from_frequencies(
            self.values.iter().zip(&self.counts).map(|(&v, &c)| (v as u64, c)),
        ))
    }
}
