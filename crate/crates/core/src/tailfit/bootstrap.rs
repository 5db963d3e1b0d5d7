use alloc::vec;
use alloc::vec::Vec;

use super::{fit_sample, EmpiricalDistribution, FitOptions, FitResult, Formalism, PowerLawSampler, WeightedSample};
use crate::error::{Error, Result};
use crate::rng::{self, stream};

/// Fewest replicates accepted.
pub const MIN_SIMS: usize = 100;
/// Replicate count at which the p-value resolution reaches 0.01.
pub const PRECISE_SIMS: usize = 2500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GofOptions {
    pub n_sims: usize,
    pub seed: u64,
    pub fit: FitOptions,
}

impl Default for GofOptions {
    fn default() -> Self {
        GofOptions { n_sims: PRECISE_SIMS, seed: 0, fit: FitOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub p_value: f64,
    /// `1 / (2 sqrt(n_sims))`.
    pub precision: f64,
    pub n_sims: usize,
    pub seed: u64,
    /// Replicates whose KS distance reached the observed one.
    pub exceedances: usize,
    /// Set when `n_sims` is below the count giving 0.01 resolution.
    pub imprecise: bool,
    /// Replicates whose refit failed; they are left out of the ratio.
    pub failed_refits: usize,
}

/// Semiparametric bootstrap for a fitted power law. Each synthetic data set
/// has the original size; every observation is drawn from the fitted tail
/// with probability equal to the tail fraction, otherwise uniformly from
/// the observations below `xmin`. Each replicate is refit with its own
/// cutoff scan and uses the random stream numbered by its index.
#[derive(Debug, Clone)]
pub struct Bootstrap {
    formalism: Formalism,
    n: u64,
    tail_prob: f64,
    xmin: u64,
    body_values: Vec<u64>,
    /// Inclusive prefix sums of the body counts.
    body_cum: Vec<u64>,
    tail: PowerLawSampler,
    observed_ks: f64,
    opts: GofOptions,
}

impl Bootstrap {
    pub fn new(d: &EmpiricalDistribution, fit: &FitResult, opts: &GofOptions) -> Result<Self> {
        if opts.n_sims < MIN_SIMS {
            return Err(Error::InvalidArgument(alloc::format!(
                "at least {MIN_SIMS} bootstrap replicates are required, got {}",
                opts.n_sims
            )));
        }
        let mut body_values = Vec::new();
        let mut body_cum = Vec::new();
        let mut acc = 0;
        for (v, c) in d.iter().take_while(|&(v, _)| v < fit.xmin) {
            acc += c;
            body_values.push(v);
            body_cum.push(acc);
        }
        Ok(Bootstrap {
            formalism: fit.formalism,
            n: d.total(),
            tail_prob: fit.tail_fraction,
            xmin: fit.xmin,
            body_values,
            body_cum,
            tail: PowerLawSampler::new(fit.alpha, fit.xmin, fit.formalism)?,
            observed_ks: fit.ks,
            opts: *opts,
        })
    }

    pub fn n_sims(&self) -> usize {
        self.opts.n_sims
    }

    /// Synthetic data set number `index`.
    pub fn synthesize(&self, index: u64) -> WeightedSample {
        let mut rng = stream(self.opts.seed, index);
        let body_total = self.body_cum.last().copied().unwrap_or(0);
        let mut body_counts = vec![0u64; self.body_values.len()];
        let mut draw_body = |rng: &mut rng::StreamRng| {
            let r = rng::below(rng, body_total);
            body_counts[self.body_cum.partition_point(|&c| c <= r)] += 1;
        };
        let mut out = WeightedSample::default();
        match self.tail.discrete() {
            Some(table) => {
                let mut tail_counts = vec![0u64; table.table_len()];
                let mut overflow = Vec::new();
                for _ in 0..self.n {
                    if body_total == 0 || rng::uniform(&mut rng) < self.tail_prob {
                        let k = table.draw_offset(&mut rng);
                        match tail_counts.get_mut(k as usize) {
                            Some(c) => *c += 1,
                            None => overflow.push(k),
                        }
                    } else {
                        draw_body(&mut rng);
                    }
                }
                overflow.sort_unstable();
                for (v, &c) in self.body_values.iter().zip(&body_counts) {
                    out.push_sorted(*v as f64, c);
                }
                for (k, &c) in tail_counts.iter().enumerate() {
                    out.push_sorted((self.xmin + k as u64) as f64, c);
                }
                for k in overflow {
                    out.push_sorted(self.xmin.saturating_add(k) as f64, 1);
                }
            }
            None => {
                let mut tail = Vec::new();
                for _ in 0..self.n {
                    if body_total == 0 || rng::uniform(&mut rng) < self.tail_prob {
                        tail.push(self.tail.draw(&mut rng));
                    } else {
                        draw_body(&mut rng);
                    }
                }
                tail.sort_unstable_by(f64::total_cmp);
                for (v, &c) in self.body_values.iter().zip(&body_counts) {
                    out.push_sorted(*v as f64, c);
                }
                for x in tail {
                    out.push_sorted(x, 1);
                }
            }
        }
        out
    }

    /// KS distance of the refit on replicate `index`, or `None` if it cannot be refit.
    pub fn replicate(&self, index: u64) -> Option<f64> {
        let synthetic = self.synthesize(index);
        fit_sample(&synthetic, self.formalism, &self.opts.fit).ok().map(|f| f.ks)
    }

    /// Aggregates per-replicate outcomes, given in replicate order.
    pub fn finish(&self, outcomes: &[Option<f64>]) -> GofResult {
        let failed_refits = outcomes.iter().filter(|o| o.is_none()).count();
        let exceedances = outcomes.iter().flatten().filter(|&&ks| ks >= self.observed_ks).count();
        let valid = outcomes.len() - failed_refits;
        let n_sims = self.opts.n_sims;
        GofResult {
            p_value: if valid == 0 { f64::NAN } else { exceedances as f64 / valid as f64 },
            precision: 1.0 / (2.0 * libm::sqrt(n_sims as f64)),
            n_sims,
            seed: self.opts.seed,
            exceedances,
            imprecise: n_sims < PRECISE_SIMS,
            failed_refits,
        }
    }
}

/// Serial bootstrap p-value for `fit`.
pub fn gof_pvalue(d: &EmpiricalDistribution, fit: &FitResult, opts: &GofOptions) -> Result<GofResult> {
    let boot = Bootstrap::new(d, fit, opts)?;
    let outcomes: Vec<Option<f64>> = (0..opts.n_sims as u64).map(|i| boot.replicate(i)).collect();
    Ok(boot.finish(&outcomes))
}
