use alloc::vec::Vec;
use core::fmt;

use super::{EmpiricalDistribution, Formalism, GofResult, ModelParams, WeightedSample};
use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::special::hurwitz_zeta;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// Smallest tail admitted while scanning for the lower cutoff. When no
    /// cutoff leaves this many observations, the scan falls back to tails of
    /// at least two observations.
    pub min_tail: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { min_tail: 50 }
    }
}

/// Power-law fit of a real-valued sample; the cutoff is one of the observed values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleFit {
    pub xmin: f64,
    pub alpha: f64,
    pub ks: f64,
    pub n_tail: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ModelParams,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub xmin: u64,
    pub ks: f64,
    pub n_tail: u64,
    pub n_total: u64,
    pub tail_fraction: f64,
    pub formalism: Formalism,
    /// Bootstrap goodness of fit, filled in by [`gof_pvalue`](super::gof_pvalue).
    pub gof: Option<GofResult>,
}

/// Decimal places so the last shown digit is the first significant digit of `err`.
pub(crate) fn decimals_for(err: f64) -> usize {
    if !(err > 0.0) || !err.is_finite() {
        return 3;
    }
    let d = -libm::floor(libm::log10(err));
    d.clamp(0.0, 15.0) as usize
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = decimals_for(self.alpha_stderr);
        write!(f, "x_min={}, α={:.*}±{:.*}", self.xmin, d, self.alpha, d, self.alpha_stderr)?;
        if let Some(g) = &self.gof {
            let pd = decimals_for(g.precision);
            write!(f, ", p={:.*}±{:.*}", pd, g.p_value, pd, g.precision)?;
        }
        Ok(())
    }
}

/// Fits a power law to `d`, choosing `xmin` among the observed values by
/// minimum KS distance.
pub fn fit_power_law(d: &EmpiricalDistribution, formalism: Formalism, opts: &FitOptions) -> Result<FitResult> {
    let sample = d.to_sample();
    let fit = fit_sample(&sample, formalism, opts)?;
    finish(d, fit.xmin as u64, fit.alpha, fit.ks, fit.n_tail, formalism)
}

/// Fits the exponent with the cutoff held at `xmin`.
pub fn fit_power_law_fixed_xmin(d: &EmpiricalDistribution, xmin: u64, formalism: Formalism) -> Result<FitResult> {
    if xmin == 0 {
        return Err(Error::InvalidArgument("xmin must be positive".into()));
    }
    let fit = fit_sample_fixed_xmin(&d.to_sample(), xmin as f64, formalism)?;
    finish(d, xmin, fit.alpha, fit.ks, fit.n_tail, formalism)
}

/// Exponent and KS distance for the observations `>= xmin` of a weighted sample.
pub fn fit_sample_fixed_xmin(sample: &WeightedSample, xmin: f64, formalism: Formalism) -> Result<SampleFit> {
    let start = sample.tail_start(xmin);
    let n: u64 = sample.counts[start..].iter().sum();
    if n == 0 {
        return Err(Error::EmptyTail { xmin: xmin as u64 });
    }
    if sample.distinct() - start < 2 && sample.values[start] == xmin {
        return Err(Error::InsufficientTail);
    }
    let ln_values: Vec<f64> = sample.values.iter().map(|&v| libm::log(v)).collect();
    let log_sum: f64 = ln_values[start..].iter().zip(&sample.counts[start..]).map(|(&l, &c)| c as f64 * l).sum();
    let alpha = estimate_alpha(formalism, xmin, n, log_sum);
    let ks = tail_ks(sample, &ln_values, start, xmin, alpha, n, formalism, f64::INFINITY);
    Ok(SampleFit { xmin, alpha, ks, n_tail: n })
}

fn finish(d: &EmpiricalDistribution, xmin: u64, alpha: f64, ks: f64, n_tail: u64, formalism: Formalism) -> Result<FitResult> {
    let model = ModelParams::power_law(alpha, xmin, formalism)?;
    Ok(FitResult {
        model,
        alpha,
        alpha_stderr: alpha_stderr(formalism, alpha, xmin as f64, n_tail),
        xmin,
        ks,
        n_tail,
        n_total: d.total(),
        tail_fraction: n_tail as f64 / d.total() as f64,
        formalism,
        gof: None,
    })
}

/// Cutoff scan on a weighted sample. Candidates are the distinct values
/// except the largest, in ascending order; ties in KS keep the smaller cutoff.
pub fn fit_sample(sample: &WeightedSample, formalism: Formalism, opts: &FitOptions) -> Result<SampleFit> {
    let m = sample.distinct();
    if m < 2 {
        return Err(Error::DegenerateInput);
    }
    let ln_values: Vec<f64> = sample.values.iter().map(|&v| libm::log(v)).collect();
    let mut tail_n = alloc::vec![0u64; m + 1];
    let mut tail_log = alloc::vec![0.0f64; m + 1];
    for i in (0..m).rev() {
        tail_n[i] = tail_n[i + 1] + sample.counts[i];
        tail_log[i] = tail_log[i + 1] + sample.counts[i] as f64 * ln_values[i];
    }
    // tail_n is decreasing, so the first candidate decides whether any qualifies
    let min_tail = if tail_n[0] >= opts.min_tail { opts.min_tail } else { 2 };

    let mut best: Option<SampleFit> = None;
    let mut best_ks = f64::INFINITY;
    for i in 0..m - 1 {
        let n = tail_n[i];
        if n < min_tail {
            break;
        }
        let xmin = sample.values[i];
        let alpha = estimate_alpha(formalism, xmin, n, tail_log[i]);
        if !(alpha > 1.0) || !alpha.is_finite() {
            continue;
        }
        let ks = tail_ks(sample, &ln_values, i, xmin, alpha, n, formalism, best_ks);
        if ks < best_ks {
            best_ks = ks;
            best = Some(SampleFit { xmin, alpha, ks, n_tail: n });
        }
    }
    best.ok_or(Error::InsufficientTail)
}

/// Maximum-likelihood exponent for a tail of `n` observations `>= xmin`
/// whose logs sum to `log_sum`.
fn estimate_alpha(formalism: Formalism, xmin: f64, n: u64, log_sum: f64) -> f64 {
    let n_f = n as f64;
    let mean_log = log_sum / n_f;
    match formalism {
        Formalism::Continuous => 1.0 + 1.0 / (mean_log - libm::log(xmin)),
        Formalism::Discrete => {
            // minimize ln zeta(a, xmin) + a * mean_log, convex in a
            let approx = 1.0 + 1.0 / (mean_log - libm::log(xmin - 0.5));
            let spread = (approx - 1.0).max(1e-3);
            let mut lo = (approx - 0.5 * spread).max(1.0 + 1e-9);
            let mut hi = approx + 0.5 * spread;
            let g = |a: f64| libm::log(hurwitz_zeta(a, xmin)) + a * mean_log;
            loop {
                let (a, _) = golden_section(g, lo, hi, 1e-7);
                let near_hi = hi - a < 1e-6;
                let near_lo = a - lo < 1e-6 && lo > 1.0 + 1e-9;
                if near_hi && hi < 200.0 {
                    lo = a - 1e-6;
                    hi = a + 2.0 * (hi - lo).max(spread);
                } else if near_lo {
                    hi = a + 1e-6;
                    lo = (1.0 + 1e-9f64).max(a - 2.0 * spread);
                } else {
                    return a;
                }
            }
        }
    }
}

fn alpha_stderr(formalism: Formalism, alpha: f64, xmin: f64, n: u64) -> f64 {
    let n_f = n as f64;
    match formalism {
        Formalism::Continuous => (alpha - 1.0) / libm::sqrt(n_f),
        Formalism::Discrete => {
            let h = 1e-4 * alpha.max(1.0);
            let lz = |a: f64| libm::log(hurwitz_zeta(a, xmin));
            let lo = (alpha - h).max(1.0 + 0.5 * (alpha - 1.0));
            let step = alpha - lo;
            let second = (lz(alpha + step) - 2.0 * lz(alpha) + lz(lo)) / (step * step);
            1.0 / libm::sqrt(n_f * second)
        }
    }
}

/// KS distance between the tail starting at index `start` and the fitted
/// power law. Returns early with a value `>= bound` once the running
/// maximum reaches `bound`.
#[allow(clippy::too_many_arguments)]
fn tail_ks(
    sample: &WeightedSample,
    ln_values: &[f64],
    start: usize,
    xmin: f64,
    alpha: f64,
    n: u64,
    formalism: Formalism,
    bound: f64,
) -> f64 {
    let n_f = n as f64;
    let mut cum = 0u64;
    let mut d_max = 0.0f64;
    match formalism {
        Formalism::Continuous => {
            let ln_xmin = libm::log(xmin);
            for i in start..sample.distinct() {
                let c = sample.counts[i];
                let below = cum as f64 / n_f;
                cum += c;
                let upper = cum as f64 / n_f;
                let model = -libm::expm1((1.0 - alpha) * (ln_values[i] - ln_xmin));
                d_max = d_max.max((upper - model).abs()).max((below - model).abs());
                if d_max >= bound {
                    return d_max;
                }
            }
        }
        Formalism::Discrete => {
            let z = hurwitz_zeta(alpha, xmin);
            // zeta(alpha, v) for the current value v, maintained incrementally
            let mut zeta_at = z;
            let mut at = xmin;
            for i in start..sample.distinct() {
                let v = sample.values[i];
                let gap = v - at;
                if gap > 0.0 {
                    if gap <= 8.0 {
                        let mut k = at;
                        while k < v {
                            zeta_at -= libm::pow(k, -alpha);
                            k += 1.0;
                        }
                    } else {
                        zeta_at = hurwitz_zeta(alpha, v);
                    }
                }
                let zeta_next = zeta_at - libm::exp(-alpha * ln_values[i]);
                let c = sample.counts[i];
                let below = cum as f64 / n_f;
                cum += c;
                let upper = cum as f64 / n_f;
                let model_prev = 1.0 - zeta_at / z;
                let model = 1.0 - zeta_next / z;
                d_max = d_max.max((upper - model).abs()).max((below - model_prev).abs());
                if d_max >= bound {
                    return d_max;
                }
                zeta_at = zeta_next;
                at = v + 1.0;
            }
        }
    }
    d_max
}

/// KS distance between the observations `>= model.xmin()` and any tail
/// model. The empirical CDF is right-continuous; both the value after and
/// the value before each step are compared (for discrete models the latter
/// against the model CDF one unit below).
pub fn ks_statistic(sample: &WeightedSample, model: &ModelParams) -> Result<f64> {
    let xmin = model.xmin() as f64;
    let start = sample.tail_start(xmin);
    let n: u64 = sample.counts[start..].iter().sum();
    if n == 0 {
        return Err(Error::EmptyTail { xmin: model.xmin() });
    }
    let n_f = n as f64;
    let mut cum = 0u64;
    let mut d_max = 0.0f64;
    for (&x, &c) in sample.values[start..].iter().zip(&sample.counts[start..]) {
        let below = cum as f64 / n_f;
        cum += c;
        let upper = cum as f64 / n_f;
        let model_at = model.cdf(x);
        let model_prev = match model.formalism() {
            Formalism::Discrete => model.cdf(x - 1.0),
            Formalism::Continuous => model_at,
        };
        d_max = d_max.max((upper - model_at).abs()).max((below - model_prev).abs());
    }
    Ok(d_max)
}

/// [`ks_statistic`] on an integer distribution.
pub fn ks_distance(d: &EmpiricalDistribution, model: &ModelParams) -> Result<f64> {
    ks_statistic(&d.to_sample(), model)
}
