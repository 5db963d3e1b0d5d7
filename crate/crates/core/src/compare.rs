//! Normalized log-likelihood ratio tests between tail models, the
//! plausibility classification of alternatives against a power law, and the
//! pairwise tournament among strongly supported alternatives.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::special::two_sided_normal_tail;
use crate::tailfit::{
    fit_alternative, fit_power_law_fixed_xmin, select_xmin_for, EmpiricalDistribution, FitOptions, FitResult, ModelKind,
    ModelParams, WeightedSample,
};

/// Significance level below which the sign of `R` is trusted.
pub const SIGNIFICANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    AFavored,
    BFavored,
    Undecidable,
}

impl Verdict {
    /// `AFavored` iff `r > 0` and `q < 0.1`; `BFavored` iff `r < 0` and `q < 0.1`.
    pub fn classify(r: f64, q: f64) -> Self {
        if q < SIGNIFICANCE && r > 0.0 {
            Verdict::AFavored
        } else if q < SIGNIFICANCE && r < 0.0 {
            Verdict::BFavored
        } else {
            Verdict::Undecidable
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AFavored => "a_favored",
            Verdict::BFavored => "b_favored",
            Verdict::Undecidable => "undecidable",
        }
    }
}

/// Support for an alternative `f` given `R(power law / f)` and its `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Support {
    None,
    Undecidable,
    Strong,
}

impl Support {
    pub fn classify(r: f64, q: f64) -> Self {
        match Verdict::classify(r, q) {
            Verdict::AFavored => Support::None,
            Verdict::BFavored => Support::Strong,
            Verdict::Undecidable => Support::Undecidable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Support::None => "none",
            Support::Undecidable => "undecidable",
            Support::Strong => "strong",
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonResult {
    pub model_a: ModelKind,
    pub model_b: ModelKind,
    /// Normalized ratio `sum(l_i) / (sigma sqrt n)`.
    pub r: f64,
    /// Unnormalized `sum(l_i)`.
    pub raw: f64,
    pub q: f64,
    pub n: u64,
    pub verdict: Verdict,
}

impl ComparisonResult {
    /// Builds a result from the ratio statistics, applying the degenerate
    /// convention `sigma = 0 => R = 0, q = 1`.
    pub fn from_statistics(model_a: ModelKind, model_b: ModelKind, raw: f64, sigma: f64, n: u64) -> Self {
        let (r, q) = if sigma > 0.0 && n > 0 {
            let r = raw / (sigma * libm::sqrt(n as f64));
            (r, two_sided_normal_tail(r))
        } else {
            (0.0, 1.0)
        };
        ComparisonResult { model_a, model_b, r, raw, q, n, verdict: Verdict::classify(r, q) }
    }

    /// The same comparison seen from the other side.
    pub fn reversed(&self) -> Self {
        ComparisonResult {
            model_a: self.model_b,
            model_b: self.model_a,
            r: -self.r,
            raw: -self.raw,
            q: self.q,
            n: self.n,
            verdict: match self.verdict {
                Verdict::AFavored => Verdict::BFavored,
                Verdict::BFavored => Verdict::AFavored,
                Verdict::Undecidable => Verdict::Undecidable,
            },
        }
    }
}

/// Likelihood-ratio test of `a` against `b` on the observations `>= xmin`.
///
/// The spread of the per-observation differences uses the population
/// standard deviation (divisor `n`).
pub fn loglikelihood_ratio_sample(sample: &WeightedSample, a: &ModelParams, b: &ModelParams, xmin: u64) -> Result<ComparisonResult> {
    if xmin < a.xmin() || xmin < b.xmin() {
        return Err(Error::InvalidArgument(alloc::format!(
            "models are normalized above {} and {}, not on the tail from {xmin}",
            a.xmin(),
            b.xmin()
        )));
    }
    let start = sample.tail_start(xmin as f64);
    let values = &sample.values()[start..];
    let counts = &sample.counts()[start..];
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptyTail { xmin });
    }
    let diffs: Vec<f64> = values.iter().map(|&x| a.ln_pdf(x) - b.ln_pdf(x)).collect();
    let raw: f64 = diffs.iter().zip(counts).map(|(&l, &c)| c as f64 * l).sum();
    let mean = raw / n as f64;
    let var = diffs.iter().zip(counts).map(|(&l, &c)| c as f64 * (l - mean) * (l - mean)).sum::<f64>() / n as f64;
    Ok(ComparisonResult::from_statistics(a.kind(), b.kind(), raw, libm::sqrt(var), n))
}

pub fn loglikelihood_ratio(d: &EmpiricalDistribution, a: &ModelParams, b: &ModelParams, xmin: u64) -> Result<ComparisonResult> {
    loglikelihood_ratio_sample(&d.to_sample(), a, b, xmin)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlausibilityVerdict {
    pub alternative: ModelKind,
    /// The fitted alternative, when its fit succeeded.
    pub params: Option<ModelParams>,
    /// Power law (a) against the alternative (b).
    pub comparison: Option<ComparisonResult>,
    /// `None` when the fit failed; see `error`.
    pub support: Option<Support>,
    pub error: Option<Error>,
}

/// Fits each alternative on the power-law tail and classifies it.
/// Fit failures are recorded on the affected entry only.
pub fn plausibility_scan(d: &EmpiricalDistribution, pl_fit: &FitResult, alternatives: &[ModelKind]) -> Vec<PlausibilityVerdict> {
    let sample = d.to_sample();
    alternatives
        .iter()
        .map(|&alternative| {
            let outcome = fit_alternative(d, alternative, pl_fit.xmin, pl_fit.formalism)
                .and_then(|m| loglikelihood_ratio_sample(&sample, &pl_fit.model, &m, pl_fit.xmin).map(|c| (m, c)));
            match outcome {
                Ok((m, c)) => PlausibilityVerdict {
                    alternative,
                    params: Some(m),
                    comparison: Some(c),
                    support: Some(Support::classify(c.r, c.q)),
                    error: None,
                },
                Err(e) => PlausibilityVerdict { alternative, params: None, comparison: None, support: None, error: Some(e) },
            }
        })
        .collect()
}

/// Like [`plausibility_scan`], but each alternative picks its own cutoff by
/// KS distance. The pair is then compared on the tail above the larger of the
/// two cutoffs, with both models refit there so each is normalized on it.
pub fn plausibility_scan_reestimated(
    d: &EmpiricalDistribution,
    pl_fit: &FitResult,
    alternatives: &[ModelKind],
    opts: &FitOptions,
) -> Vec<PlausibilityVerdict> {
    let sample = d.to_sample();
    let formalism = pl_fit.formalism;
    alternatives
        .iter()
        .map(|&alternative| {
            let outcome = select_xmin_for(d, alternative, formalism, opts).and_then(|own| {
                let cut = own.xmin().max(pl_fit.xmin);
                let pl = if cut == pl_fit.xmin { pl_fit.model } else { fit_power_law_fixed_xmin(d, cut, formalism)?.model };
                let alt = if cut == own.xmin() { own } else { fit_alternative(d, alternative, cut, formalism)? };
                loglikelihood_ratio_sample(&sample, &pl, &alt, cut).map(|c| (alt, c))
            });
            match outcome {
                Ok((m, c)) => PlausibilityVerdict {
                    alternative,
                    params: Some(m),
                    comparison: Some(c),
                    support: Some(Support::classify(c.r, c.q)),
                    error: None,
                },
                Err(e) => PlausibilityVerdict { alternative, params: None, comparison: None, support: None, error: Some(e) },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum TournamentOutcome {
    NoCandidates,
    Winner { model: ModelKind, pairwise: Vec<ComparisonResult> },
    Unresolved { candidates: Vec<ModelKind>, pairwise: Vec<ComparisonResult> },
}

/// Picks the candidate favored against every other candidate. `pairwise`
/// may list each unordered pair in either orientation.
pub fn resolve_tournament(candidates: &[ModelKind], pairwise: &[ComparisonResult]) -> TournamentOutcome {
    match candidates {
        [] => return TournamentOutcome::NoCandidates,
        [only] => return TournamentOutcome::Winner { model: *only, pairwise: pairwise.to_vec() },
        _ => {}
    }
    let beats = |a: ModelKind, b: ModelKind| {
        pairwise.iter().any(|c| {
            (c.model_a == a && c.model_b == b && c.verdict == Verdict::AFavored)
                || (c.model_a == b && c.model_b == a && c.verdict == Verdict::BFavored)
        })
    };
    let winners: Vec<ModelKind> = candidates
        .iter()
        .copied()
        .filter(|&a| candidates.iter().all(|&b| a == b || beats(a, b)))
        .collect();
    match winners.as_slice() {
        [w] => TournamentOutcome::Winner { model: *w, pairwise: pairwise.to_vec() },
        _ => TournamentOutcome::Unresolved { candidates: candidates.to_vec(), pairwise: pairwise.to_vec() },
    }
}

/// Runs the pairwise comparisons among the alternatives with strong support
/// and resolves them. Candidates fitted at another cutoff are refit at
/// `xmin` so every pair shares one normalized tail.
pub fn best_alternative_tournament(d: &EmpiricalDistribution, verdicts: &[PlausibilityVerdict], xmin: u64) -> Result<TournamentOutcome> {
    let strong: Vec<(ModelKind, ModelParams)> = verdicts
        .iter()
        .filter(|v| v.support == Some(Support::Strong))
        .filter_map(|v| v.params.map(|p| (v.alternative, p)))
        .map(|(k, p)| if p.xmin() == xmin { Ok((k, p)) } else { fit_alternative(d, k, xmin, p.formalism()).map(|m| (k, m)) })
        .collect::<Result<_>>()?;
    let sample = d.to_sample();
    let mut pairwise = Vec::new();
    for i in 0..strong.len() {
        for j in i + 1..strong.len() {
            pairwise.push(loglikelihood_ratio_sample(&sample, &strong[i].1, &strong[j].1, xmin)?);
        }
    }
    let kinds: Vec<ModelKind> = strong.iter().map(|s| s.0).collect();
    Ok(resolve_tournament(&kinds, &pairwise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tailfit::{Formalism, Shape};

    #[test]
    fn identical_models_are_undecidable() {
        let d = EmpiricalDistribution::from_observations([3, 4, 4, 9, 20]);
        let m = ModelParams::power_law(2.0, 3, Formalism::Discrete).unwrap();
        let c = loglikelihood_ratio(&d, &m, &m, 3).unwrap();
        assert_eq!((c.r, c.q, c.verdict), (0.0, 1.0, Verdict::Undecidable));
    }

    #[test]
    fn reference_q_values_follow_the_normal_tail() {
        for (r, q) in [(1.829_324, 0.067_351), (-1.548_861, 0.121_415), (1.558_554, 0.119_102), (0.597_332, 0.550_286)] {
            assert!((two_sided_normal_tail(r) - q).abs() < 5e-7, "{r}");
        }
    }

    #[test]
    fn support_table() {
        assert_eq!(Support::classify(74.652_299, 0.0), Support::None);
        assert_eq!(Support::classify(-1.822_783_0, 0.067_575), Support::Strong);
        assert_eq!(Support::classify(-0.584_161, 0.512_644), Support::Undecidable);
        assert_eq!(Support::classify(0.0, 0.0), Support::Undecidable);
        assert_eq!(Support::classify(3.0, 0.1), Support::Undecidable);
    }

    #[test]
    fn reversal_is_exact() {
        let d = EmpiricalDistribution::from_observations([2, 2, 3, 5, 8, 13, 21, 40]);
        let a = ModelParams::power_law(1.9, 2, Formalism::Discrete).unwrap();
        let b = ModelParams::new(Shape::Exponential { lambda: 0.2 }, 2, Formalism::Discrete).unwrap();
        let ab = loglikelihood_ratio(&d, &a, &b, 2).unwrap();
        let ba = loglikelihood_ratio(&d, &b, &a, 2).unwrap();
        assert_eq!(ab.reversed(), ba);
    }

    #[test]
    fn tournament_cases() {
        use ModelKind::*;
        assert_eq!(resolve_tournament(&[], &[]), TournamentOutcome::NoCandidates);
        assert!(matches!(resolve_tournament(&[Lognormal], &[]), TournamentOutcome::Winner { model: Lognormal, .. }));
        let c = ComparisonResult::from_statistics(Lognormal, TruncatedPowerLaw, 52_379.86, 1.0, 1);
        assert!(matches!(
            resolve_tournament(&[Lognormal, TruncatedPowerLaw], &[c]),
            TournamentOutcome::Winner { model: Lognormal, .. }
        ));
        assert!(matches!(
            resolve_tournament(&[TruncatedPowerLaw, Lognormal], &[c.reversed()]),
            TournamentOutcome::Winner { model: Lognormal, .. }
        ));
        // a cycle stays unresolved
        let x = ComparisonResult::from_statistics(Lognormal, Exponential, 10.0, 1.0, 1);
        let y = ComparisonResult::from_statistics(Exponential, StretchedExponential, 10.0, 1.0, 1);
        let z = ComparisonResult::from_statistics(StretchedExponential, Lognormal, 10.0, 1.0, 1);
        assert!(matches!(
            resolve_tournament(&[Lognormal, Exponential, StretchedExponential], &[x, y, z]),
            TournamentOutcome::Unresolved { .. }
        ));
    }
}
