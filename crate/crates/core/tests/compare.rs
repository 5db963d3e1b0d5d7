//! Likelihood-ratio tests, support classification and the tournament.

use proptest::prelude::*;
use tailgraph_core::compare::{
    best_alternative_tournament, loglikelihood_ratio, plausibility_scan, plausibility_scan_reestimated, resolve_tournament, ComparisonResult, Support,
    TournamentOutcome, Verdict,
};
use tailgraph_core::rng::{stream, uniform_open0};
use tailgraph_core::tailfit::{
    fit_alternative, fit_power_law, fit_power_law_fixed_xmin, sample_model, sample_power_law, EmpiricalDistribution,
    FitOptions, Formalism, ModelKind, ModelParams, Shape,
};

fn result(a: ModelKind, b: ModelKind, r: f64, q: f64) -> ComparisonResult {
    ComparisonResult { model_a: a, model_b: b, r, raw: r, q, n: 1, verdict: Verdict::classify(r, q) }
}

proptest! {
    #[test]
    fn support_table_is_total(r in -100.0f64..100.0, q in 0.0f64..=1.0) {
        let expected = if q < 0.1 && r > 0.0 {
            Support::None
        } else if q < 0.1 && r < 0.0 {
            Support::Strong
        } else {
            Support::Undecidable
        };
        prop_assert_eq!(Support::classify(r, q), expected);
    }

    #[test]
    fn scaling_differences_keeps_the_sign(raw in -1e4f64..1e4, sigma in 1e-3f64..1e3, n in 1u64..100_000, c in 1e-3f64..1e3) {
        let base = ComparisonResult::from_statistics(ModelKind::PowerLaw, ModelKind::Lognormal, raw, sigma, n);
        let scaled = ComparisonResult::from_statistics(ModelKind::PowerLaw, ModelKind::Lognormal, raw * c, sigma * c, n);
        prop_assert_eq!(base.r.signum(), scaled.r.signum());
        prop_assert!(!matches!(
            (base.verdict, scaled.verdict),
            (Verdict::AFavored, Verdict::BFavored) | (Verdict::BFavored, Verdict::AFavored)
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ratio_is_antisymmetric(seed in any::<u64>(), alpha in 1.8f64..3.0, lambda in 0.01f64..1.0, discrete in any::<bool>()) {
        let formalism = if discrete { Formalism::Discrete } else { Formalism::Continuous };
        let d = sample_power_law(alpha, 2, 2000, Formalism::Discrete, seed).unwrap().to_distribution().unwrap();
        let a = ModelParams::power_law(alpha, 2, formalism).unwrap();
        let b = ModelParams::new(Shape::Exponential { lambda }, 2, formalism).unwrap();
        let ab = loglikelihood_ratio(&d, &a, &b, 2).unwrap();
        let ba = loglikelihood_ratio(&d, &b, &a, 2).unwrap();
        prop_assert_eq!(ab.r, -ba.r);
        prop_assert_eq!(ab.q, ba.q);
        prop_assert_eq!(ab.reversed(), ba);
    }
}

#[test]
fn identical_fits_are_undecidable() {
    let d = sample_power_law(2.5, 1, 1000, Formalism::Discrete, 0).unwrap().to_distribution().unwrap();
    let fit = fit_power_law(&d, Formalism::Discrete, &FitOptions::default()).unwrap();
    let c = loglikelihood_ratio(&d, &fit.model, &fit.model, fit.xmin).unwrap();
    assert_eq!((c.r, c.q, c.verdict), (0.0, 1.0, Verdict::Undecidable));
}

/// Geometric variates `1 + floor(E / lambda)` by inversion.
fn geometric(lambda: f64, n: usize, seed: u64) -> EmpiricalDistribution {
    let mut r = stream(seed, 3);
    EmpiricalDistribution::from_observations((0..n).map(|_| 1 + (-uniform_open0(&mut r).ln() / lambda) as u64))
}

#[test]
fn exponential_data_favours_the_exponential() {
    let d = geometric(0.5, 100_000, 1);
    let pl = fit_power_law_fixed_xmin(&d, 1, Formalism::Discrete).unwrap();
    let exp = fit_alternative(&d, ModelKind::Exponential, 1, Formalism::Discrete).unwrap();
    let c = loglikelihood_ratio(&d, &pl.model, &exp, 1).unwrap();
    assert!(c.r < 0.0 && c.q < 0.01, "{c:?}");
}

#[test]
fn reference_classifications() {
    assert_eq!(Support::classify(74.652_299, 0.0), Support::None);
    assert_eq!(Support::classify(-0.584_161, 0.512_644), Support::Undecidable);
    assert_eq!(Support::classify(-1.822_783_0, 0.067_575), Support::Strong);
    let pairwise = [result(ModelKind::Lognormal, ModelKind::TruncatedPowerLaw, 52_379.86, 0.0)];
    let outcome = resolve_tournament(&[ModelKind::Lognormal, ModelKind::TruncatedPowerLaw], &pairwise);
    assert!(matches!(outcome, TournamentOutcome::Winner { model: ModelKind::Lognormal, .. }));
    assert_eq!(resolve_tournament(&[], &[]), TournamentOutcome::NoCandidates);
    assert!(matches!(
        resolve_tournament(&[ModelKind::Lognormal], &[]),
        TournamentOutcome::Winner { model: ModelKind::Lognormal, .. }
    ));
}

#[test]
fn cycles_are_reported_unresolved() {
    use ModelKind::*;
    let pairwise = [
        result(Lognormal, Exponential, 3.0, 0.001),
        result(Exponential, StretchedExponential, 3.0, 0.001),
        result(StretchedExponential, Lognormal, 3.0, 0.001),
    ];
    let outcome = resolve_tournament(&[Lognormal, Exponential, StretchedExponential], &pairwise);
    assert!(matches!(outcome, TournamentOutcome::Unresolved { ref candidates, .. } if candidates.len() == 3));
}

#[test]
fn pure_power_law_gives_no_strong_alternative() {
    let d = sample_power_law(2.5, 1, 100_000, Formalism::Discrete, 21).unwrap().to_distribution().unwrap();
    for formalism in [Formalism::Discrete, Formalism::Continuous] {
        let fit = fit_power_law(&d, formalism, &FitOptions::default()).unwrap();
        for v in plausibility_scan(&d, &fit, &ModelKind::ALTERNATIVES) {
            assert_ne!(v.support, Some(Support::Strong), "{v:?}");
        }
    }
}

/// Each alternative is compared on the tail above the larger cutoff, with
/// both models refit there.
#[test]
fn reestimated_cutoffs_share_one_tail() {
    let d = sample_power_law(2.3, 3, 20_000, Formalism::Discrete, 4).unwrap().to_distribution().unwrap();
    for formalism in [Formalism::Discrete, Formalism::Continuous] {
        let fit = fit_power_law(&d, formalism, &FitOptions::default()).unwrap();
        for v in plausibility_scan_reestimated(&d, &fit, &ModelKind::ALTERNATIVES, &FitOptions::default()) {
            let (Some(m), Some(c)) = (v.params, v.comparison) else { continue };
            let cut = m.xmin();
            assert!(cut >= fit.xmin, "{v:?}");
            assert_eq!(c.n, d.tail_count(cut));
            let pl = fit_power_law_fixed_xmin(&d, cut, formalism).unwrap();
            let alt = fit_alternative(&d, v.alternative, cut, formalism).unwrap();
            let want = loglikelihood_ratio(&d, &pl.model, &alt, cut).unwrap();
            assert!((c.r - want.r).abs() <= 1e-9 * want.r.abs().max(1.0), "{c:?} vs {want:?}");
        }
    }
}

/// Data drawn from each model rarely crowns a different model.
#[test]
fn tournament_rarely_picks_a_wrong_model() {
    let truths = [
        ModelParams::power_law(2.5, 1, Formalism::Discrete).unwrap(),
        ModelParams::new(Shape::Exponential { lambda: 0.2 }, 1, Formalism::Discrete).unwrap(),
        ModelParams::new(Shape::Lognormal { mu: 2.0, sigma: 1.0 }, 1, Formalism::Discrete).unwrap(),
    ];
    for truth in truths {
        let mut wrong = 0;
        for seed in 0..100 {
            let d = sample_model(&truth, 100_000, seed).unwrap().to_distribution().unwrap();
            let fit = fit_power_law(&d, Formalism::Discrete, &FitOptions::default()).unwrap();
            let verdicts = plausibility_scan(&d, &fit, &ModelKind::ALTERNATIVES);
            if let TournamentOutcome::Winner { model, .. } = best_alternative_tournament(&d, &verdicts, fit.xmin).unwrap() {
                if model != truth.kind() {
                    wrong += 1;
                }
            }
        }
        assert!(wrong <= 10, "{:?}: {wrong} of 100 runs crowned another model", truth.kind());
    }
}
