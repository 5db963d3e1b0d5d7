use alloc::vec;
use alloc::vec::Vec;

use super::{fit_sample_fixed_xmin, ks_distance, EmpiricalDistribution, FitOptions, Formalism, ModelKind, ModelParams, Shape, WeightedSample};
use crate::error::{Error, Result};
use crate::optimize::{gradient_norm, nelder_mead, SimplexOptions};

/// Lower bound on the stretched-exponential shape (exclusive).
const BETA_MIN: f64 = 0.05;
const BETA_MAX: f64 = 3.0;
/// Cutoff candidates tried by [`select_xmin_for`].
const XMIN_CANDIDATES: usize = 64;

/// Summary statistics of the observations `>= xmin`.
struct Tail {
    sample: WeightedSample,
    n: f64,
    mean: f64,
    mean_ln: f64,
    sd_ln: f64,
}

impl Tail {
    fn new(full: &WeightedSample, xmin: u64) -> Result<Self> {
        let start = full.tail_start(xmin as f64);
        let mut sample = WeightedSample::default();
        for (&v, &c) in full.values[start..].iter().zip(&full.counts[start..]) {
            sample.push_sorted(v, c);
        }
        if sample.total == 0 {
            return Err(Error::EmptyTail { xmin });
        }
        if sample.distinct() < 2 {
            return Err(Error::InsufficientTail);
        }
        let n = sample.total as f64;
        let (mut sx, mut sl, mut sl2) = (0.0, 0.0, 0.0);
        for (&v, &c) in sample.values.iter().zip(&sample.counts) {
            let (c, l) = (c as f64, libm::log(v));
            sx += c * v;
            sl += c * l;
            sl2 += c * l * l;
        }
        let mean_ln = sl / n;
        let sd_ln = libm::sqrt((sl2 / n - mean_ln * mean_ln).max(1e-12));
        Ok(Tail { sample, n, mean: sx / n, mean_ln, sd_ln })
    }

    fn mean_pow(&self, beta: f64) -> f64 {
        let s: f64 = self.sample.values.iter().zip(&self.sample.counts).map(|(&v, &c)| c as f64 * libm::pow(v, beta)).sum();
        s / self.n
    }
}

/// Maps optimizer coordinates to a shape. Scale parameters are searched on a log scale.
fn decode(kind: ModelKind, p: &[f64]) -> Option<Shape> {
    match kind {
        ModelKind::Lognormal => Some(Shape::Lognormal { mu: p[0], sigma: libm::exp(p[1]) }),
        ModelKind::TruncatedPowerLaw => Some(Shape::TruncatedPowerLaw { alpha: p[0], lambda: libm::exp(p[1]) }),
        ModelKind::StretchedExponential => {
            (p[0] > BETA_MIN && p[0] <= BETA_MAX).then(|| Shape::StretchedExponential { beta: p[0], lambda: libm::exp(p[1]) })
        }
        _ => None,
    }
}

/// Maximum-likelihood fit of `kind` to the observations `>= xmin`.
///
/// Power law and exponential use closed forms (or a one-dimensional
/// search); the two-parameter models use Nelder-Mead from three spread
/// starting points followed by a polishing run.
pub fn fit_alternative(d: &EmpiricalDistribution, kind: ModelKind, xmin: u64, formalism: Formalism) -> Result<ModelParams> {
    fit_alternative_sample(&d.to_sample(), kind, xmin, formalism)
}

/// [`fit_alternative`] on a weighted, possibly real-valued, sample.
pub fn fit_alternative_sample(sample: &WeightedSample, kind: ModelKind, xmin: u64, formalism: Formalism) -> Result<ModelParams> {
    if xmin == 0 {
        return Err(Error::InvalidArgument("xmin must be positive".into()));
    }
    let tail = Tail::new(sample, xmin)?;
    let x0 = xmin as f64;
    match kind {
        ModelKind::PowerLaw => {
            let fit = fit_sample_fixed_xmin(sample, x0, formalism)?;
            ModelParams::power_law(fit.alpha, xmin, formalism)
        }
        ModelKind::Exponential => {
            let excess = tail.mean - x0;
            let lambda = match formalism {
                Formalism::Continuous => 1.0 / excess,
                Formalism::Discrete => libm::log1p(1.0 / excess),
            };
            ModelParams::new(Shape::Exponential { lambda }, xmin, formalism)
        }
        _ => fit_two_parameter(&tail, kind, xmin, formalism),
    }
}

fn fit_two_parameter(tail: &Tail, kind: ModelKind, xmin: u64, formalism: Formalism) -> Result<ModelParams> {
    let x0 = xmin as f64;
    let objective = |p: &[f64]| -> f64 {
        match decode(kind, p).map(|s| ModelParams::new(s, xmin, formalism)) {
            Some(Ok(m)) => -m.log_likelihood(&tail.sample) / tail.n,
            _ => f64::INFINITY,
        }
    };
    let starts: Vec<[f64; 2]> = match kind {
        ModelKind::Lognormal => {
            let (m, s) = (tail.mean_ln, tail.sd_ln);
            vec![[m, libm::log(s)], [libm::log(x0), libm::log(2.0 * s)], [m - 2.0 * s, libm::log(1.5 * s)]]
        }
        ModelKind::TruncatedPowerLaw => {
            let shift = if formalism == Formalism::Discrete { 0.5 } else { 0.0 };
            let alpha = 1.0 + 1.0 / (tail.mean_ln - libm::log(x0 - shift)).max(1e-3);
            let l = -libm::log(tail.mean);
            vec![[alpha, l - 3.0 * core::f64::consts::LN_10], [alpha - 0.5, l], [1.0, l - core::f64::consts::LN_10]]
        }
        ModelKind::StretchedExponential => [0.5, 1.0, 0.2]
            .iter()
            .map(|&b| [b, -libm::log(tail.mean_pow(b) - libm::pow(x0, b)).max(-700.0)])
            .collect(),
        _ => unreachable!("two-parameter models only"),
    };
    let opts = SimplexOptions::default();
    let mut best: Option<crate::optimize::Minimum> = None;
    for s in &starts {
        let step = [0.1 * s[0].abs().max(0.5), 0.5];
        let m = nelder_mead(objective, s, &step, opts);
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let rough = best.expect("at least one start");
    let polish = nelder_mead(objective, &rough.point, &[0.01 * rough.point[0].abs().max(0.1), 0.05], opts);
    let result = if polish.value <= rough.value { polish } else { rough };
    let shape = decode(kind, &result.point);
    let model = shape.map(|s| ModelParams::new(s, xmin, formalism));
    match model {
        Some(Ok(m)) if result.converged && result.value.is_finite() => Ok(m),
        _ => Err(Error::NonConvergence {
            kind,
            last: shape.map(|s| s.parameters().into_iter().map(|(_, v)| v).collect()).unwrap_or_else(|| result.point.clone()),
            gradient_norm: gradient_norm(objective, &result.point),
        }),
    }
}

/// Fits `kind` at a range of cutoffs and keeps the one with the smallest KS
/// distance. Candidates are up to 64 evenly spaced observed values leaving
/// at least `opts.min_tail` observations.
pub fn select_xmin_for(d: &EmpiricalDistribution, kind: ModelKind, formalism: Formalism, opts: &FitOptions) -> Result<ModelParams> {
    let values = d.values();
    if values.len() < 2 {
        return Err(Error::DegenerateInput);
    }
    let eligible: Vec<u64> = values[..values.len() - 1]
        .iter()
        .copied()
        .filter(|&v| d.tail_count(v) >= opts.min_tail.max(2))
        .collect();
    if eligible.is_empty() {
        return Err(Error::InsufficientTail);
    }
    let stride = eligible.len().div_ceil(XMIN_CANDIDATES);
    let mut best: Option<(f64, ModelParams)> = None;
    for &xmin in eligible.iter().step_by(stride) {
        let Ok(model) = fit_alternative(d, kind, xmin, formalism) else { continue };
        let Ok(ks) = ks_distance(d, &model) else { continue };
        if best.as_ref().is_none_or(|(b, _)| ks < *b) {
            best = Some((ks, model));
        }
    }
    best.map(|(_, m)| m).ok_or(Error::InsufficientTail)
}
