use alloc::vec::Vec;

use rand_core::RngCore;

use super::{Formalism, ModelParams, Shape, WeightedSample};
use crate::error::{Error, Result};
use crate::rng::{self, stream};

/// Table entries for a discrete power law; larger values use a rounded
/// continuous inversion.
const POWER_LAW_TABLE: usize = 1 << 16;
/// Hard cap on table length for light-tailed models.
const MAX_TABLE: usize = 1 << 22;
/// Light-tailed tables stop once the survival mass drops below this.
const NEGLIGIBLE_MASS: f64 = 1e-13;
const GUIDE_BUCKETS: usize = 4096;
const RESYNC: usize = 4096;

/// Inverse-CDF sampler for a discrete tail model.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    xmin: u64,
    /// `survival[i] = P(X >= xmin + i)`, nonincreasing, `survival[0] = 1`.
    survival: Vec<f64>,
    /// `guide[g]` = number of `i >= 1` with `survival[i] >= g / GUIDE_BUCKETS`.
    guide: Vec<u32>,
    /// Exponent of the continuous inversion beyond the table, if any.
    beyond_alpha: Option<f64>,
}

impl DiscreteSampler {
    pub fn new(model: &ModelParams) -> Result<Self> {
        if model.formalism() != Formalism::Discrete {
            return Err(Error::InvalidArgument("discrete sampler needs a discrete model".into()));
        }
        let xmin = model.xmin();
        let beyond_alpha = match *model.shape() {
            Shape::PowerLaw { alpha } | Shape::TruncatedPowerLaw { alpha, lambda: 0.0 } => Some(alpha),
            _ => None,
        };
        let cap = if beyond_alpha.is_some() { POWER_LAW_TABLE } else { MAX_TABLE };
        let mut survival = Vec::with_capacity(cap.min(1 << 16) + 1);
        let mut s = 1.0;
        survival.push(s);
        for i in 0..cap {
            let x = (xmin + i as u64) as f64;
            s = if (i + 1) % RESYNC == 0 {
                model.ccdf(x + 1.0)
            } else {
                (s - libm::exp(model.ln_pdf(x))).max(0.0)
            };
            survival.push(s);
            if beyond_alpha.is_none() && s < NEGLIGIBLE_MASS {
                break;
            }
        }
        let t = survival.len() - 1;
        let mut guide = Vec::with_capacity(GUIDE_BUCKETS + 1);
        for g in 0..=GUIDE_BUCKETS {
            let level = g as f64 / GUIDE_BUCKETS as f64;
            guide.push(survival[1..=t].partition_point(|&v| v >= level) as u32);
        }
        Ok(DiscreteSampler { xmin, survival, guide, beyond_alpha })
    }

    pub fn xmin(&self) -> u64 {
        self.xmin
    }

    /// Number of values resolved by the table; offsets below this are exact.
    pub fn table_len(&self) -> usize {
        self.survival.len() - 1
    }

    /// Offset from `xmin` of the value whose survival band contains `v` in `(0, 1]`.
    pub fn offset_for(&self, v: f64) -> u64 {
        let t = self.table_len();
        let s_end = self.survival[t];
        if v <= s_end {
            return match self.beyond_alpha {
                Some(alpha) if s_end > 0.0 => {
                    let top = (self.xmin as usize + t) as f64 - 0.5;
                    let x = libm::floor(top * libm::pow(v / s_end, -1.0 / (alpha - 1.0)) + 0.5);
                    let x = if x.is_finite() && x < u64::MAX as f64 { x as u64 } else { u64::MAX };
                    x.max(self.xmin + t as u64) - self.xmin
                }
                _ => t as u64,
            };
        }
        let g = libm::floor(v * GUIDE_BUCKETS as f64) as usize;
        let hi = self.guide[g.min(GUIDE_BUCKETS)] as usize;
        let lo = self.guide[(g + 1).min(GUIDE_BUCKETS)] as usize;
        (lo + self.survival[1 + lo..1 + hi].partition_point(|&s| s >= v)) as u64
    }

    #[inline]
    pub fn draw_offset<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        self.offset_for(rng::uniform_open0(rng))
    }

    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        self.xmin.saturating_add(self.draw_offset(rng))
    }
}

/// Power-law sampler in either formalism. Continuous draws use the exact
/// inversion `xmin (1 - u)^(-1 / (alpha - 1))`.
#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    alpha: f64,
    xmin: u64,
    table: Option<DiscreteSampler>,
}

impl PowerLawSampler {
    pub fn new(alpha: f64, xmin: u64, formalism: Formalism) -> Result<Self> {
        let model = ModelParams::power_law(alpha, xmin, formalism)?;
        let table = match formalism {
            Formalism::Discrete => Some(DiscreteSampler::new(&model)?),
            Formalism::Continuous => None,
        };
        Ok(PowerLawSampler { alpha, xmin, table })
    }

    /// Quantile function at `u` in `[0, 1)`.
    pub fn invert(&self, u: f64) -> f64 {
        match &self.table {
            Some(t) => (t.xmin() + t.offset_for(1.0 - u)) as f64,
            None => self.xmin as f64 * libm::pow(1.0 - u, -1.0 / (self.alpha - 1.0)),
        }
    }

    pub fn discrete(&self) -> Option<&DiscreteSampler> {
        self.table.as_ref()
    }

    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.invert(rng::uniform(rng))
    }
}

/// `n` power-law draws from the seeded stream 0 of `seed`.
pub fn sample_power_law(alpha: f64, xmin: u64, n: usize, formalism: Formalism, seed: u64) -> Result<WeightedSample> {
    let sampler = PowerLawSampler::new(alpha, xmin, formalism)?;
    let mut rng = stream(seed, 0);
    Ok(WeightedSample::from_values((0..n).map(|_| sampler.draw(&mut rng)).collect()))
}

/// `n` draws from any tail model. Discrete models use table inversion;
/// continuous models use closed-form inversion or rejection.
pub fn sample_model(model: &ModelParams, n: usize, seed: u64) -> Result<WeightedSample> {
    let mut rng = stream(seed, 0);
    let xmin = model.xmin() as f64;
    let raw: Vec<f64> = match model.formalism() {
        Formalism::Discrete => {
            let s = DiscreteSampler::new(model)?;
            (0..n).map(|_| s.draw(&mut rng) as f64).collect()
        }
        Formalism::Continuous => {
            if let Shape::TruncatedPowerLaw { alpha, .. } = *model.shape() {
                if alpha < 0.0 {
                    return Err(Error::InvalidArgument("no continuous sampler for a rising truncated power law".into()));
                }
            }
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                if let Some(x) = continuous_draw(model.shape(), xmin, &mut rng) {
                    out.push(x);
                }
            }
            out
        }
    };
    Ok(WeightedSample::from_values(raw))
}

/// One proposal; `None` when a rejection step refuses it.
fn continuous_draw<R: RngCore>(shape: &Shape, xmin: f64, rng: &mut R) -> Option<f64> {
    let v = rng::uniform_open0(rng);
    match *shape {
        Shape::PowerLaw { alpha } => Some(xmin * libm::pow(v, -1.0 / (alpha - 1.0))),
        Shape::Exponential { lambda } => Some(xmin - libm::log(v) / lambda),
        Shape::StretchedExponential { beta, lambda } => {
            Some(libm::pow(libm::pow(xmin, beta) - libm::log(v) / lambda, 1.0 / beta))
        }
        Shape::Lognormal { mu, sigma } => {
            let x = libm::exp(mu + sigma * rng::standard_normal(rng));
            (x >= xmin).then_some(x)
        }
        Shape::TruncatedPowerLaw { alpha, lambda } => {
            if alpha > 1.0 {
                // power-law proposal thinned by the exponential factor
                let x = xmin * libm::pow(v, -1.0 / (alpha - 1.0));
                (rng::uniform(rng) < libm::exp(-lambda * (x - xmin))).then_some(x)
            } else {
                // exponential proposal thinned by the power factor, nonincreasing for alpha >= 0
                let x = xmin - libm::log(v) / lambda;
                (rng::uniform(rng) < libm::pow(x / xmin, -alpha)).then_some(x)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuous_inversion_value() {
        let s = PowerLawSampler::new(2.0, 1, Formalism::Continuous).unwrap();
        assert!((s.invert(0.75) - 4.0).abs() < 1e-12);
        assert_eq!(s.invert(0.0), 1.0);
    }

    #[test]
    fn discrete_inversion_bands() {
        let s = PowerLawSampler::new(2.5, 5, Formalism::Discrete).unwrap();
        assert_eq!(s.invert(0.0), 5.0);
        let m = ModelParams::power_law(2.5, 5, Formalism::Discrete).unwrap();
        let p5 = m.ln_pdf(5.0).exp();
        assert_eq!(s.invert(p5 * 0.999), 5.0);
        assert_eq!(s.invert(p5 * 1.001), 6.0);
        // far beyond the table
        let x = s.invert(1.0 - 1e-15);
        assert!(x > 5.0 + POWER_LAW_TABLE as f64);
    }

    #[test]
    fn guided_search_matches_linear_scan() {
        let m = ModelParams::new(Shape::Lognormal { mu: 2.0, sigma: 1.0 }, 2, Formalism::Discrete).unwrap();
        let s = DiscreteSampler::new(&m).unwrap();
        let mut r = stream(5, 0);
        for _ in 0..2000 {
            let v = rng::uniform_open0(&mut r);
            let want = s.survival[1..].iter().take_while(|&&x| x >= v).count() as u64;
            assert_eq!(s.offset_for(v), want);
        }
    }

    #[test]
    fn continuous_samplers_stay_in_support() {
        let shapes = [
            Shape::Exponential { lambda: 0.5 },
            Shape::Lognormal { mu: 1.0, sigma: 1.0 },
            Shape::TruncatedPowerLaw { alpha: 2.0, lambda: 0.1 },
            Shape::TruncatedPowerLaw { alpha: 0.5, lambda: 0.1 },
            Shape::StretchedExponential { beta: 0.6, lambda: 0.4 },
        ];
        for shape in shapes {
            let m = ModelParams::new(shape, 3, Formalism::Continuous).unwrap();
            let s = sample_model(&m, 500, 1).unwrap();
            assert_eq!(s.total(), 500);
            assert!(s.values()[0] >= 3.0);
        }
    }
}
