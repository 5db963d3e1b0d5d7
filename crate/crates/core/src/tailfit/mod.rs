//! Heavy-tail fitting: power-law maximum likelihood with KS-selected lower
//! cutoff, bootstrap goodness of fit, and alternative tail models.

mod alternatives;
mod bootstrap;
mod distribution;
mod model;
mod powerlaw;
mod sampling;

use core::fmt;

pub use alternatives::{fit_alternative, fit_alternative_sample, select_xmin_for};
pub use bootstrap::{gof_pvalue, Bootstrap, GofOptions, GofResult, MIN_SIMS, PRECISE_SIMS};
pub use distribution::{EmpiricalDistribution, WeightedSample};
pub use model::{ModelParams, Shape};
pub use powerlaw::{
    fit_power_law, fit_power_law_fixed_xmin, fit_sample, fit_sample_fixed_xmin, ks_distance, ks_statistic, FitOptions, FitResult,
    SampleFit,
};
pub use sampling::{sample_model, sample_power_law, DiscreteSampler, PowerLawSampler};

/// Whether observations are treated as integers or as reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formalism {
    Discrete,
    Continuous,
}

impl Formalism {
    pub fn as_str(self) -> &'static str {
        match self {
            Formalism::Discrete => "discrete",
            Formalism::Continuous => "continuous",
        }
    }
}

impl fmt::Display for Formalism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    PowerLaw,
    Exponential,
    Lognormal,
    TruncatedPowerLaw,
    StretchedExponential,
}

impl ModelKind {
    /// The non-power-law candidates, in reporting order.
    pub const ALTERNATIVES: [ModelKind; 4] = [
        ModelKind::Lognormal,
        ModelKind::Exponential,
        ModelKind::StretchedExponential,
        ModelKind::TruncatedPowerLaw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::PowerLaw => "power_law",
            ModelKind::Exponential => "exponential",
            ModelKind::Lognormal => "lognormal",
            ModelKind::TruncatedPowerLaw => "truncated_power_law",
            ModelKind::StretchedExponential => "stretched_exponential",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ModelKind::PowerLaw,
            ModelKind::Exponential,
            ModelKind::Lognormal,
            ModelKind::TruncatedPowerLaw,
            ModelKind::StretchedExponential,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
