//! Attribution methods evaluated against the analytic oracle.
//!
//! Feature methods return one magnitude per input feature and are turned
//! into selections by a relative threshold `mu`. Subset methods return a
//! [`ThresholdPath`]: an ordered list of candidate subsets with scores, from
//! which a threshold `eta` picks the first candidate that clears it. Keeping
//! the path rather than a single answer lets thresholds be swept without
//! recomputing anything.

mod gradient;
mod lime;
mod shapley;
mod subsets;

pub use gradient::{gradient_family, GradientVariant};
pub use lime::{lime, LimeMode};
pub use shapley::{shap_baseline, shapley_expectation, shapley_values, ShapleyMode};
pub use subsets::{archipelago_groups, archipelago_style, attr_gakm, interpretable_nn_measure, interpretable_nn_score};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oracle::MixtureOracle;
use crate::seed::{derive_seed_path, label_hash, rng_from_seed};
use crate::subset::FeatureSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MethodId {
    LimeCat,
    LimeCont,
    Gam,
    ShapleyE,
    ShapFe,
    Grad,
    GradInput,
    Integrated,
    Expected,
    Ga2m,
    Ga3m,
    Ga4m,
    GaInf,
    InterpretableNn,
    Archipelago,
}

/// Which threshold turns a method's output into a selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdKind {
    /// Relative cut `mu * max` on feature magnitudes.
    Mu,
    /// Absolute cut on subset scores in `[1/2, 1]`.
    Eta,
    /// Absolute cut on subset scores in `[0, 1]`.
    Unit,
}

impl ThresholdKind {
    /// Grid searched when tuning, in ascending order.
    pub fn grid(self) -> Vec<f64> {
        let (lo, steps) = match self {
            Self::Mu => (10, 85),
            Self::Eta => (50, 50),
            Self::Unit => (0, 100),
        };
        (0..=steps).map(|k| f64::from(lo + k) / 100.0).collect()
    }

    pub fn contains(self, t: f64) -> bool {
        match self {
            Self::Mu => t > 0.0 && t <= 1.0,
            Self::Eta => (0.5..=1.0).contains(&t),
            Self::Unit => (0.0..=1.0).contains(&t),
        }
    }
}

impl MethodId {
    pub const ALL: [MethodId; 15] = [
        Self::LimeCat,
        Self::LimeCont,
        Self::Gam,
        Self::ShapleyE,
        Self::ShapFe,
        Self::Grad,
        Self::GradInput,
        Self::Integrated,
        Self::Expected,
        Self::Ga2m,
        Self::Ga3m,
        Self::Ga4m,
        Self::GaInf,
        Self::InterpretableNn,
        Self::Archipelago,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LimeCat => "lime_cat",
            Self::LimeCont => "lime_cont",
            Self::Gam => "gam",
            Self::ShapleyE => "shapley_e",
            Self::ShapFe => "shap_fe",
            Self::Grad => "grad",
            Self::GradInput => "grad_input",
            Self::Integrated => "integrated",
            Self::Expected => "expected",
            Self::Ga2m => "ga2m",
            Self::Ga3m => "ga3m",
            Self::Ga4m => "ga4m",
            Self::GaInf => "gainf",
            Self::InterpretableNn => "interpretable_nn",
            Self::Archipelago => "archipelago",
        }
    }

    pub fn threshold_kind(self) -> ThresholdKind {
        match self {
            Self::Ga2m | Self::Ga3m | Self::Ga4m | Self::GaInf | Self::Archipelago => ThresholdKind::Eta,
            Self::InterpretableNn => ThresholdKind::Unit,
            _ => ThresholdKind::Mu,
        }
    }

    pub fn is_feature_method(self) -> bool {
        self.threshold_kind() == ThresholdKind::Mu
    }

    /// Interaction order cap of the additive-model family.
    fn order(self, n: usize) -> usize {
        match self {
            Self::Ga2m => 2,
            Self::Ga3m => 3,
            Self::Ga4m => 4,
            _ => n,
        }
        .min(n)
    }

    pub fn valid_ids() -> String {
        Self::ALL.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown method {s:?}; valid ids: {}", Self::valid_ids())))
    }
}

impl From<MethodId> for String {
    fn from(m: MethodId) -> String {
        m.as_str().to_string()
    }
}

impl TryFrom<String> for MethodId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Numeric knobs shared by all methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub shapley_max_samples: usize,
    pub lime_samples: usize,
    pub lime_ridge: f64,
    pub ig_steps: usize,
    pub eg_samples: usize,
    pub archipelago_margin: f64,
    pub seed: u64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            shapley_max_samples: 128,
            lime_samples: 1000,
            lime_ridge: 1.0,
            ig_steps: 50,
            eg_samples: 500,
            archipelago_margin: 0.0,
            seed: 0,
        }
    }
}

impl MethodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shapley_max_samples == 0 || self.ig_steps == 0 || self.eg_samples == 0 || self.lime_samples < 2 {
            return Err(invalid("sample counts must be >= 1 (LIME needs >= 2)"));
        }
        if self.lime_ridge.is_nan() || self.lime_ridge <= 0.0 {
            return Err(invalid("ridge strength must be positive"));
        }
        Ok(())
    }
}

/// Scored candidate subsets, in the order a threshold scans them.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPath {
    pub steps: Vec<(FeatureSet, f64)>,
    /// Returned when no step clears the threshold.
    pub fallback: FeatureSet,
}

impl ThresholdPath {
    pub fn select(&self, threshold: f64) -> FeatureSet {
        self.steps.iter().find(|(_, s)| *s >= threshold).map_or(self.fallback, |(set, _)| *set)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MethodOutput {
    Features(Vec<f64>),
    Path(ThresholdPath),
}

impl MethodOutput {
    pub fn select(&self, threshold: f64) -> FeatureSet {
        match self {
            Self::Features(v) => select_from_features(v, threshold),
            Self::Path(p) => p.select(threshold),
        }
    }

    /// Single most responsible feature, for the singleton-prior score.
    pub fn top_feature(&self) -> Option<usize> {
        match self {
            Self::Features(v) => argmax(v),
            Self::Path(_) => None,
        }
    }
}

/// First index of the largest value.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// `{ i | values_i >= mu * max }`; all-zero input selects every feature.
pub fn select_from_features(values: &[f64], mu: f64) -> FeatureSet {
    let n = values.len();
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return FeatureSet::full(n);
    }
    let cut = mu * max;
    FeatureSet::from_indices(n, (0..n).filter(|&i| values[i] >= cut)).expect("indices below n")
}

/// Runs `method` on point `x`. `point_key` identifies the point inside the
/// benchmark so that every stochastic method gets its own reproducible
/// stream.
pub fn run_method(
    method: MethodId,
    oracle: &MixtureOracle,
    x: &[f64],
    cell_width: f64,
    config: &MethodConfig,
    point_key: &[u64],
) -> MethodOutput {
    let n = oracle.dim();
    let mut path = vec![label_hash(method.as_str())];
    path.extend_from_slice(point_key);
    let mut rng = rng_from_seed(derive_seed_path(config.seed, &path));
    match method {
        MethodId::Gam => MethodOutput::Features(subsets::gam_values(oracle, x)),
        MethodId::ShapleyE => MethodOutput::Features(
            shapley_expectation(oracle, x, config.shapley_max_samples, &mut rng).iter().map(|v| v.abs()).collect(),
        ),
        MethodId::ShapFe => MethodOutput::Features(
            shap_baseline(oracle, x, config.shapley_max_samples, &mut rng).iter().map(|v| v.abs()).collect(),
        ),
        MethodId::Grad => MethodOutput::Features(gradient_family(oracle, x, GradientVariant::Grad, config, &mut rng)),
        MethodId::GradInput => {
            MethodOutput::Features(gradient_family(oracle, x, GradientVariant::GradInput, config, &mut rng))
        }
        MethodId::Integrated => {
            MethodOutput::Features(gradient_family(oracle, x, GradientVariant::Integrated, config, &mut rng))
        }
        MethodId::Expected => {
            MethodOutput::Features(gradient_family(oracle, x, GradientVariant::Expected, config, &mut rng))
        }
        MethodId::LimeCat => MethodOutput::Features(lime(
            oracle,
            x,
            LimeMode::Categorical { cell_width },
            config.lime_samples,
            config.lime_ridge,
            &mut rng,
        )),
        MethodId::LimeCont => MethodOutput::Features(lime(
            oracle,
            x,
            LimeMode::Continuous,
            config.lime_samples,
            config.lime_ridge,
            &mut rng,
        )),
        MethodId::Ga2m | MethodId::Ga3m | MethodId::Ga4m | MethodId::GaInf => {
            MethodOutput::Path(attr_gakm(oracle, x, method.order(n)))
        }
        MethodId::InterpretableNn => MethodOutput::Path(interpretable_nn_measure(oracle, x, n)),
        MethodId::Archipelago => MethodOutput::Path(archipelago_style(oracle, x, config.archipelago_margin)),
    }
}
