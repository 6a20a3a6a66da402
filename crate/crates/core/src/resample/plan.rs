use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::SvmSettings;
use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RandomUnder,
    RandomOver,
    Cnn,
    Enn,
    Renn,
    Oss,
    Ncr,
    NearMiss1,
    SmoteRegular,
    SmoteB1,
    SmoteB2,
    SmoteSvm,
    Adasyn,
    SmoteTomek,
    SmoteEnn,
}

impl Method {
    pub const ALL: [Method; 15] = [
        Method::RandomUnder,
        Method::RandomOver,
        Method::Cnn,
        Method::Enn,
        Method::Renn,
        Method::Oss,
        Method::Ncr,
        Method::NearMiss1,
        Method::SmoteRegular,
        Method::SmoteB1,
        Method::SmoteB2,
        Method::SmoteSvm,
        Method::Adasyn,
        Method::SmoteTomek,
        Method::SmoteEnn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::RandomUnder => "random_under",
            Method::RandomOver => "random_over",
            Method::Cnn => "cnn",
            Method::Enn => "enn",
            Method::Renn => "renn",
            Method::Oss => "oss",
            Method::Ncr => "ncr",
            Method::NearMiss1 => "near_miss1",
            Method::SmoteRegular => "smote_regular",
            Method::SmoteB1 => "smote_b1",
            Method::SmoteB2 => "smote_b2",
            Method::SmoteSvm => "smote_svm",
            Method::Adasyn => "adasyn",
            Method::SmoteTomek => "smote_tomek",
            Method::SmoteEnn => "smote_enn",
        }
    }

    /// Grows a minority group (including the hybrids, whose first stage does).
    pub fn is_oversampler(self) -> bool {
        matches!(
            self,
            Method::RandomOver
                | Method::SmoteRegular
                | Method::SmoteB1
                | Method::SmoteB2
                | Method::SmoteSvm
                | Method::Adasyn
                | Method::SmoteTomek
                | Method::SmoteEnn
        )
    }

    pub fn uses_ratio(self) -> bool {
        self.is_oversampler() || matches!(self, Method::RandomUnder | Method::NearMiss1)
    }

    pub fn default_k(self) -> usize {
        match self {
            Method::Enn | Method::Renn | Method::Ncr | Method::NearMiss1 => 3,
            _ => 5,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoteVariant {
    Regular,
    Borderline1,
    Borderline2,
    Svm,
}

/// How interpolation steps are drawn. `Fixed(u)` replaces every uniform draw
/// on `[0, 1)` with `u`, so a step range `[0, w)` yields `u * w`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    #[default]
    Uniform,
    Fixed(f64),
}

impl DeltaMode {
    pub(crate) fn draw(self, rng: &mut crate::rng::Rng) -> f64 {
        match self {
            DeltaMode::Uniform => rand::Rng::random::<f64>(rng),
            DeltaMode::Fixed(u) => u,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResamplePlan {
    pub method: Method,
    pub ratio: Option<f64>,
    pub k_neighbors: usize,
    pub seed: u64,
    pub delta: DeltaMode,
    pub svm: SvmSettings,
    pub round_synthetic: bool,
    /// Classes exempt from removal (ENN and RENN only).
    pub protect: Vec<Label>,
}

impl Default for ResamplePlan {
    fn default() -> Self {
        ResamplePlan::new(Method::SmoteRegular)
    }
}

impl ResamplePlan {
    pub fn new(method: Method) -> Self {
        ResamplePlan {
            method,
            ratio: None,
            k_neighbors: method.default_k(),
            seed: 0,
            delta: DeltaMode::Uniform,
            svm: SvmSettings::default(),
            round_synthetic: false,
            protect: Vec::new(),
        }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = Some(ratio);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_neighbors = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 {
            return Err(Error::InvalidArgument(
                "k_neighbors must be at least 1".into(),
            ));
        }
        if let Some(r) = self.ratio {
            if !self.method.uses_ratio() {
                return Err(Error::InvalidArgument(format!(
                    "{} does not take a ratio",
                    self.method
                )));
            }
            super::check_ratio(r)?;
        }
        if let DeltaMode::Fixed(u) = self.delta {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::InvalidArgument(format!(
                    "fixed delta {u} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn ratio_or_one(&self) -> f64 {
        self.ratio.unwrap_or(1.0)
    }

    pub fn oversample_options(&self) -> Result<OversampleOptions> {
        self.validate()?;
        Ok(OversampleOptions {
            ratio: self.ratio_or_one(),
            k: self.k_neighbors,
            seed: self.seed,
            delta: self.delta,
            svm: self.svm.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OversampleOptions {
    pub ratio: f64,
    pub k: usize,
    pub seed: u64,
    pub delta: DeltaMode,
    pub svm: SvmSettings,
}

impl OversampleOptions {
    pub fn new(ratio: f64, k: usize, seed: u64) -> Self {
        OversampleOptions {
            ratio,
            k,
            seed,
            delta: DeltaMode::Uniform,
            svm: SvmSettings::default(),
        }
    }

    pub fn with_delta(mut self, delta: DeltaMode) -> Self {
        self.delta = delta;
        self
    }
}
