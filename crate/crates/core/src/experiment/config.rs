use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adapt::{default_ratios, Scheme};
use crate::classify::SvmSettings;
use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::evaluate::FScore;
use crate::igselect::IgMode;
use crate::resample::Method;
use crate::synth::SyntheticProfile;
use crate::vectorize::Fraction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSource {
    /// A `label<TAB>text` file; relative paths resolve against the config file.
    Path(PathBuf),
    /// A named synthetic profile: `epicurious`, `planned_parenthood`, `scaled:<n>`.
    Profile(String),
    Synthetic(SyntheticProfile),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Holdout { train_fraction: Fraction },
    Kfold { k: usize },
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol::Holdout {
            train_fraction: Fraction::new(2, 3).unwrap(),
        }
    }
}

/// Data the information-gain ranking is computed on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionScope {
    /// The whole corpus, once.
    #[default]
    Full,
    /// Each training split separately.
    Train,
}

/// How the representative ratio of a sweep is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Fscore,
    Recall(Label),
}

impl Criterion {
    /// `fscore` or `recall<k>`, as used in output file names.
    pub fn slug(self) -> String {
        match self {
            Criterion::Fscore => "fscore".into(),
            Criterion::Recall(c) => format!("recall{c}"),
        }
    }
}

/// A resampling method or no resampling at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Sampler {
    None,
    Method(Method),
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sampler::None => f.write_str("none"),
            Sampler::Method(m) => m.fmt(f),
        }
    }
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            Ok(Sampler::None)
        } else {
            s.parse().map(Sampler::Method)
        }
    }
}

impl TryFrom<String> for Sampler {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Sampler> for String {
    fn from(s: Sampler) -> String {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub method: Sampler,
    /// Decomposition for oversamplers; ignored by the other methods.
    #[serde(default)]
    pub scheme: Scheme,
    /// Overrides the experiment's ratio grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Row name in the result tables.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl SamplerSpec {
    pub fn new(method: Sampler) -> Self {
        SamplerSpec {
            method,
            scheme: Scheme::OneVsAll,
            ratios: None,
            k: None,
            name: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn display_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        let m = match self.method {
            Sampler::None => return "No sampling".into(),
            Sampler::Method(m) => m,
        };
        let fixed = match m {
            Method::RandomUnder => "RandomUnderSampling",
            Method::Cnn => "CondensedNearestNeighbour",
            Method::Enn => "EditedNearestNeighbours",
            Method::Renn => "RepeatedEditedNN",
            Method::Oss => "OneSidedSelection",
            Method::Ncr => "NeighborhoodCleaningRule",
            Method::NearMiss1 => "NearMiss",
            Method::RandomOver => "RandomOversampling",
            _ => "",
        };
        if !fixed.is_empty() {
            return fixed.into();
        }
        let scheme = match self.scheme {
            Scheme::OneVsAll => "1vsall",
            Scheme::OneVsNeighbor => "1vsneighbor",
        };
        let stem = match m {
            Method::SmoteEnn => "smoteenn",
            Method::SmoteTomek => "SMOTETomek",
            other => other.name(),
        };
        format!("{stem}_{scheme}")
    }

    /// File-name key: the method name, plus the scheme for oversamplers.
    pub fn key(&self) -> String {
        match (&self.name, self.method) {
            (Some(n), _) => n
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() {
                        c.to_ascii_lowercase()
                    } else {
                        '_'
                    }
                })
                .collect(),
            (None, Sampler::None) => "no_sampling".to_string(),
            (None, Sampler::Method(m)) if m.is_oversampler() => {
                format!("{}_{}", m.name(), self.scheme.name())
            }
            (None, Sampler::Method(m)) => m.name().to_string(),
        }
    }

    pub fn swept(&self) -> bool {
        matches!(self.method, Sampler::Method(m) if m.uses_ratio())
    }
}

fn default_name() -> String {
    "experiment".into()
}

fn default_true() -> bool {
    true
}

fn default_remove_leq() -> u64 {
    4
}

fn default_ig_mode() -> IgMode {
    IgMode::Count
}

fn default_criteria() -> Vec<Criterion> {
    vec![Criterion::Fscore]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub corpus: CorpusSource,
    #[serde(default = "default_true")]
    pub preprocess: bool,
    /// N-grams with corpus frequency at or below this are dropped.
    #[serde(default = "default_remove_leq")]
    pub remove_leq: u64,
    #[serde(default = "default_ig_mode")]
    pub ig_mode: IgMode,
    /// Target number of features; `None` keeps the whole vocabulary.
    #[serde(default)]
    pub features: Option<usize>,
    #[serde(default)]
    pub selection_scope: SelectionScope,
    pub samplers: Vec<SamplerSpec>,
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub svm: SvmSettings,
    #[serde(default)]
    pub protocol: Protocol,
    #[serde(default = "default_criteria")]
    pub criteria: Vec<Criterion>,
    #[serde(default)]
    pub fscore: FScore,
    #[serde(default)]
    pub seed: u64,
    /// Write one predictions file per sweep point.
    #[serde(default = "default_true")]
    pub write_predictions: bool,
}

impl ExperimentConfig {
    pub fn new(corpus: CorpusSource, samplers: Vec<SamplerSpec>) -> Self {
        ExperimentConfig {
            name: default_name(),
            corpus,
            preprocess: true,
            remove_leq: default_remove_leq(),
            ig_mode: default_ig_mode(),
            features: None,
            selection_scope: SelectionScope::Full,
            samplers,
            ratios: default_ratios(),
            svm: SvmSettings::default(),
            protocol: Protocol::default(),
            criteria: default_criteria(),
            fscore: FScore::Macro,
            seed: 0,
            write_predictions: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a JSON config; a relative corpus path is taken relative to the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_text(path)?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let CorpusSource::Path(p) = &mut cfg.corpus {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.samplers.is_empty() {
            return bad("no samplers listed".into());
        }
        if self.ratios.is_empty() || self.ratios.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!(
                "ratios must be nonempty and within (0, 1], got {:?}",
                self.ratios
            ));
        }
        let mut keys = std::collections::HashSet::new();
        for s in &self.samplers {
            if let Some(r) = &s.ratios {
                if !s.swept() {
                    return bad(format!("{} does not take ratios", s.method));
                }
                if r.is_empty() || r.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
                    return bad(format!("bad ratios for {}: {r:?}", s.method));
                }
            }
            if s.k == Some(0) {
                return bad(format!("k must be positive for {}", s.method));
            }
            if !keys.insert(s.key()) {
                return bad(format!("duplicate sampler {}", s.key()));
            }
        }
        if let Protocol::Kfold { k } = self.protocol {
            if k < 2 {
                return bad(format!("k-fold needs k >= 2, got {k}"));
            }
        }
        if self.criteria.is_empty() {
            return bad("at least one selection criterion is required".into());
        }
        if self.features == Some(0) {
            return bad("features must be positive when given".into());
        }
        if !(self.svm.reg > 0.0) || self.svm.epochs == 0 {
            return bad("svm.reg must be positive and svm.epochs at least 1".into());
        }
        if let CorpusSource::Synthetic(p) = &self.corpus {
            p.validate()?;
        }
        if let CorpusSource::Profile(name) = &self.corpus {
            SyntheticProfile::named(name)?;
        }
        Ok(())
    }

    /// Checks criteria against the class count once it is known.
    pub(crate) fn validate_classes(&self, m: usize) -> Result<()> {
        for c in &self.criteria {
            if let Criterion::Recall(k) = *c {
                if k == 0 || k as usize > m {
                    return Err(Error::Config(format!(
                        "criterion recall{k} names no class among 1..={m}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_gets_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"corpus": {"profile": "planned_parenthood"}, "samplers": [{"method": "none"}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.ratios.len(), 10);
        assert_eq!(cfg.remove_leq, 4);
        assert_eq!(cfg.criteria, [Criterion::Fscore]);
        assert!(matches!(cfg.protocol, Protocol::Holdout { .. }));
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn rich_json() {
        let cfg = ExperimentConfig::from_json(
            r#"{
                "corpus": {"synthetic": {"class_counts": [20, 30], "separability": 0.5}},
                "samplers": [
                    {"method": "adasyn", "scheme": "one_vs_neighbor", "ratios": [0.5, 1.0]},
                    {"method": "enn", "k": 5}
                ],
                "protocol": {"kfold": {"k": 5}},
                "criteria": ["fscore", {"recall": 2}],
                "ig_mode": "presence",
                "features": 100
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.samplers[0].key(), "adasyn_one_vs_neighbor");
        assert_eq!(cfg.samplers[0].display_name(), "adasyn_1vsneighbor");
        assert_eq!(cfg.samplers[1].display_name(), "EditedNearestNeighbours");
        let named = |m: Method, s: Scheme| {
            SamplerSpec::new(Sampler::Method(m))
                .with_scheme(s)
                .display_name()
        };
        assert_eq!(named(Method::SmoteEnn, Scheme::OneVsAll), "smoteenn_1vsall");
        assert_eq!(
            named(Method::SmoteTomek, Scheme::OneVsNeighbor),
            "SMOTETomek_1vsneighbor"
        );
        assert_eq!(
            named(Method::RandomOver, Scheme::OneVsNeighbor),
            "RandomOversampling"
        );
        assert_eq!(cfg.criteria[1].slug(), "recall2");
        assert!(cfg.validate_classes(2).is_ok());
        assert!(cfg.validate_classes(1).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = |samplers: &str, extra: &str| {
            ExperimentConfig::from_json(&format!(
                r#"{{"corpus": {{"path": "x.tsv"}}, "samplers": {samplers}{extra}}}"#
            ))
        };
        assert!(base("[]", "").is_err());
        assert!(base(r#"[{"method": "bogus"}]"#, "").is_err());
        assert!(base(r#"[{"method": "cnn", "ratios": [0.5]}]"#, "").is_err());
        assert!(base(r#"[{"method": "none"}, {"method": "none"}]"#, "").is_err());
        assert!(base(r#"[{"method": "none"}]"#, r#", "ratios": [1.5]"#).is_err());
        assert!(base(
            r#"[{"method": "none"}]"#,
            r#", "protocol": {"kfold": {"k": 1}}"#
        )
        .is_err());
        assert!(base(r#"[{"method": "none"}]"#, r#", "unknown": 1"#).is_err());
        assert!(base(r#"[{"method": "none"}]"#, "").is_ok());
    }
}
