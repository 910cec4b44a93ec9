//! Scheme configuration files and the shipped presets.
//!
//! ```toml
//! name = "warmth_combo"
//! dimension = "warmth"
//! features = ["f1_mean", "f2_mean", "spectral_flux"]
//! # weights = [0.2, 0.3, 0.5]   # equal when omitted
//! # normalize = true            # min-max scale each term over the corpus
//! boundaries = [690.5, 715.5]    # or: quantiles = [0.38, 0.72]
//! classes = ["less warmth/cold", "neutral", "highest warmth"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::UtteranceFeatureVector;
use crate::quantize::combination::{ConvexCombination, FeatureSource, TermRange};
use crate::quantize::feature::Feature;
use crate::quantize::scheme::{
    build_scheme_from_boundaries, build_scheme_from_quantiles, QuantizationScheme, NUM_CLASSES,
};
use crate::quantize::stats::{compute_corpus_stats, StatsOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<String>,
    pub features: Vec<Feature>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantiles: Option<[f64; 2]>,
    pub classes: [String; NUM_CLASSES],
}

impl SchemeConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let config: SchemeConfig = toml::from_str(text).map_err(|e| Error::SchemeConfig {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        config.check(origin)?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    fn check(&self, origin: &str) -> Result<()> {
        let fail = |message: String| {
            Err(Error::SchemeConfig {
                path: origin.to_string(),
                message,
            })
        };
        if self.name.trim().is_empty() {
            return fail("empty scheme name".into());
        }
        if self.features.is_empty() {
            return fail("no features".into());
        }
        match (&self.boundaries, &self.quantiles) {
            (Some(_), Some(_)) => return fail("give either boundaries or quantiles, not both".into()),
            (None, None) => return fail("missing boundaries or quantiles".into()),
            _ => {}
        }
        if let Some(w) = &self.weights {
            if w.len() != self.features.len() {
                return fail(format!("{} weights for {} features", w.len(), self.features.len()));
            }
        }
        if self.features.len() == 1 && (self.weights.is_some() || self.normalize) {
            return fail("weights and normalize apply only to combinations".into());
        }
        Ok(())
    }

    /// True if resolving needs corpus feature vectors.
    pub fn needs_corpus(&self) -> bool {
        self.normalize || self.quantiles.is_some()
    }

    /// Builds the scheme. Quantile cut points and normalized combinations
    /// draw on `corpus`.
    pub fn resolve(&self, corpus: Option<&[UtteranceFeatureVector]>) -> Result<QuantizationScheme> {
        let need_corpus = || {
            corpus.ok_or_else(|| Error::SchemeConfig {
                path: self.name.clone(),
                message: "quantile cut points and normalization need corpus features".into(),
            })
        };
        let source = if self.features.len() == 1 {
            FeatureSource::Single(self.features[0])
        } else {
            let mut combo = match &self.weights {
                Some(w) => ConvexCombination::new(self.features.iter().copied().zip(w.iter().copied()))?,
                None => ConvexCombination::equal(&self.features)?,
            };
            if self.normalize {
                let vectors = need_corpus()?;
                let ranges = self
                    .features
                    .iter()
                    .map(|&f| {
                        let s = compute_corpus_stats(vectors, &FeatureSource::Single(f), StatsOptions::default())?;
                        Ok(TermRange { min: s.min(), max: s.max() })
                    })
                    .collect::<Result<Vec<_>>>()?;
                combo = combo.with_min_max_normalization(ranges)?;
            }
            FeatureSource::Combination(combo)
        };

        match (self.boundaries, self.quantiles) {
            (Some([b1, b2]), _) => {
                build_scheme_from_boundaries(&self.name, source, b1, b2, self.classes.clone())
            }
            (None, Some([p1, p2])) => {
                let stats = compute_corpus_stats(need_corpus()?, &source, StatsOptions::default())?;
                build_scheme_from_quantiles(&self.name, source, &stats, p1, p2, self.classes.clone())
            }
            (None, None) => unreachable!("checked at parse time"),
        }
    }
}

/// Boundary presets taken from the published class ranges.
pub struct Preset {
    pub name: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "f1_mean", toml: include_str!("../../presets/f1_mean.toml") },
    Preset { name: "f2_mean", toml: include_str!("../../presets/f2_mean.toml") },
    Preset { name: "spectral_flux", toml: include_str!("../../presets/spectral_flux.toml") },
    Preset { name: "warmth_combo", toml: include_str!("../../presets/warmth_combo.toml") },
    Preset { name: "slope", toml: include_str!("../../presets/slope.toml") },
    Preset { name: "competence_combo", toml: include_str!("../../presets/competence_combo.toml") },
];

pub fn preset(name: &str) -> Result<SchemeConfig> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownScheme(name.to_string()))
        .and_then(|p| SchemeConfig::parse(p.toml, &format!("preset:{}", p.name)))
}

/// A preset name or a path to a scheme file.
pub fn load_scheme_config(spec: &str) -> Result<SchemeConfig> {
    if PRESETS.iter().any(|p| p.name == spec) {
        preset(spec)
    } else {
        SchemeConfig::load(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::scheme::ClassId;

    #[test]
    fn every_preset_resolves_without_corpus() {
        for p in PRESETS {
            let config = preset(p.name).unwrap();
            assert_eq!(config.name, p.name);
            config.resolve(None).unwrap();
        }
    }

    #[test]
    fn published_boundary_examples() {
        let f1 = preset("f1_mean").unwrap().resolve(None).unwrap();
        assert_eq!(f1.classify(450.0).unwrap(), ClassId::LOW);
        assert_eq!(f1.classify(530.0).unwrap(), ClassId::MID);
        assert_eq!(f1.classify(600.0).unwrap(), ClassId::HIGH);

        let f2 = preset("f2_mean").unwrap().resolve(None).unwrap();
        let ids: Vec<u8> = [1280.0, 1551.0, 1601.0].iter().map(|&v| f2.classify(v).unwrap().into()).collect();
        assert_eq!(ids, vec![0, 1, 2]);

        let flux = preset("spectral_flux").unwrap().resolve(None).unwrap();
        let ids: Vec<u8> = [0.29, 0.3, 0.45].iter().map(|&v| flux.classify(v).unwrap().into()).collect();
        assert_eq!(ids, vec![0, 1, 2]);
    }

    #[test]
    fn combination_presets_use_equal_weights() {
        let warm = preset("warmth_combo").unwrap().resolve(None).unwrap();
        assert_eq!(warm.source.features().len(), 3);
        assert!(warm.source.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-12));
        let comp = preset("competence_combo").unwrap().resolve(None).unwrap();
        assert_eq!(comp.source.weights(), vec![0.5, 0.5]);
    }

    #[test]
    fn config_errors() {
        let bad = [
            "name='x'\nfeatures=['f1_mean']\nclasses=['a','b','c']",
            "name='x'\nfeatures=['f1_mean']\nboundaries=[1.0,2.0]\nquantiles=[0.3,0.6]\nclasses=['a','b','c']",
            "name='x'\nfeatures=['mfcc']\nboundaries=[1.0,2.0]\nclasses=['a','b','c']",
            "name='x'\nfeatures=['f1_mean','f2_mean']\nweights=[1.0]\nboundaries=[1.0,2.0]\nclasses=['a','b','c']",
            "name='x'\nfeatures=['f1_mean']\nboundaries=[1.0,2.0]\nclasses=['a','b']",
        ];
        for text in bad {
            assert!(SchemeConfig::parse(text, "t").is_err(), "{text}");
        }
        let degenerate = SchemeConfig::parse(
            "name='x'\nfeatures=['f1_mean']\nboundaries=[2.0,2.0]\nclasses=['a','b','c']",
            "t",
        )
        .unwrap();
        assert!(degenerate.resolve(None).is_err());
        let quant = SchemeConfig::parse(
            "name='x'\nfeatures=['f1_mean']\nquantiles=[0.3,0.6]\nclasses=['a','b','c']",
            "t",
        )
        .unwrap();
        assert!(quant.needs_corpus());
        assert!(quant.resolve(None).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = preset("warmth_combo").unwrap();
        assert_eq!(SchemeConfig::parse(&c.to_toml().unwrap(), "rt").unwrap(), c);
    }
}
