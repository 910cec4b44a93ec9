use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::UtteranceFeatureVector;
use crate::quantize::feature::Feature;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub feature: Feature,
    pub weight: f64,
}

/// Min-max range applied to a term before weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRange {
    pub min: f64,
    pub max: f64,
}

/// Non-negative weights summing to one over two or more distinct features.
/// Values are combined raw unless per-term min-max ranges are attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexCombination {
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalization: Option<Vec<TermRange>>,
}

impl ConvexCombination {
    pub fn new(terms: impl IntoIterator<Item = (Feature, f64)>) -> Result<Self> {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(feature, weight)| Term { feature, weight })
            .collect();
        if terms.len() < 2 {
            return Err(Error::InvalidCombination(format!(
                "need at least 2 terms, got {}",
                terms.len()
            )));
        }
        for (i, t) in terms.iter().enumerate() {
            if !(t.weight.is_finite() && t.weight >= 0.0) {
                return Err(Error::InvalidCombination(format!(
                    "weight of {} must be finite and non-negative, got {}",
                    t.feature, t.weight
                )));
            }
            if terms[..i].iter().any(|u| u.feature == t.feature) {
                return Err(Error::InvalidCombination(format!(
                    "{} appears twice",
                    t.feature
                )));
            }
        }
        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidCombination(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        let terms = terms
            .into_iter()
            .map(|t| Term {
                weight: t.weight / sum,
                ..t
            })
            .collect();
        Ok(Self {
            terms,
            normalization: None,
        })
    }

    pub fn equal(features: &[Feature]) -> Result<Self> {
        let w = 1.0 / features.len().max(1) as f64;
        let combo = Self::new(features.iter().map(|&f| (f, w)));
        // 1/n rounding can leave the sum a few ulps off; renormalize exactly.
        combo.map(|mut c| {
            let sum: f64 = c.terms.iter().map(|t| t.weight).sum();
            c.terms.iter_mut().for_each(|t| t.weight /= sum);
            c
        })
    }

    /// Rescales each term to `[0, 1]` over the given ranges before weighting.
    pub fn with_min_max_normalization(mut self, ranges: Vec<TermRange>) -> Result<Self> {
        if ranges.len() != self.terms.len() {
            return Err(Error::InvalidCombination(format!(
                "{} normalization ranges for {} terms",
                ranges.len(),
                self.terms.len()
            )));
        }
        if let Some(r) = ranges.iter().find(|r| r.max.is_nan() || r.min.is_nan() || r.max <= r.min) {
            return Err(Error::InvalidCombination(format!(
                "degenerate normalization range [{}, {}]",
                r.min, r.max
            )));
        }
        self.normalization = Some(ranges);
        Ok(self)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn normalization(&self) -> Option<&[TermRange]> {
        self.normalization.as_deref()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    pub fn evaluate(&self, vector: &UtteranceFeatureVector) -> f64 {
        self.evaluate_values(|f| f.value(vector))
    }

    fn evaluate_values(&self, value: impl Fn(Feature) -> f64) -> f64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let x = value(t.feature);
                let x = match &self.normalization {
                    Some(ranges) => (x - ranges[i].min) / (ranges[i].max - ranges[i].min),
                    None => x,
                };
                t.weight * x
            })
            .sum()
    }
}

/// `Σ w_i · x_i` over the combination's features.
pub fn evaluate_combination(vector: &UtteranceFeatureVector, comb: &ConvexCombination) -> f64 {
    comb.evaluate(vector)
}

/// What a quantization scheme classifies: one feature or a combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    Single(Feature),
    Combination(ConvexCombination),
}

impl FeatureSource {
    pub fn evaluate(&self, vector: &UtteranceFeatureVector) -> f64 {
        match self {
            FeatureSource::Single(f) => f.value(vector),
            FeatureSource::Combination(c) => c.evaluate(vector),
        }
    }

    pub fn features(&self) -> Vec<Feature> {
        match self {
            FeatureSource::Single(f) => vec![*f],
            FeatureSource::Combination(c) => c.terms.iter().map(|t| t.feature).collect(),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match self {
            FeatureSource::Single(_) => vec![1.0],
            FeatureSource::Combination(c) => c.weights(),
        }
    }

    /// True if any contributing feature is missing for this utterance.
    pub fn is_missing(&self, vector: &UtteranceFeatureVector) -> bool {
        self.features().iter().any(|f| f.is_missing(vector))
    }
}

impl fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSource::Single(feature) => write!(f, "{feature}"),
            FeatureSource::Combination(c) => {
                let parts: Vec<String> = c
                    .terms
                    .iter()
                    .map(|t| format!("{}*{}", t.weight, t.feature))
                    .collect();
                write!(f, "{}", parts.join(" + "))?;
                if c.normalization.is_some() {
                    write!(f, " (min-max normalized)")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn vector(f1: f64, f2: f64, flux: f64, slope: f64) -> UtteranceFeatureVector {
        UtteranceFeatureVector {
            utterance_id: "u".into(),
            f0_mean_hz: 200.0,
            f1_mean_hz: f1,
            f2_mean_hz: f2,
            spectral_flux_mean: flux,
            slope_v0_500: slope,
            slope_v500_1500: 0.0,
            voiced_frame_fraction: 1.0,
            unstable_lpc_frames: 0,
            flags: vec![],
        }
    }

    #[test]
    fn equal_weights_over_warmth_features() {
        let c = ConvexCombination::equal(&[Feature::F1Mean, Feature::F2Mean, Feature::SpectralFlux])
            .unwrap();
        let v = c.evaluate(&vector(600.0, 1500.0, 0.3, 0.0));
        assert!((v - 700.1).abs() < 1e-9);
        assert_eq!(c.weights().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn single_source_is_identity() {
        let v = vector(512.25, 1500.0, 0.3, 0.1);
        assert_eq!(FeatureSource::Single(Feature::F1Mean).evaluate(&v), 512.25);
    }

    #[test]
    fn rejects_bad_combinations() {
        assert!(ConvexCombination::new([(Feature::F1Mean, 1.0)]).is_err());
        assert!(ConvexCombination::new([(Feature::F1Mean, 0.5), (Feature::F2Mean, 0.6)]).is_err());
        assert!(ConvexCombination::new([(Feature::F1Mean, -0.5), (Feature::F2Mean, 1.5)]).is_err());
        assert!(ConvexCombination::new([(Feature::F1Mean, 0.5), (Feature::F1Mean, 0.5)]).is_err());
        assert!(ConvexCombination::new([(Feature::F1Mean, 0.3), (Feature::F2Mean, 0.7)]).is_ok());
    }

    #[test]
    fn normalized_variant() {
        let c = ConvexCombination::equal(&[Feature::F1Mean, Feature::F2Mean])
            .unwrap()
            .with_min_max_normalization(vec![
                TermRange { min: 400.0, max: 800.0 },
                TermRange { min: 1000.0, max: 2000.0 },
            ])
            .unwrap();
        let v = c.evaluate(&vector(600.0, 2000.0, 0.0, 0.0));
        assert!((v - 0.75).abs() < 1e-12);
    }
}
