use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::UtteranceFeatureVector;
use crate::quantize::combination::FeatureSource;

/// Empirical distribution of one feature (or combination) over a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub feature_name: String,
    sorted: Vec<f64>,
    /// Utterances left out because the feature was missing.
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsOptions {
    /// Leave out utterances whose contributing features are flagged missing.
    pub exclude_missing: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            exclude_missing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub feature: String,
    pub count: usize,
    pub excluded: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl CorpusStats {
    pub fn from_values(feature_name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let feature_name = feature_name.into();
        if values.is_empty() {
            return Err(Error::Empty(format!("no values for {feature_name}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(*v));
        }
        let mut sorted = values;
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            feature_name,
            sorted,
            excluded: 0,
        })
    }

    /// Combines two partial statistics of the same feature.
    pub fn merge(self, other: CorpusStats) -> CorpusStats {
        let mut sorted = Vec::with_capacity(self.sorted.len() + other.sorted.len());
        let (mut a, mut b) = (self.sorted.into_iter().peekable(), other.sorted.into_iter().peekable());
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            if x.total_cmp(y).is_le() {
                sorted.push(a.next().unwrap());
            } else {
                sorted.push(b.next().unwrap());
            }
        }
        sorted.extend(a);
        sorted.extend(b);
        CorpusStats {
            feature_name: self.feature_name,
            sorted,
            excluded: self.excluded + other.excluded,
        }
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    /// Linear interpolation between order statistics at position `p (n - 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let h = p * (self.sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        self.sorted[lo] + (h - lo as f64) * (self.sorted[hi] - self.sorted[lo])
    }

    pub fn summary(&self) -> StatsSummary {
        StatsSummary {
            feature: self.feature_name.clone(),
            count: self.count(),
            excluded: self.excluded,
            min: self.min(),
            max: self.max(),
            mean: self.mean(),
            q25: self.quantile(0.25),
            median: self.quantile(0.5),
            q75: self.quantile(0.75),
        }
    }
}

/// Exact empirical statistics of `source` over the corpus.
pub fn compute_corpus_stats(
    vectors: &[UtteranceFeatureVector],
    source: &FeatureSource,
    options: StatsOptions,
) -> Result<CorpusStats> {
    if vectors.is_empty() {
        return Err(Error::Empty("no feature vectors".into()));
    }
    let mut values = Vec::with_capacity(vectors.len());
    let mut excluded = 0;
    for v in vectors {
        if options.exclude_missing && source.is_missing(v) {
            excluded += 1;
        } else {
            values.push(source.evaluate(v));
        }
    }
    if values.is_empty() {
        return Err(Error::Empty(format!(
            "every utterance is missing {source}"
        )));
    }
    let mut stats = CorpusStats::from_values(source.to_string(), values)?;
    stats.excluded = excluded;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lld::FeatureFlag;
    use crate::quantize::feature::Feature;

    #[test]
    fn small_sample() {
        let s = CorpusStats::from_values("x", vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.min(), s.max(), s.quantile(0.5)), (1.0, 3.0, 2.0));
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn thirds_of_one_to_hundred() {
        let s = CorpusStats::from_values("x", (1..=100).map(f64::from).collect()).unwrap();
        assert!((s.quantile(1.0 / 3.0) - 34.0).abs() < 1e-9);
        assert!((s.quantile(2.0 / 3.0) - 67.0).abs() < 1e-9);
        assert_eq!(s.quantile(0.0), 1.0);
        assert_eq!(s.quantile(1.0), 100.0);
    }

    #[test]
    fn merge_equals_whole() {
        let a = CorpusStats::from_values("x", vec![5.0, 1.0, 9.0]).unwrap();
        let b = CorpusStats::from_values("x", vec![2.0, 7.0]).unwrap();
        let whole = CorpusStats::from_values("x", vec![5.0, 1.0, 9.0, 2.0, 7.0]).unwrap();
        assert_eq!(a.merge(b), whole);
    }

    #[test]
    fn empty_is_error() {
        assert!(compute_corpus_stats(&[], &FeatureSource::Single(Feature::F1Mean), StatsOptions::default()).is_err());
    }

    #[test]
    fn missing_values_excluded_by_default() {
        let mut silent = crate::quantize::combination::tests::vector(0.0, 0.0, 0.2, 0.0);
        silent.flags.push(FeatureFlag::AllUnvoiced);
        let voiced = crate::quantize::combination::tests::vector(500.0, 1500.0, 0.3, 0.1);
        let source = FeatureSource::Single(Feature::F1Mean);
        let vs = [silent, voiced];
        let s = compute_corpus_stats(&vs, &source, StatsOptions::default()).unwrap();
        assert_eq!((s.count(), s.excluded, s.min()), (1, 1, 500.0));
        let all = compute_corpus_stats(&vs, &source, StatsOptions { exclude_missing: false }).unwrap();
        assert_eq!((all.count(), all.min()), (2, 0.0));
        // Flux is measured on unvoiced audio too.
        let flux = compute_corpus_stats(&vs, &FeatureSource::Single(Feature::SpectralFlux), StatsOptions::default()).unwrap();
        assert_eq!(flux.count(), 2);
    }
}
