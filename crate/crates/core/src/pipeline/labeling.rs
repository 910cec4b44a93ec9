//! Applies quantization schemes to extracted features and assigns the
//! train/test split.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::UtteranceFeatureVector;
use crate::pipeline::cache::UtteranceRecord;
use crate::quantize::{
    compute_corpus_stats, ClassId, Feature, FeatureSource, QuantizationScheme, StatsOptions,
    StatsSummary, NUM_CLASSES,
};
use crate::PIPELINE_VERSION;

pub const DEFAULT_SPLIT_SEED: u64 = 1234;
pub const DEFAULT_TEST_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelingConfig {
    pub seed: u64,
    pub test_fraction: f64,
    /// Leave out utterances whose voiced features are missing (all
    /// unvoiced, no formants). Off by default: such utterances are labeled
    /// and flagged.
    pub exclude_flagged: bool,
}

impl Default for LabelingConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SPLIT_SEED,
            test_fraction: DEFAULT_TEST_FRACTION,
            exclude_flagged: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledUtterance {
    pub utterance_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<String>,
    pub feature_values: BTreeMap<String, f64>,
    pub class_ids: BTreeMap<String, ClassId>,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub name: String,
    pub source: String,
    pub features: Vec<Feature>,
    pub weights: Vec<f64>,
    pub boundaries: [f64; 2],
    pub class_semantics: [String; NUM_CLASSES],
    pub counts: [usize; NUM_CLASSES],
    /// Range of the scheme's value over the labeled utterances.
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedUtterance {
    pub utterance_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingReport {
    pub pipeline_version: String,
    pub seed: u64,
    pub test_fraction: f64,
    pub total_utterances: usize,
    pub labeled: usize,
    pub flagged_labeled: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub skipped: Vec<SkippedUtterance>,
    pub schemes: Vec<SchemeReport>,
    /// Corpus statistics per feature, missing values excluded.
    pub features: Vec<StatsSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelingRun {
    pub utterances: Vec<LabeledUtterance>,
    pub schemes: Vec<QuantizationScheme>,
    pub report: LabelingReport,
}

impl LabelingRun {
    pub fn scheme(&self, name: &str) -> Result<&QuantizationScheme> {
        self.schemes
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownScheme(name.to_string()))
    }

    pub fn test_ids(&self) -> Vec<&str> {
        self.utterances
            .iter()
            .filter(|u| u.split == Split::Test)
            .map(|u| u.utterance_id.as_str())
            .collect()
    }

    pub fn report_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Labels every usable utterance under every scheme. Output is ordered by
/// utterance id regardless of input order.
pub fn run_labeling(
    records: &[UtteranceRecord],
    schemes: &[QuantizationScheme],
    config: &LabelingConfig,
) -> Result<LabelingRun> {
    if schemes.is_empty() {
        return Err(Error::Empty("no quantization schemes".into()));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = schemes.iter().find(|s| !seen.insert(s.name.as_str())) {
        return Err(Error::SchemeConfig {
            path: dup.name.clone(),
            message: "scheme name used twice".into(),
        });
    }

    let mut sorted: Vec<&UtteranceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.utterance_id.cmp(&b.utterance_id));

    let mut usable: Vec<(&UtteranceRecord, &UtteranceFeatureVector)> = Vec::new();
    let mut skipped = Vec::new();
    for record in sorted {
        match &record.features {
            None => skipped.push(SkippedUtterance {
                utterance_id: record.utterance_id.clone(),
                reason: record
                    .error
                    .clone()
                    .unwrap_or_else(|| "no features".into()),
            }),
            Some(f) if config.exclude_flagged && f.is_flagged() => {
                skipped.push(SkippedUtterance {
                    utterance_id: record.utterance_id.clone(),
                    reason: format!("flagged: {:?}", f.flags),
                })
            }
            Some(f) => usable.push((record, f)),
        }
    }
    if usable.is_empty() {
        return Err(Error::AllFlagged);
    }

    let test_ids = split_test_ids(
        usable.iter().map(|(r, _)| r.utterance_id.as_str()),
        config.seed,
        config.test_fraction,
    );

    let mut counts = vec![[0usize; NUM_CLASSES]; schemes.len()];
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); schemes.len()];
    let mut utterances = Vec::with_capacity(usable.len());
    for (record, features) in &usable {
        let mut feature_values: BTreeMap<String, f64> = Feature::ALL
            .iter()
            .map(|f| (f.name().to_string(), f.value(features)))
            .collect();
        let mut class_ids = BTreeMap::new();
        for (i, scheme) in schemes.iter().enumerate() {
            let (value, class) = scheme.classify_vector(features)?;
            if matches!(scheme.source, FeatureSource::Combination(_)) {
                feature_values.insert(scheme.name.clone(), value);
            }
            counts[i][class.index()] += 1;
            ranges[i].0 = ranges[i].0.min(value);
            ranges[i].1 = ranges[i].1.max(value);
            class_ids.insert(scheme.name.clone(), class);
        }
        let split = if test_ids.contains(record.utterance_id.as_str()) {
            Split::Test
        } else {
            Split::Train
        };
        utterances.push(LabeledUtterance {
            utterance_id: record.utterance_id.clone(),
            text: record.text.clone(),
            phonemes: record.phonemes.clone(),
            feature_values,
            class_ids,
            split,
            flags: features.flags.iter().map(|f| f.as_str().to_string()).collect(),
        });
    }

    let vectors: Vec<UtteranceFeatureVector> = usable.iter().map(|(_, f)| (*f).clone()).collect();
    let features = Feature::ALL
        .iter()
        .filter_map(|&f| {
            compute_corpus_stats(&vectors, &FeatureSource::Single(f), StatsOptions::default())
                .ok()
                .map(|s| s.summary())
        })
        .collect();

    let scheme_reports = schemes
        .iter()
        .zip(counts)
        .zip(ranges)
        .map(|((s, counts), (min, max))| SchemeReport {
            name: s.name.clone(),
            source: s.source.to_string(),
            features: s.source.features(),
            weights: s.source.weights(),
            boundaries: [s.boundaries.lower(), s.boundaries.upper()],
            class_semantics: s.class_semantics.clone(),
            counts,
            min,
            max,
        })
        .collect();

    let test_count = test_ids.len();
    let report = LabelingReport {
        pipeline_version: PIPELINE_VERSION.to_string(),
        seed: config.seed,
        test_fraction: config.test_fraction,
        total_utterances: records.len(),
        labeled: utterances.len(),
        flagged_labeled: usable.iter().filter(|(_, f)| f.is_flagged()).count(),
        train_count: utterances.len() - test_count,
        test_count,
        skipped,
        schemes: scheme_reports,
        features,
    };
    Ok(LabelingRun {
        utterances,
        schemes: schemes.to_vec(),
        report,
    })
}

/// Seeded shuffle of the ids; the first `round(n * fraction)` form the test set.
pub fn split_test_ids<'a>(
    ids: impl Iterator<Item = &'a str>,
    seed: u64,
    test_fraction: f64,
) -> std::collections::BTreeSet<&'a str> {
    let mut ids: Vec<&str> = ids.collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let n_test = (ids.len() as f64 * test_fraction.clamp(0.0, 1.0)).round() as usize;
    ids.into_iter().take(n_test).collect()
}
