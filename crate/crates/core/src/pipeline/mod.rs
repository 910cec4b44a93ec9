//! Batch corpus pipeline: load metadata, extract features into a cache,
//! label utterances under quantization schemes, and write manifests,
//! reports and F0 contours.

pub mod cache;
pub mod contours;
pub mod corpus;
pub mod extract;
pub mod labeling;
pub mod manifest;

pub use cache::{FeatureCache, UtteranceRecord};
pub use contours::{export_f0_contours, f0_contour, ContourExport, ContourSource};
pub use corpus::{load_corpus, Corpus, CorpusManifestEntry};
pub use extract::{extract_corpus, ExtractOptions, ExtractionSummary};
pub use labeling::{
    run_labeling, split_test_ids, LabeledUtterance, LabelingConfig, LabelingReport, LabelingRun,
    SchemeReport, SkippedUtterance, Split, DEFAULT_SPLIT_SEED, DEFAULT_TEST_FRACTION,
};
pub use manifest::{export_manifest, parse_manifest, Manifest, ManifestFormat, ManifestHeader, ManifestRow};
