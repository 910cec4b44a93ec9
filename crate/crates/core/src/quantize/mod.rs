//! Three-class quantization of utterance-level features and their convex
//! combinations.

pub mod combination;
pub mod config;
pub mod feature;
pub mod scheme;
pub mod stats;

pub use combination::{evaluate_combination, ConvexCombination, FeatureSource, Term, TermRange};
pub use config::{load_scheme_config, preset, SchemeConfig, PRESETS};
pub use feature::Feature;
pub use scheme::{
    build_scheme_from_boundaries, build_scheme_from_quantiles, classify, Boundaries, ClassId,
    QuantizationScheme, NUM_CLASSES,
};
pub use stats::{compute_corpus_stats, CorpusStats, StatsOptions, StatsSummary};
