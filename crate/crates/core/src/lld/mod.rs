//! Low-level descriptors and their utterance-level functionals.

pub mod extract;
pub mod flux;
pub mod formants;
pub mod pitch;
pub mod slope;
pub mod track;

pub use extract::{
    analyze_utterance, extract_utterance_features, FeatureConfig, FeatureFlag, FrameTracks,
    UtteranceAnalysis, UtteranceFeatureVector,
};
pub use flux::spectral_flux;
pub use formants::{estimate_formants, FormantConfig, FormantTracks};
pub use pitch::{estimate_f0, F0Range, PitchConfig};
pub use slope::{spectral_slope_band, Band};
pub use track::{functional_nz_amean, smooth_sma3, LldTrack, NzMean};
