//! Acoustic feature extraction, 3-class feature quantization and MOS
//! aggregation for building trait-conditioned TTS training corpora.
//!
//! The pipeline extracts F1/F2 means, spectral flux and voiced spectral
//! slopes per utterance, quantizes each feature (or a convex combination of
//! features) into three classes, and writes class-labeled manifests that a
//! conditioned TTS trainer consumes.

pub mod audio;
pub mod error;
pub mod frames;
pub mod lld;
pub mod mos;
pub mod pipeline;
pub mod quantize;
pub mod spectrum;
pub mod synth;

pub use audio::{load_wav, write_wav, AudioBuffer};
pub use error::{Error, Result};
pub use frames::{frame_signal, FramePlan, Frames, Window};
pub use spectrum::{default_fft_size, stft, Spectrogram};

/// Recorded in manifests and feature caches.
pub const PIPELINE_VERSION: &str = concat!("voicetraits/", env!("CARGO_PKG_VERSION"));
