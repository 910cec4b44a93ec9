//! Utterance-level feature extraction: per-frame descriptors, 3-frame
//! smoothing, then the non-zero mean functional.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::frames::FramePlan;
use crate::lld::flux::spectral_flux;
use crate::lld::formants::{estimate_formants, FormantConfig};
use crate::lld::pitch::{estimate_f0, PitchConfig};
use crate::lld::slope::{spectral_slope_band, Band};
use crate::lld::track::{functional_nz_amean, smooth_sma3, LldTrack};
use crate::spectrum::{default_fft_size, stft};

pub const SLOPE_LOW_BAND: Band = Band::new(0.0, 500.0);
pub const SLOPE_HIGH_BAND: Band = Band::new(500.0, 1500.0);

/// Shortest utterance accepted by [`extract_utterance_features`].
pub const MIN_UTTERANCE_S: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub spectral_plan: FramePlan,
    pub pitch_plan: FramePlan,
    /// `None` picks the next power of two above the spectral frame.
    pub fft_size: Option<usize>,
    pub pitch: PitchConfig,
    pub formants: FormantConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            spectral_plan: FramePlan::spectral(),
            pitch_plan: FramePlan::pitch(),
            fft_size: None,
            pitch: PitchConfig::default(),
            formants: FormantConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFlag {
    /// No voiced frame; voiced-only features are 0.
    AllUnvoiced,
    /// Voiced frames exist but no frame produced a formant.
    NoFormants,
    /// Spectral flux is zero everywhere.
    FluxAllZero,
    /// Some voiced frames were dropped for unstable LPC.
    UnstableLpc,
}

impl FeatureFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureFlag::AllUnvoiced => "all_unvoiced",
            FeatureFlag::NoFormants => "no_formants",
            FeatureFlag::FluxAllZero => "flux_all_zero",
            FeatureFlag::UnstableLpc => "unstable_lpc",
        }
    }
}

/// Utterance-level functionals (`*_sma3nz_amean` style).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceFeatureVector {
    pub utterance_id: String,
    pub f0_mean_hz: f64,
    pub f1_mean_hz: f64,
    pub f2_mean_hz: f64,
    pub spectral_flux_mean: f64,
    pub slope_v0_500: f64,
    pub slope_v500_1500: f64,
    pub voiced_frame_fraction: f64,
    pub unstable_lpc_frames: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<FeatureFlag>,
}

impl UtteranceFeatureVector {
    pub fn is_flagged(&self) -> bool {
        self.flags
            .iter()
            .any(|f| matches!(f, FeatureFlag::AllUnvoiced | FeatureFlag::NoFormants))
    }
}

/// Raw per-frame descriptors on the spectral frame grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTracks {
    pub f0: LldTrack,
    pub flux: LldTrack,
    pub f1: LldTrack,
    pub f2: LldTrack,
    pub slope_0_500: LldTrack,
    pub slope_500_1500: LldTrack,
}

impl FrameTracks {
    /// Debug dump on the spectral frame grid; F0 is sampled at the nearest
    /// pitch frame.
    pub fn write_debug_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let times = &self.flux.frame_times_s;
        let f0 = self.f0.values_at(times);
        let voiced = self.f0.voicing_at(times);
        let mut out = String::from("time_s,f0_hz,voiced,flux,f1_hz,f2_hz,slope_0_500,slope_500_1500\n");
        for t in 0..times.len() {
            out.push_str(&format!(
                "{:.4},{},{},{},{},{},{},{}\n",
                times[t],
                f0[t],
                u8::from(voiced[t]),
                self.flux.values[t],
                self.f1.values[t],
                self.f2.values[t],
                self.slope_0_500.values[t],
                self.slope_500_1500.values[t],
            ));
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceAnalysis {
    pub features: UtteranceFeatureVector,
    pub tracks: FrameTracks,
}

pub fn analyze_utterance(
    utterance_id: &str,
    audio: &AudioBuffer,
    config: &FeatureConfig,
) -> Result<UtteranceAnalysis> {
    if audio.duration_s() < MIN_UTTERANCE_S {
        return Err(Error::InvalidAudio(format!(
            "utterance is {:.3} s long; need at least {MIN_UTTERANCE_S} s",
            audio.duration_s()
        )));
    }
    let sr = audio.sample_rate_hz();
    let f0 = estimate_f0(audio, &config.pitch_plan, &config.pitch)?;

    let fft_size = config.fft_size.unwrap_or_else(|| {
        default_fft_size(config.spectral_plan.frame_length_samples(sr))
    });
    let spec = stft(audio, &config.spectral_plan, fft_size)?;
    let voiced = f0.voicing_at(spec.frame_times_s());

    let flux = spectral_flux(&spec);
    let formants = estimate_formants(audio, &config.spectral_plan, &f0, &config.formants)?;
    let slope_0_500 = spectral_slope_band(&spec, SLOPE_LOW_BAND, &voiced)?;
    let slope_500_1500 = spectral_slope_band(&spec, SLOPE_HIGH_BAND, &voiced)?;

    let functional = |track: &LldTrack| functional_nz_amean(&smooth_sma3(track));
    let f0_mean = functional(&f0);
    let f1_mean = functional(&formants.f1);
    let f2_mean = functional(&formants.f2);
    let flux_mean = functional(&flux);

    let voiced_count = f0.voiced.iter().filter(|&&v| v).count();
    let mut flags = Vec::new();
    if voiced_count == 0 {
        flags.push(FeatureFlag::AllUnvoiced);
    } else if f1_mean.all_zero {
        flags.push(FeatureFlag::NoFormants);
    }
    if flux_mean.all_zero {
        flags.push(FeatureFlag::FluxAllZero);
    }
    if formants.unstable_frames > 0 {
        flags.push(FeatureFlag::UnstableLpc);
    }

    let features = UtteranceFeatureVector {
        utterance_id: utterance_id.to_string(),
        f0_mean_hz: f0_mean.value,
        f1_mean_hz: f1_mean.value,
        f2_mean_hz: f2_mean.value,
        spectral_flux_mean: flux_mean.value,
        slope_v0_500: functional(&slope_0_500).value,
        slope_v500_1500: functional(&slope_500_1500).value,
        voiced_frame_fraction: voiced_count as f64 / f0.len() as f64,
        unstable_lpc_frames: formants.unstable_frames,
        flags,
    };
    Ok(UtteranceAnalysis {
        features,
        tracks: FrameTracks {
            f0,
            flux,
            f1: formants.f1,
            f2: formants.f2,
            slope_0_500,
            slope_500_1500,
        },
    })
}

pub fn extract_utterance_features(
    utterance_id: &str,
    audio: &AudioBuffer,
    config: &FeatureConfig,
) -> Result<UtteranceFeatureVector> {
    analyze_utterance(utterance_id, audio, config).map(|a| a.features)
}
