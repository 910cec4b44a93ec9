//! Autocorrelation F0 tracker.
//!
//! Each frame's autocorrelation is divided by the autocorrelation of the
//! analysis window, which removes the taper bias that otherwise drags the
//! period peak toward shorter lags. A small octave cost breaks near-ties
//! between the period and its multiples in favour of the shorter lag.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::frames::{frame_signal, FramePlan};
use crate::lld::track::LldTrack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Range {
    pub min_hz: f64,
    pub max_hz: f64,
}

impl Default for F0Range {
    /// Female speaking range.
    fn default() -> Self {
        Self {
            min_hz: 100.0,
            max_hz: 400.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PitchConfig {
    pub range: F0Range,
    /// Minimum normalized autocorrelation peak for a voiced decision.
    pub voicing_threshold: f64,
    /// Frames whose RMS falls below this are unvoiced without further analysis.
    pub silence_rms: f64,
    pub octave_cost: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            range: F0Range::default(),
            voicing_threshold: 0.30,
            silence_rms: 3e-4,
            octave_cost: 0.05,
        }
    }
}

struct Autocorrelator {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    size: usize,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Autocorrelator {
    fn new(frame_length: usize) -> Self {
        let size = (2 * frame_length).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        let ifft = planner.plan_fft_inverse(size);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Self {
            fft,
            ifft,
            size,
            buffer: vec![Complex::default(); size],
            scratch: vec![Complex::default(); scratch_len],
        }
    }

    /// Biased autocorrelation for lags `0..=max_lag`.
    fn compute(&mut self, frame: &[f64], max_lag: usize) -> Vec<f64> {
        self.buffer.fill(Complex::default());
        for (b, &s) in self.buffer.iter_mut().zip(frame) {
            b.re = s;
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        for b in self.buffer.iter_mut() {
            *b = Complex::new(b.norm_sqr(), 0.0);
        }
        self.ifft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        let scale = 1.0 / self.size as f64;
        self.buffer[..=max_lag].iter().map(|c| c.re * scale).collect()
    }
}

/// Per-frame F0 in Hz; 0 on unvoiced frames. Silence is all-unvoiced, not an error.
pub fn estimate_f0(audio: &AudioBuffer, plan: &FramePlan, config: &PitchConfig) -> Result<LldTrack> {
    let sr = audio.sample_rate_hz() as f64;
    let F0Range { min_hz, max_hz } = config.range;
    if !(min_hz > 0.0 && min_hz < max_hz && max_hz < sr / 2.0) {
        return Err(Error::InvalidBand {
            lo_hz: min_hz,
            hi_hz: max_hz,
            reason: format!("F0 range must lie within (0, {})", sr / 2.0),
        });
    }

    let frames = frame_signal(audio, plan)?;
    let frame_length = frames.frame_length();
    let min_lag = ((sr / max_hz).floor() as usize).max(2);
    let max_lag = ((sr / min_hz).ceil() as usize).min(frame_length / 2);
    if max_lag <= min_lag + 1 {
        return Err(Error::InvalidFramePlan(format!(
            "{} ms frames are too short for a {min_hz} Hz pitch floor",
            plan.frame_length_ms
        )));
    }

    let mut acf = Autocorrelator::new(frame_length);
    let window = plan.window.coefficients(frame_length);
    let window_acf = acf.compute(&window, max_lag + 1);
    let window_norm: Vec<f64> = window_acf.iter().map(|r| r / window_acf[0]).collect();
    let window_energy = window.iter().map(|w| w * w).sum::<f64>();

    let mut values = Vec::with_capacity(frames.len());
    let mut voiced = Vec::with_capacity(frames.len());
    for frame in frames.iter() {
        let f0 = frame_f0(
            frame,
            &mut acf,
            &window_norm,
            window_energy,
            min_lag,
            max_lag,
            sr,
            config,
        );
        voiced.push(f0 > 0.0);
        values.push(f0);
    }

    let track = LldTrack {
        name: "F0".into(),
        values,
        voiced,
        frame_times_s: frames.times_s().to_vec(),
        voiced_only: true,
    };
    track.check();
    Ok(track)
}

#[allow(clippy::too_many_arguments)]
fn frame_f0(
    frame: &[f64],
    acf: &mut Autocorrelator,
    window_norm: &[f64],
    window_energy: f64,
    min_lag: usize,
    max_lag: usize,
    sr: f64,
    config: &PitchConfig,
) -> f64 {
    let energy: f64 = frame.iter().map(|s| s * s).sum();
    // RMS of the unwindowed signal, estimated through the window energy.
    if (energy / window_energy).sqrt() < config.silence_rms {
        return 0.0;
    }
    let r = acf.compute(frame, max_lag + 1);
    if r[0] <= 0.0 {
        return 0.0;
    }
    let norm = |lag: usize| (r[lag] / r[0]) / window_norm[lag];

    // Candidates are local maxima refined by parabolic interpolation, so a
    // period falling between integer lags is not undersold against its
    // integer-aligned multiples.
    let mut best: Option<(f64, f64, f64)> = None;
    for lag in min_lag..=max_lag {
        let (a, b, c) = (norm(lag - 1), norm(lag), norm(lag + 1));
        if b < a || b < c {
            continue;
        }
        let denom = a - 2.0 * b + c;
        let (offset, height) = if denom < -f64::EPSILON {
            let offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
            (offset, b - 0.25 * (a - c) * offset)
        } else {
            (0.0, b)
        };
        let refined = lag as f64 + offset;
        let score = height - config.octave_cost * (refined / min_lag as f64).log2();
        if best.is_none_or(|(_, _, s)| score > s) {
            best = Some((refined, height, score));
        }
    }
    let Some((period, strength, _)) = best else {
        return 0.0;
    };
    if strength < config.voicing_threshold {
        return 0.0;
    }
    let f0 = sr / period;
    if f0 < config.range.min_hz * 0.95 || f0 > config.range.max_hz * 1.05 {
        return 0.0;
    }
    f0
}
