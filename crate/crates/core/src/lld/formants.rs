//! LPC formant estimation: autocorrelation-method LPC solved by
//! Levinson-Durbin, roots of the prediction polynomial from the companion
//! matrix, and root-to-formant conversion with a bandwidth cap.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::Result;
use crate::frames::{frame_samples, FramePlan};
use crate::lld::track::LldTrack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FormantConfig {
    /// `None` means `2 + sample_rate / 1000`, rounded.
    pub lpc_order: Option<usize>,
    pub pre_emphasis: f64,
    pub bandwidth_cap_hz: f64,
    pub min_formant_hz: f64,
    /// Candidates must stay this far below Nyquist.
    pub nyquist_margin_hz: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            lpc_order: None,
            pre_emphasis: 0.97,
            bandwidth_cap_hz: 600.0,
            min_formant_hz: 90.0,
            nyquist_margin_hz: 50.0,
        }
    }
}

impl FormantConfig {
    pub fn order_for(&self, sample_rate_hz: u32) -> usize {
        self.lpc_order
            .unwrap_or_else(|| 2 + (sample_rate_hz as f64 / 1000.0).round() as usize)
    }
}

/// `A(z) = 1 + a[0] z^-1 + ... + a[p-1] z^-p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lpc {
    pub coefficients: Vec<f64>,
    pub prediction_error: f64,
}

/// Biased autocorrelation for lags `0..=max_lag`.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|lag| {
            frame
                .iter()
                .zip(frame.iter().skip(lag))
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Levinson-Durbin recursion. `None` when the prediction error stops being
/// positive, which also covers an all-zero frame.
pub fn levinson_durbin(r: &[f64], order: usize) -> Option<Lpc> {
    if r.len() <= order || r[0].is_nan() || r[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; order];
    let mut tmp = vec![0.0; order];
    let mut error = r[0];
    for i in 0..order {
        let acc = r[i + 1] + (0..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / error;
        tmp[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = tmp[j] + k * tmp[i - 1 - j];
        }
        a[i] = k;
        error *= 1.0 - k * k;
        if !error.is_finite() || error <= 0.0 {
            return None;
        }
    }
    Some(Lpc {
        coefficients: a,
        prediction_error: error,
    })
}

/// Complex roots `(re, im)` of `z^p + c[0] z^(p-1) + ... + c[p-1]`.
pub fn polynomial_roots(coefficients: &[f64]) -> Vec<(f64, f64)> {
    let p = coefficients.len();
    if p == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for (j, c) in coefficients.iter().enumerate() {
        companion[(0, j)] = -c;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}

/// Formant candidates in Hz (ascending) from LPC roots: upper half-plane
/// roots within the frequency limits whose -3 dB bandwidth is under the cap.
pub fn formant_candidates(lpc: &Lpc, sample_rate_hz: u32, config: &FormantConfig) -> Vec<f64> {
    let sr = sample_rate_hz as f64;
    let max_hz = sr / 2.0 - config.nyquist_margin_hz;
    let mut freqs: Vec<f64> = polynomial_roots(&lpc.coefficients)
        .into_iter()
        .filter(|&(_, im)| im > 0.0)
        .filter_map(|(re, im)| {
            let radius = re.hypot(im);
            let freq = im.atan2(re) * sr / (2.0 * PI);
            let bandwidth = -radius.ln() * sr / PI;
            (freq >= config.min_formant_hz
                && freq <= max_hz
                && bandwidth > 0.0
                && bandwidth <= config.bandwidth_cap_hz)
                .then_some(freq)
        })
        .collect();
    freqs.sort_by(f64::total_cmp);
    freqs
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormantTracks {
    pub f1: LldTrack,
    pub f2: LldTrack,
    /// Voiced frames dropped because LPC was unstable.
    pub unstable_frames: usize,
}

/// F1 and F2 per voiced frame; unvoiced frames and frames with too few
/// candidates hold 0. Voicing is taken from `f0_track` at the nearest frame
/// center.
pub fn estimate_formants(
    audio: &AudioBuffer,
    plan: &FramePlan,
    f0_track: &LldTrack,
    config: &FormantConfig,
) -> Result<FormantTracks> {
    let sr = audio.sample_rate_hz();
    let samples = audio.samples();
    let emphasized: Vec<f64> = std::iter::once(samples[0])
        .chain(
            samples
                .windows(2)
                .map(|w| w[1] - config.pre_emphasis * w[0]),
        )
        .collect();
    let frames = frame_samples(&emphasized, sr, plan)?;
    let voiced = f0_track.voicing_at(frames.times_s());
    let order = config.order_for(sr).min(frames.frame_length() - 1);

    let n = frames.len();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut formant_voiced = voiced.clone();
    let mut unstable_frames = 0;
    for (t, frame) in frames.iter().enumerate() {
        if !voiced[t] {
            continue;
        }
        let r = autocorrelation(frame, order);
        let Some(lpc) = levinson_durbin(&r, order) else {
            unstable_frames += 1;
            formant_voiced[t] = false;
            continue;
        };
        let candidates = formant_candidates(&lpc, sr, config);
        if let Some(&first) = candidates.first() {
            f1[t] = first;
        }
        if let Some(&second) = candidates.get(1) {
            f2[t] = second;
        }
    }

    let times = frames.times_s().to_vec();
    let make = |name: &str, values: Vec<f64>| LldTrack {
        name: name.into(),
        values,
        voiced: formant_voiced.clone(),
        frame_times_s: times.clone(),
        voiced_only: true,
    };
    Ok(FormantTracks {
        f1: make("F1frequency", f1),
        f2: make("F2frequency", f2),
        unstable_frames,
    })
}
