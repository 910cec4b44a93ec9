//! Framing and analysis windows.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hann,
    Hamming,
    /// Gaussian with sigma = 0.4 of the half-length.
    Gaussian,
}

impl Window {
    /// Symmetric window of `len` points.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len <= 1 {
            return vec![1.0; len];
        }
        let m = (len - 1) as f64;
        (0..len)
            .map(|n| {
                let n = n as f64;
                match self {
                    Window::Rectangular => 1.0,
                    Window::Hann => 0.5 - 0.5 * (2.0 * PI * n / m).cos(),
                    Window::Hamming => 0.54 - 0.46 * (2.0 * PI * n / m).cos(),
                    Window::Gaussian => {
                        let x = (n - m / 2.0) / (0.4 * m / 2.0);
                        (-0.5 * x * x).exp()
                    }
                }
            })
            .collect()
    }
}

/// Frame length, hop and window of a short-time analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePlan {
    pub frame_length_ms: f64,
    pub hop_ms: f64,
    pub window: Window,
}

impl FramePlan {
    pub fn new(frame_length_ms: f64, hop_ms: f64, window: Window) -> Result<Self> {
        let plan = Self {
            frame_length_ms,
            hop_ms,
            window,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// 25 ms Hann frames every 10 ms, used for the spectral descriptors.
    pub fn spectral() -> Self {
        Self {
            frame_length_ms: 25.0,
            hop_ms: 10.0,
            window: Window::Hann,
        }
    }

    /// 40 ms Hann frames every 10 ms, used for F0.
    pub fn pitch() -> Self {
        Self {
            frame_length_ms: 40.0,
            hop_ms: 10.0,
            window: Window::Hann,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frame_length_ms.is_finite() && self.frame_length_ms > 0.0) {
            return Err(Error::InvalidFramePlan(
                "frame length must be positive".into(),
            ));
        }
        if !(self.hop_ms.is_finite() && self.hop_ms > 0.0) {
            return Err(Error::InvalidFramePlan("hop must be positive".into()));
        }
        if self.hop_ms > self.frame_length_ms {
            return Err(Error::InvalidFramePlan(format!(
                "hop {} ms exceeds frame length {} ms",
                self.hop_ms, self.frame_length_ms
            )));
        }
        Ok(())
    }

    pub fn frame_length_samples(&self, sample_rate_hz: u32) -> usize {
        (self.frame_length_ms * sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn hop_samples(&self, sample_rate_hz: u32) -> usize {
        ((self.hop_ms * sample_rate_hz as f64 / 1000.0).round() as usize).max(1)
    }

    /// `floor((len - frame) / hop) + 1`, or 1 when the signal is shorter than a frame.
    pub fn frame_count(&self, len: usize, sample_rate_hz: u32) -> usize {
        let frame = self.frame_length_samples(sample_rate_hz);
        let hop = self.hop_samples(sample_rate_hz);
        if len < frame {
            1
        } else {
            (len - frame) / hop + 1
        }
    }

    /// Center time of frame `index` in seconds.
    pub fn frame_center_s(&self, index: usize, sample_rate_hz: u32) -> f64 {
        let frame = self.frame_length_samples(sample_rate_hz) as f64;
        let hop = self.hop_samples(sample_rate_hz) as f64;
        (index as f64 * hop + frame / 2.0) / sample_rate_hz as f64
    }
}

/// Windowed frames stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frames {
    data: Vec<f64>,
    frame_length: usize,
    hop: usize,
    times_s: Vec<f64>,
    sample_rate_hz: u32,
}

impl Frames {
    pub fn len(&self) -> usize {
        self.times_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_s.is_empty()
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn times_s(&self) -> &[f64] {
        &self.times_s
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.data[index * self.frame_length..(index + 1) * self.frame_length]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.frame_length)
    }
}

/// Slices `audio` into frames and applies the plan's window. Input shorter
/// than one frame yields a single zero-padded frame.
pub fn frame_signal(audio: &AudioBuffer, plan: &FramePlan) -> Result<Frames> {
    frame_samples(audio.samples(), audio.sample_rate_hz(), plan)
}

pub(crate) fn frame_samples(samples: &[f64], sample_rate_hz: u32, plan: &FramePlan) -> Result<Frames> {
    plan.validate()?;
    let frame_length = plan.frame_length_samples(sample_rate_hz);
    if frame_length < 2 {
        return Err(Error::InvalidFramePlan(format!(
            "frame of {} ms is {frame_length} samples at {sample_rate_hz} Hz; need at least 2",
            plan.frame_length_ms
        )));
    }
    let hop = plan.hop_samples(sample_rate_hz);
    let count = plan.frame_count(samples.len(), sample_rate_hz);
    let window = plan.window.coefficients(frame_length);

    let mut data = vec![0.0; count * frame_length];
    for (i, out) in data.chunks_exact_mut(frame_length).enumerate() {
        let start = i * hop;
        let end = (start + frame_length).min(samples.len());
        for (j, &s) in samples[start..end].iter().enumerate() {
            out[j] = s * window[j];
        }
    }
    let times_s = (0..count)
        .map(|i| plan.frame_center_s(i, sample_rate_hz))
        .collect();
    Ok(Frames {
        data,
        frame_length,
        hop,
        times_s,
        sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silence(len: usize, rate: u32) -> AudioBuffer {
        AudioBuffer::new(vec![0.0; len], rate).unwrap()
    }

    #[test]
    fn one_second_at_22050_gives_98_frames() {
        let frames = frame_signal(&silence(22050, 22050), &FramePlan::spectral()).unwrap();
        assert_eq!(frames.len(), 98);
    }

    #[test]
    fn exactly_one_frame() {
        let plan = FramePlan::spectral();
        let len = plan.frame_length_samples(22050);
        assert_eq!(frame_signal(&silence(len, 22050), &plan).unwrap().len(), 1);
    }

    #[test]
    fn short_input_is_zero_padded_into_one_frame() {
        let audio = AudioBuffer::new(vec![0.5; 10], 8000).unwrap();
        let plan = FramePlan::new(10.0, 5.0, Window::Rectangular).unwrap();
        let frames = frame_signal(&audio, &plan).unwrap();
        assert_eq!(frames.len(), 1);
        let f = frames.frame(0);
        assert_eq!(f.len(), 80);
        assert!(f[..10].iter().all(|&v| v == 0.5));
        assert!(f[10..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_signal_reproduces_window() {
        let audio = AudioBuffer::new(vec![1.0; 4000], 8000).unwrap();
        for window in [Window::Rectangular, Window::Hann, Window::Gaussian] {
            let plan = FramePlan::new(20.0, 10.0, window).unwrap();
            let coeffs = window.coefficients(160);
            let frames = frame_signal(&audio, &plan).unwrap();
            for f in frames.iter() {
                assert_eq!(f, coeffs.as_slice());
            }
        }
    }

    #[test]
    fn center_times_follow_hop() {
        let plan = FramePlan::new(25.0, 10.0, Window::Hann).unwrap();
        let frames = frame_signal(&silence(16000, 16000), &plan).unwrap();
        let t = frames.times_s();
        assert!((t[0] - 0.0125).abs() < 1e-12);
        assert!((t[3] - 0.0425).abs() < 1e-12);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_plans() {
        assert!(FramePlan::new(10.0, 20.0, Window::Hann).is_err());
        assert!(FramePlan::new(0.0, 0.0, Window::Hann).is_err());
        let tiny = FramePlan::new(0.1, 0.1, Window::Hann).unwrap();
        assert!(frame_signal(&silence(100, 8000), &tiny).is_err());
    }

    #[test]
    fn windows_are_symmetric() {
        for w in [Window::Hann, Window::Hamming, Window::Gaussian] {
            let c = w.coefficients(51);
            for i in 0..51 {
                assert!((c[i] - c[50 - i]).abs() < 1e-12);
            }
            assert!((c[25] - 1.0).abs() < 1e-12);
        }
    }
}
