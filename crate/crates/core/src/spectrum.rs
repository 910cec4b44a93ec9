//! Short-time magnitude spectra.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::frames::{frame_signal, FramePlan, Frames};

/// Magnitude spectrogram, `num_frames × (fft_size / 2 + 1)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    magnitudes: Vec<f64>,
    num_bins: usize,
    bin_hz: f64,
    frame_times_s: Vec<f64>,
}

impl Spectrogram {
    pub fn new(frames: Vec<Vec<f64>>, bin_hz: f64, frame_times_s: Vec<f64>) -> Result<Self> {
        let num_bins = frames.first().map(Vec::len).unwrap_or(0);
        if frames.is_empty() || num_bins == 0 {
            return Err(Error::Empty("spectrogram needs at least one non-empty frame".into()));
        }
        if frames.len() != frame_times_s.len() {
            return Err(Error::InvalidAudio(format!(
                "{} frames but {} frame times",
                frames.len(),
                frame_times_s.len()
            )));
        }
        if frames.iter().any(|f| f.len() != num_bins) {
            return Err(Error::InvalidAudio("ragged spectrogram frames".into()));
        }
        if frames.iter().flatten().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidAudio(
                "magnitudes must be finite and non-negative".into(),
            ));
        }
        if frame_times_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidAudio("frame times must increase".into()));
        }
        if !(bin_hz.is_finite() && bin_hz > 0.0) {
            return Err(Error::InvalidAudio("bin width must be positive".into()));
        }
        Ok(Self {
            magnitudes: frames.concat(),
            num_bins,
            bin_hz,
            frame_times_s,
        })
    }

    pub fn num_frames(&self) -> usize {
        self.frame_times_s.len()
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    /// Width of one bin: sample rate / fft size.
    pub fn bin_hz(&self) -> f64 {
        self.bin_hz
    }

    pub fn fft_size(&self) -> usize {
        (self.num_bins - 1) * 2
    }

    pub fn frame_times_s(&self) -> &[f64] {
        &self.frame_times_s
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.magnitudes[index * self.num_bins..(index + 1) * self.num_bins]
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.magnitudes.chunks_exact(self.num_bins)
    }

    pub fn bin_frequency_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_hz
    }
}

pub fn default_fft_size(frame_length_samples: usize) -> usize {
    frame_length_samples.max(2).next_power_of_two()
}

/// Magnitude STFT. `fft_size` must be a power of two no smaller than the frame.
pub fn stft(audio: &AudioBuffer, plan: &FramePlan, fft_size: usize) -> Result<Spectrogram> {
    let frames = frame_signal(audio, plan)?;
    spectrogram_of_frames(&frames, fft_size)
}

pub(crate) fn spectrogram_of_frames(frames: &Frames, fft_size: usize) -> Result<Spectrogram> {
    if !fft_size.is_power_of_two() {
        return Err(Error::FftNotPowerOfTwo(fft_size));
    }
    if fft_size < frames.frame_length() {
        return Err(Error::FftTooSmall {
            fft_size,
            frame_length: frames.frame_length(),
        });
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_size);
    let num_bins = fft_size / 2 + 1;
    let mut buffer = vec![Complex::new(0.0, 0.0); fft_size];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut magnitudes = Vec::with_capacity(frames.len() * num_bins);
    for frame in frames.iter() {
        buffer.fill(Complex::new(0.0, 0.0));
        for (b, &s) in buffer.iter_mut().zip(frame) {
            b.re = s;
        }
        fft.process_with_scratch(&mut buffer, &mut scratch);
        magnitudes.extend(buffer[..num_bins].iter().map(|c| c.norm()));
    }
    Ok(Spectrogram {
        magnitudes,
        num_bins,
        bin_hz: frames.sample_rate_hz() as f64 / fft_size as f64,
        frame_times_s: frames.times_s().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Window;

    #[test]
    fn rejects_small_or_odd_fft() {
        let audio = AudioBuffer::new(vec![0.0; 2000], 8000).unwrap();
        let plan = FramePlan::new(25.0, 10.0, Window::Hann).unwrap();
        assert!(matches!(
            stft(&audio, &plan, 128),
            Err(Error::FftTooSmall { .. })
        ));
        assert!(matches!(
            stft(&audio, &plan, 300),
            Err(Error::FftNotPowerOfTwo(300))
        ));
    }

    #[test]
    fn zero_signal_zero_spectrum() {
        let audio = AudioBuffer::new(vec![0.0; 4000], 16000).unwrap();
        let spec = stft(&audio, &FramePlan::spectral(), 512).unwrap();
        assert_eq!(spec.num_bins(), 257);
        assert!(spec.frames().flatten().all(|&m| m == 0.0));
    }

    #[test]
    fn default_fft_size_is_next_power() {
        assert_eq!(default_fft_size(551), 1024);
        assert_eq!(default_fft_size(512), 512);
    }

    #[test]
    fn constructor_validates() {
        assert!(Spectrogram::new(vec![vec![1.0, -1.0]], 10.0, vec![0.0]).is_err());
        assert!(Spectrogram::new(vec![vec![1.0], vec![1.0]], 10.0, vec![0.1, 0.1]).is_err());
        assert!(Spectrogram::new(vec![vec![1.0], vec![1.0, 2.0]], 10.0, vec![0.0, 0.1]).is_err());
    }
}
