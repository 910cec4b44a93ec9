//! Synthetic test signals with known pitch and formants.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::AudioBuffer;

fn sample_count(duration_s: f64, sample_rate_hz: u32) -> usize {
    (duration_s * sample_rate_hz as f64).round() as usize
}

/// Rising sawtooth in `[-amplitude, amplitude]`.
pub fn sawtooth(f0_hz: f64, duration_s: f64, sample_rate_hz: u32, amplitude: f64) -> AudioBuffer {
    let sr = sample_rate_hz as f64;
    let samples = (0..sample_count(duration_s, sample_rate_hz))
        .map(|n| {
            let phase = (n as f64 * f0_hz / sr).fract();
            amplitude * (2.0 * phase - 1.0)
        })
        .collect();
    AudioBuffer::from_clipped(samples, sample_rate_hz).expect("non-empty synthetic signal")
}

pub fn sine(freq_hz: f64, duration_s: f64, sample_rate_hz: u32, amplitude: f64) -> AudioBuffer {
    let sr = sample_rate_hz as f64;
    let samples = (0..sample_count(duration_s, sample_rate_hz))
        .map(|n| amplitude * (2.0 * PI * freq_hz * n as f64 / sr).sin())
        .collect();
    AudioBuffer::from_clipped(samples, sample_rate_hz).expect("non-empty synthetic signal")
}

/// Uniform white noise in `[-amplitude, amplitude]`.
pub fn white_noise(duration_s: f64, sample_rate_hz: u32, amplitude: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..sample_count(duration_s, sample_rate_hz))
        .map(|_| amplitude * rng.random_range(-1.0..=1.0))
        .collect();
    AudioBuffer::from_clipped(samples, sample_rate_hz).expect("non-empty synthetic signal")
}

pub fn silence(duration_s: f64, sample_rate_hz: u32) -> AudioBuffer {
    AudioBuffer::new(vec![0.0; sample_count(duration_s, sample_rate_hz).max(1)], sample_rate_hz)
        .expect("non-empty synthetic signal")
}

/// A vocal-tract resonance: center frequency and -3 dB bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

/// Impulse train at `f0_hz` through cascaded two-pole resonators, peak
/// normalized to `peak`.
pub fn resonator_vowel(
    f0_hz: f64,
    resonances: &[Resonance],
    duration_s: f64,
    sample_rate_hz: u32,
    peak: f64,
) -> AudioBuffer {
    let sr = sample_rate_hz as f64;
    let n = sample_count(duration_s, sample_rate_hz);
    let period = sr / f0_hz;
    let mut signal = vec![0.0; n];
    let mut next = 0.0f64;
    while (next as usize) < n {
        signal[next.round() as usize % n] = 1.0;
        next += period;
    }
    for r in resonances {
        let radius = (-PI * r.bandwidth_hz / sr).exp();
        let theta = 2.0 * PI * r.freq_hz / sr;
        let a1 = 2.0 * radius * theta.cos();
        let a2 = -radius * radius;
        let (mut y1, mut y2) = (0.0, 0.0);
        for x in signal.iter_mut() {
            let y = *x + a1 * y1 + a2 * y2;
            y2 = y1;
            y1 = y;
            *x = y;
        }
    }
    let max = signal.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if max > 0.0 {
        signal.iter_mut().for_each(|s| *s *= peak / max);
    }
    AudioBuffer::from_clipped(signal, sample_rate_hz).expect("non-empty synthetic signal")
}
