use proptest::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use voicetraits::synth::sine;
use voicetraits::{frame_signal, load_wav, stft, write_wav, AudioBuffer, FramePlan, Window};

#[test]
fn sine_peaks_in_its_bin() {
    let sr = 16000;
    // 1000 Hz lands on bin 64 of a 1024-point transform.
    let audio = sine(1000.0, 0.5, sr, 0.5);
    let plan = FramePlan::new(64.0, 10.0, Window::Hann).unwrap();
    let spec = stft(&audio, &plan, 1024).unwrap();
    assert_eq!(spec.fft_size(), 1024);
    for frame in spec.frames() {
        let peak = frame
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(peak, 64);
    }
}

/// Parseval with a rectangular window and no zero padding: the one-sided
/// spectrum, with interior bins counted twice, carries N times the energy.
#[test]
fn parseval_one_sided() {
    let sr = 8000;
    let samples: Vec<f64> = (0..4000).map(|i| ((i * 7919) % 200) as f64 / 400.0 - 0.25).collect();
    let audio = AudioBuffer::new(samples, sr).unwrap();
    let plan = FramePlan::new(32.0, 16.0, Window::Rectangular).unwrap();
    let frames = frame_signal(&audio, &plan).unwrap();
    let n = frames.frame_length();
    assert_eq!(n, 256);
    let spec = stft(&audio, &plan, n).unwrap();
    for (i, mags) in spec.frames().enumerate() {
        let energy: f64 = frames.frame(i).iter().map(|x| x * x).sum();
        let last = mags.len() - 1;
        let spectral: f64 = mags
            .iter()
            .enumerate()
            .map(|(k, m)| if k == 0 || k == last { m * m } else { 2.0 * m * m })
            .sum();
        assert!((spectral - n as f64 * energy).abs() <= 1e-6 * spectral.max(1.0), "frame {i}");
    }
}

#[test]
fn magnitudes_match_direct_dft() {
    let sr = 8000;
    let samples: Vec<f64> = (0..800).map(|i| (i as f64 * 0.37).sin() * 0.3).collect();
    let audio = AudioBuffer::new(samples, sr).unwrap();
    let plan = FramePlan::new(25.0, 10.0, Window::Hamming).unwrap();
    let frames = frame_signal(&audio, &plan).unwrap();
    let spec = stft(&audio, &plan, 256).unwrap();
    let frame = frames.frame(3);
    for k in [0usize, 5, 40, 128] {
        let mut acc = Complex::new(0.0, 0.0);
        for (t, &x) in frame.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k * t) as f64 / 256.0;
            acc += Complex::from_polar(x, phase);
        }
        assert!((acc.norm() - spec.frame(3)[k]).abs() < 1e-9, "bin {k}");
    }
    // Cross-check one frame against an independently planned transform.
    let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
    buf.resize(256, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(256).process(&mut buf);
    for (k, z) in buf.iter().take(129).enumerate() {
        assert!((z.norm() - spec.frame(3)[k]).abs() < 1e-9);
    }
}

#[test]
fn one_second_frame_grid() {
    let audio = AudioBuffer::new(vec![0.0; 22050], 22050).unwrap();
    let frames = frame_signal(&audio, &FramePlan::spectral()).unwrap();
    // 25 ms = 551.25 samples, 10 ms = 220.5 samples; both round half away.
    assert_eq!(frames.frame_length(), 551);
    assert_eq!(frames.hop(), 221);
    assert_eq!(frames.len(), 98);
}

proptest! {
    #[test]
    fn frame_count_matches_brute_force(
        len in 1usize..5000,
        frame_ms in 2.0f64..60.0,
        hop_fraction in 0.05f64..=1.0,
        sr in prop::sample::select(vec![8000u32, 16000, 22050, 44100]),
    ) {
        let plan = FramePlan::new(frame_ms, frame_ms * hop_fraction, Window::Hann).unwrap();
        let frame = plan.frame_length_samples(sr);
        let hop = plan.hop_samples(sr);
        prop_assume!(frame >= 2);
        let mut brute = 0;
        let mut start = 0;
        while start + frame <= len {
            brute += 1;
            start += hop;
        }
        let expected = brute.max(1);
        prop_assert_eq!(plan.frame_count(len, sr), expected);
        let audio = AudioBuffer::new(vec![0.1; len], sr).unwrap();
        let frames = frame_signal(&audio, &plan).unwrap();
        prop_assert_eq!(frames.len(), expected);
        prop_assert!(frames.times_s().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn wav_16bit_round_trip(samples in prop::collection::vec(-1.0f64..=1.0, 1..2000)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let audio = AudioBuffer::new(samples.clone(), 16000).unwrap();
        write_wav(&path, &audio).unwrap();
        let back = load_wav(&path).unwrap();
        prop_assert_eq!(back.sample_rate_hz(), 16000);
        prop_assert_eq!(back.len(), samples.len());
        for (a, b) in samples.iter().zip(back.samples()) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0 + 1e-12);
        }
        // Quantized audio survives a second trip exactly.
        write_wav(&path, &back).unwrap();
        let again = load_wav(&path).unwrap();
        prop_assert_eq!(again.samples(), back.samples());
    }
}
