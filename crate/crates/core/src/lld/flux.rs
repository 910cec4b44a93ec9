use crate::lld::track::LldTrack;
use crate::spectrum::Spectrogram;

/// Squared difference between consecutive unit-L2-normalized magnitude
/// spectra. Zero-energy frames count as zero vectors; frame 0 is 0.
pub fn spectral_flux(spec: &Spectrogram) -> LldTrack {
    let mut values = Vec::with_capacity(spec.num_frames());
    let mut prev: Option<Vec<f64>> = None;
    for frame in spec.frames() {
        let current = unit_normalized(frame);
        let flux = match &prev {
            None => 0.0,
            Some(p) => p
                .iter()
                .zip(&current)
                .map(|(a, b)| (b - a) * (b - a))
                .sum(),
        };
        values.push(flux);
        prev = Some(current);
    }
    let n = values.len();
    LldTrack {
        name: "spectralFlux".into(),
        values,
        voiced: vec![true; n],
        frame_times_s: spec.frame_times_s().to_vec(),
        voiced_only: false,
    }
}

fn unit_normalized(frame: &[f64]) -> Vec<f64> {
    let norm = frame.iter().map(|m| m * m).sum::<f64>().sqrt();
    if norm > 0.0 {
        frame.iter().map(|m| m / norm).collect()
    } else {
        vec![0.0; frame.len()]
    }
}
