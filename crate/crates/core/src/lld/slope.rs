use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lld::track::LldTrack;
use crate::spectrum::Spectrogram;

const LOG_POWER_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl Band {
    pub const fn new(lo_hz: f64, hi_hz: f64) -> Self {
        Self { lo_hz, hi_hz }
    }

    /// Bins whose center frequency lies in `[lo, hi]`; at least 3 required.
    pub fn bins(&self, spec: &Spectrogram) -> Result<Range<usize>> {
        let nyquist = spec.bin_frequency_hz(spec.num_bins() - 1);
        let invalid = |reason: String| Error::InvalidBand {
            lo_hz: self.lo_hz,
            hi_hz: self.hi_hz,
            reason,
        };
        if !(self.lo_hz >= 0.0 && self.lo_hz < self.hi_hz && self.hi_hz <= nyquist + 1e-9) {
            return Err(invalid(format!("need 0 <= lo < hi <= {nyquist}")));
        }
        let first = (self.lo_hz / spec.bin_hz()).ceil() as usize;
        let last = ((self.hi_hz / spec.bin_hz()).floor() as usize).min(spec.num_bins() - 1);
        if last < first || last - first + 1 < 3 {
            return Err(invalid(format!(
                "only {} bins at {} Hz resolution; need at least 3",
                (last + 1).saturating_sub(first),
                spec.bin_hz()
            )));
        }
        Ok(first..last + 1)
    }
}

/// Least-squares slope of `ln(max(|X|^2, 1e-10))` against frequency in Hz
/// over the band, on voiced frames; unvoiced frames hold 0.
pub fn spectral_slope_band(spec: &Spectrogram, band: Band, voiced: &[bool]) -> Result<LldTrack> {
    let bins = band.bins(spec)?;
    if voiced.len() != spec.num_frames() {
        return Err(Error::InvalidAudio(format!(
            "voicing mask has {} frames, spectrogram has {}",
            voiced.len(),
            spec.num_frames()
        )));
    }
    let freqs: Vec<f64> = bins.clone().map(|k| spec.bin_frequency_hz(k)).collect();
    let mean_f = freqs.iter().sum::<f64>() / freqs.len() as f64;
    let centered: Vec<f64> = freqs.iter().map(|f| f - mean_f).collect();
    let sxx: f64 = centered.iter().map(|c| c * c).sum();

    let values = spec
        .frames()
        .zip(voiced)
        .map(|(frame, &v)| {
            if !v {
                return 0.0;
            }
            // Centered x makes the y mean drop out of the covariance.
            let sxy: f64 = frame[bins.clone()]
                .iter()
                .zip(&centered)
                .map(|(m, c)| (m * m).max(LOG_POWER_FLOOR).ln() * c)
                .sum();
            sxy / sxx
        })
        .collect();

    Ok(LldTrack {
        name: format!("slopeV{}-{}", band.lo_hz, band.hi_hz),
        values,
        voiced: voiced.to_vec(),
        frame_times_s: spec.frame_times_s().to_vec(),
        voiced_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_from_log_power(log_power: impl Fn(f64) -> f64, bins: usize, bin_hz: f64) -> Spectrogram {
        let frame: Vec<f64> = (0..bins)
            .map(|k| (log_power(k as f64 * bin_hz) / 2.0).exp())
            .collect();
        Spectrogram::new(vec![frame.clone(), frame], bin_hz, vec![0.0, 0.01]).unwrap()
    }

    #[test]
    fn recovers_planted_coefficient() {
        let c = -0.0123;
        let spec = spec_from_log_power(|f| 1.5 + c * f, 513, 21.5);
        let track = spectral_slope_band(&spec, Band::new(0.0, 500.0), &[true, false]).unwrap();
        assert!((track.values[0] - c).abs() < 1e-9);
        assert_eq!(track.values[1], 0.0);
    }

    #[test]
    fn flat_spectrum_has_zero_slope() {
        let spec = spec_from_log_power(|_| 0.7, 513, 21.5);
        let track = spectral_slope_band(&spec, Band::new(500.0, 1500.0), &[true, true]).unwrap();
        assert!(track.values.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn narrow_band_rejected() {
        let spec = spec_from_log_power(|_| 0.0, 513, 21.5);
        assert!(spectral_slope_band(&spec, Band::new(100.0, 130.0), &[true, true]).is_err());
        assert!(spectral_slope_band(&spec, Band::new(600.0, 500.0), &[true, true]).is_err());
        assert!(spectral_slope_band(&spec, Band::new(0.0, 1e6), &[true, true]).is_err());
    }

    #[test]
    fn zero_bins_use_floor() {
        let spec = Spectrogram::new(vec![vec![0.0; 64]], 10.0, vec![0.0]).unwrap();
        let t = spectral_slope_band(&spec, Band::new(0.0, 300.0), &[true]).unwrap();
        assert!(t.values[0].abs() < 1e-12);
    }
}
