use serde::{Deserialize, Serialize};

/// Per-frame values of one low-level descriptor.
///
/// Voiced-only descriptors (F0, formants, voiced slopes) hold 0 on unvoiced
/// frames; smoothing and the non-zero mean skip those zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LldTrack {
    pub name: String,
    pub values: Vec<f64>,
    pub voiced: Vec<bool>,
    pub frame_times_s: Vec<f64>,
    pub voiced_only: bool,
}

impl LldTrack {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check(&self) {
        debug_assert_eq!(self.values.len(), self.voiced.len());
        debug_assert_eq!(self.values.len(), self.frame_times_s.len());
        debug_assert!(self.values.iter().all(|v| v.is_finite()));
    }

    /// Index of the frame whose center is nearest to `t`.
    pub fn nearest_frame(&self, t: f64) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let i = self.frame_times_s.partition_point(|&x| x < t);
        Some(if i == 0 {
            0
        } else if i == self.len() || t - self.frame_times_s[i - 1] <= self.frame_times_s[i] - t {
            i - 1
        } else {
            i
        })
    }

    /// Voicing of the nearest frame for each of `times_s`.
    pub fn voicing_at(&self, times_s: &[f64]) -> Vec<bool> {
        times_s
            .iter()
            .map(|&t| self.nearest_frame(t).is_some_and(|i| self.voiced[i]))
            .collect()
    }

    /// Value of the nearest frame for each of `times_s`.
    pub fn values_at(&self, times_s: &[f64]) -> Vec<f64> {
        times_s
            .iter()
            .map(|&t| self.nearest_frame(t).map_or(0.0, |i| self.values[i]))
            .collect()
    }

    fn participates(&self, t: usize) -> bool {
        !self.voiced_only || (self.voiced[t] && self.values[t] != 0.0)
    }
}

/// Symmetric 3-point moving average. Edge frames average the neighbors that
/// exist; voiced-only tracks average only voiced non-zero neighbors and keep
/// unvoiced frames at zero.
pub fn smooth_sma3(track: &LldTrack) -> LldTrack {
    let n = track.len();
    let values = (0..n)
        .map(|t| {
            if !track.participates(t) {
                return 0.0;
            }
            let lo = t.saturating_sub(1);
            let hi = (t + 1).min(n - 1);
            let (sum, count) = (lo..=hi)
                .filter(|&k| track.participates(k))
                .fold((0.0, 0usize), |(s, c), k| (s + track.values[k], c + 1));
            sum / count as f64
        })
        .collect();
    LldTrack {
        values,
        ..track.clone()
    }
}

/// Arithmetic mean over non-zero frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NzMean {
    pub value: f64,
    /// Set when every frame was zero; `value` is then 0.
    pub all_zero: bool,
}

pub fn functional_nz_amean(track: &LldTrack) -> NzMean {
    let (sum, count) = track
        .values
        .iter()
        .filter(|v| **v != 0.0)
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        NzMean {
            value: 0.0,
            all_zero: true,
        }
    } else {
        NzMean {
            value: sum / count as f64,
            all_zero: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn track(values: &[f64], voiced: &[bool], voiced_only: bool) -> LldTrack {
        LldTrack {
            name: "t".into(),
            values: values.to_vec(),
            voiced: voiced.to_vec(),
            frame_times_s: (0..values.len()).map(|i| i as f64 * 0.01).collect(),
            voiced_only,
        }
    }

    #[test]
    fn sma3_edges_average_available_neighbors() {
        let t = track(&[1.0, 2.0, 3.0], &[true; 3], false);
        assert_eq!(smooth_sma3(&t).values, vec![1.5, 2.0, 2.5]);
    }

    #[test]
    fn sma3_constant_unchanged() {
        let t = track(&[4.0; 6], &[true; 6], false);
        assert_eq!(smooth_sma3(&t).values, vec![4.0; 6]);
    }

    #[test]
    fn sma3_excludes_unvoiced_zeros() {
        let t = track(&[0.0, 4.0, 6.0], &[false, true, true], true);
        assert_eq!(smooth_sma3(&t).values, vec![0.0, 5.0, 5.0]);
    }

    #[test]
    fn sma3_non_voiced_track_keeps_zeros_in_average() {
        let t = track(&[0.0, 3.0, 0.0], &[true; 3], false);
        assert_eq!(smooth_sma3(&t).values, vec![1.5, 1.0, 1.5]);
    }

    #[test]
    fn voicing_follows_nearest_frame() {
        let t = track(&[0.0, 200.0, 0.0], &[false, true, false], true);
        assert_eq!(
            t.voicing_at(&[-1.0, 0.004, 0.006, 0.014, 0.016, 0.5]),
            vec![false, false, true, true, false, false]
        );
    }

    #[test]
    fn nz_amean_cases() {
        let t = track(&[0.0, 2.0, 0.0, 4.0], &[true; 4], false);
        assert_eq!(functional_nz_amean(&t), NzMean { value: 3.0, all_zero: false });
        let z = track(&[0.0; 3], &[false; 3], true);
        assert_eq!(functional_nz_amean(&z), NzMean { value: 0.0, all_zero: true });
        let c = track(&[5.0; 3], &[true; 3], false);
        assert_eq!(functional_nz_amean(&c).value, 5.0);
    }
}
