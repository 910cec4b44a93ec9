//! F0 contour export for per-class overlay plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio::{load_wav, AudioBuffer};
use crate::error::{Error, Result};
use crate::lld::{estimate_f0, FeatureConfig};
use crate::quantize::ClassId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourExport {
    pub utterance_id: String,
    pub class_id: ClassId,
    /// `(time_s, f0_hz)`, 0 Hz on unvoiced frames.
    pub series: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourSource {
    pub utterance_id: String,
    pub audio_path: PathBuf,
    pub class_id: ClassId,
}

pub fn f0_contour(
    utterance_id: &str,
    audio: &AudioBuffer,
    class_id: ClassId,
    config: &FeatureConfig,
) -> Result<ContourExport> {
    let track = estimate_f0(audio, &config.pitch_plan, &config.pitch)?;
    Ok(ContourExport {
        utterance_id: utterance_id.to_string(),
        class_id,
        series: track
            .frame_times_s
            .iter()
            .copied()
            .zip(track.values.iter().copied())
            .collect(),
    })
}

/// Loads each source, writes `<id>.f0.csv` per utterance plus `overlay.csv`
/// into `out_dir`.
pub fn export_f0_contours(
    sources: &[ContourSource],
    out_dir: impl AsRef<Path>,
    config: &FeatureConfig,
) -> Result<Vec<ContourExport>> {
    let contours = sources
        .iter()
        .map(|s| {
            let audio = load_wav(&s.audio_path)?;
            f0_contour(&s.utterance_id, &audio, s.class_id, config)
        })
        .collect::<Result<Vec<_>>>()?;
    write_contours(&contours, out_dir)?;
    Ok(contours)
}

pub fn write_contours(contours: &[ContourExport], out_dir: impl AsRef<Path>) -> Result<()> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for c in contours {
        let mut csv = String::from("time_s,f0_hz\n");
        for (t, f0) in &c.series {
            let _ = writeln!(csv, "{t:.4},{f0}");
        }
        let path = out_dir.join(format!("{}.f0.csv", c.utterance_id));
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
    }
    let path = out_dir.join("overlay.csv");
    std::fs::write(&path, overlay_table(contours)).map_err(|e| Error::io(&path, e))
}

/// Wide table: one row per frame index, one column per contour ordered by
/// class then utterance id. Shorter contours leave trailing cells empty.
pub fn overlay_table(contours: &[ContourExport]) -> String {
    let mut order: Vec<&ContourExport> = contours.iter().collect();
    order.sort_by(|a, b| (a.class_id, &a.utterance_id).cmp(&(b.class_id, &b.utterance_id)));
    let longest = order.iter().max_by_key(|c| c.series.len());

    let mut out = String::from("frame,time_s");
    for c in &order {
        let _ = write!(out, ",class{}:{}", c.class_id, c.utterance_id);
    }
    out.push('\n');
    let Some(longest) = longest else {
        return out;
    };
    for (i, (t, _)) in longest.series.iter().enumerate() {
        let _ = write!(out, "{i},{t:.4}");
        for c in &order {
            match c.series.get(i) {
                Some((_, f0)) => {
                    let _ = write!(out, ",{f0}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}
