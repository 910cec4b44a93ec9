//! Class-labeled training manifests.
//!
//! Pipe format, one utterance per line after a `#` header:
//!
//! ```text
//! # voicetraits manifest
//! # scheme: f1_mean
//! # source: f1_mean
//! # weights: 1
//! # boundaries: 515.5,540.5
//! # classes: less warmth/cold|neutral|highest warmth
//! # pipeline_version: voicetraits/0.1.0
//! # split_seed: 1234
//! # test_ids: LJ001-0007,LJ003-0112
//! LJ001-0001|2|Printing, in the only sense with which we are at present concerned
//! ```
//!
//! A fourth field carries phonemes when the corpus supplied them. The JSONL
//! format holds the same header as a `{"header": ...}` first line.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::labeling::LabelingRun;
use crate::quantize::{ClassId, NUM_CLASSES};

const MAGIC: &str = "voicetraits manifest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestFormat {
    Pipe,
    Jsonl,
}

impl FromStr for ManifestFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pipe" | "psv" | "txt" => Ok(ManifestFormat::Pipe),
            "jsonl" | "json" => Ok(ManifestFormat::Jsonl),
            other => Err(format!("unknown manifest format '{other}' (pipe or jsonl)")),
        }
    }
}

impl ManifestFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ManifestFormat::Pipe => "txt",
            ManifestFormat::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub scheme: String,
    pub source: String,
    pub weights: Vec<f64>,
    pub boundaries: [f64; 2],
    pub classes: [String; NUM_CLASSES],
    pub pipeline_version: String,
    pub split_seed: u64,
    pub test_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub utterance_id: String,
    pub class_id: ClassId,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub rows: Vec<ManifestRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonHeaderLine {
    header: ManifestHeader,
}

impl Manifest {
    pub fn from_run(run: &LabelingRun, scheme_name: &str) -> Result<Self> {
        let scheme = run.scheme(scheme_name)?;
        let header = ManifestHeader {
            scheme: scheme.name.clone(),
            source: scheme.source.to_string(),
            weights: scheme.source.weights(),
            boundaries: [scheme.boundaries.lower(), scheme.boundaries.upper()],
            classes: scheme.class_semantics.clone(),
            pipeline_version: run.report.pipeline_version.clone(),
            split_seed: run.report.seed,
            test_ids: run.test_ids().into_iter().map(String::from).collect(),
        };
        let mut rows: Vec<ManifestRow> = run
            .utterances
            .iter()
            .map(|u| ManifestRow {
                utterance_id: u.utterance_id.clone(),
                class_id: u.class_ids[scheme_name],
                text: u.text.clone(),
                phonemes: u.phonemes.clone(),
            })
            .collect();
        rows.sort_by(|a, b| a.utterance_id.cmp(&b.utterance_id));
        Ok(Self { header, rows })
    }

    pub fn class_histogram(&self) -> [usize; NUM_CLASSES] {
        let mut h = [0; NUM_CLASSES];
        for r in &self.rows {
            h[r.class_id.index()] += 1;
        }
        h
    }

    pub fn render(&self, format: ManifestFormat) -> Result<String> {
        match format {
            ManifestFormat::Pipe => self.render_pipe(),
            ManifestFormat::Jsonl => self.render_jsonl(),
        }
    }

    fn render_pipe(&self) -> Result<String> {
        let h = &self.header;
        let bad = |what: &str, value: &str| Error::Serialize(format!("{what} {value:?} cannot go in a pipe manifest"));
        if let Some(c) = h.classes.iter().find(|c| c.contains(['|', '\n'])) {
            return Err(bad("class label", c));
        }
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "# {MAGIC}");
        let _ = writeln!(out, "# scheme: {}", h.scheme);
        let _ = writeln!(out, "# source: {}", h.source);
        let _ = writeln!(out, "# weights: {}", join(&h.weights));
        let _ = writeln!(out, "# boundaries: {}", join(&h.boundaries));
        let _ = writeln!(out, "# classes: {}", h.classes.join("|"));
        let _ = writeln!(out, "# pipeline_version: {}", h.pipeline_version);
        let _ = writeln!(out, "# split_seed: {}", h.split_seed);
        let _ = writeln!(out, "# test_ids: {}", h.test_ids.join(","));
        for r in &self.rows {
            if r.text.contains(['|', '\n']) {
                return Err(bad("text", &r.text));
            }
            let _ = write!(out, "{}|{}|{}", r.utterance_id, r.class_id, r.text);
            if let Some(p) = &r.phonemes {
                if p.contains(['|', '\n']) {
                    return Err(bad("phonemes", p));
                }
                let _ = write!(out, "|{p}");
            }
            out.push('\n');
        }
        Ok(out)
    }

    fn render_jsonl(&self) -> Result<String> {
        let ser = |e: serde_json::Error| Error::Serialize(e.to_string());
        let mut out = serde_json::to_string(&JsonHeaderLine {
            header: self.header.clone(),
        })
        .map_err(ser)?;
        out.push('\n');
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).map_err(ser)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write(&self, path: impl AsRef<Path>, format: ManifestFormat) -> Result<()> {
        let path = path.as_ref();
        let text = self.render(format)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Parses either format, detected from the first line.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        if text.starts_with('{') {
            Self::parse_jsonl(text, path)
        } else {
            Self::parse_pipe(text, path)
        }
    }

    fn parse_pipe(text: &str, path: &Path) -> Result<Self> {
        let malformed = |message: String| Error::Manifest {
            path: path.to_path_buf(),
            message,
        };
        let mut fields = std::collections::HashMap::new();
        let mut rows = Vec::new();
        let mut saw_magic = false;
        for (i, line) in text.lines().enumerate() {
            if let Some(comment) = line.strip_prefix("# ") {
                if comment == MAGIC {
                    saw_magic = true;
                } else if let Some((k, v)) = comment.split_once(": ") {
                    fields.insert(k.to_string(), v.to_string());
                } else if let Some(k) = comment.strip_suffix(':') {
                    fields.insert(k.to_string(), String::new());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.splitn(4, '|').collect();
            if parts.len() < 3 {
                return Err(malformed(format!("line {}: expected id|class|text", i + 1)));
            }
            let class: u8 = parts[1]
                .parse()
                .map_err(|_| malformed(format!("line {}: bad class id {:?}", i + 1, parts[1])))?;
            rows.push(ManifestRow {
                utterance_id: parts[0].to_string(),
                class_id: ClassId::new(class).map_err(|e| malformed(format!("line {}: {e}", i + 1)))?,
                text: parts[2].to_string(),
                phonemes: parts.get(3).map(|s| s.to_string()),
            });
        }
        if !saw_magic {
            return Err(malformed("missing manifest header".into()));
        }
        let get = |k: &str| {
            fields
                .get(k)
                .cloned()
                .ok_or_else(|| malformed(format!("header lacks '{k}'")))
        };
        let floats = |k: &str| -> Result<Vec<f64>> {
            get(k)?
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|_| malformed(format!("bad number {s:?} in '{k}'"))))
                .collect()
        };
        let boundaries = floats("boundaries")?;
        let classes: Vec<String> = get("classes")?.split('|').map(String::from).collect();
        let test_ids = get("test_ids")?;
        let header = ManifestHeader {
            scheme: get("scheme")?,
            source: get("source")?,
            weights: floats("weights")?,
            boundaries: boundaries
                .try_into()
                .map_err(|_| malformed("need exactly two boundaries".into()))?,
            classes: classes
                .try_into()
                .map_err(|_| malformed("need exactly three class labels".into()))?,
            pipeline_version: get("pipeline_version")?,
            split_seed: get("split_seed")?
                .parse()
                .map_err(|_| malformed("bad split_seed".into()))?,
            test_ids: if test_ids.is_empty() {
                Vec::new()
            } else {
                test_ids.split(',').map(String::from).collect()
            },
        };
        Ok(Self { header, rows })
    }

    fn parse_jsonl(text: &str, path: &Path) -> Result<Self> {
        let malformed = |line: usize, e: serde_json::Error| Error::Manifest {
            path: path.to_path_buf(),
            message: format!("line {line}: {e}"),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::Manifest {
            path: path.to_path_buf(),
            message: "empty manifest".into(),
        })?;
        let header: JsonHeaderLine = serde_json::from_str(first).map_err(|e| malformed(1, e))?;
        let rows = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| malformed(i + 1, e)))
            .collect::<Result<Vec<ManifestRow>>>()?;
        Ok(Self {
            header: header.header,
            rows,
        })
    }
}

pub fn export_manifest(
    run: &LabelingRun,
    scheme_name: &str,
    path: impl AsRef<Path>,
    format: ManifestFormat,
) -> Result<()> {
    Manifest::from_run(run, scheme_name)?.write(path, format)
}

pub fn parse_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Manifest::parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lld::UtteranceFeatureVector;
    use crate::pipeline::cache::UtteranceRecord;
    use crate::pipeline::labeling::{run_labeling, LabelingConfig};
    use crate::quantize::preset;

    fn run() -> LabelingRun {
        let records: Vec<UtteranceRecord> = [("c", 0.5, None), ("a", 0.2, Some("ah")), ("b", 0.31, None)]
            .iter()
            .map(|&(id, flux, ph)| UtteranceRecord {
                utterance_id: id.into(),
                text: format!("Text of {id}."),
                phonemes: ph.map(String::from),
                audio_sha256: None,
                features: Some(UtteranceFeatureVector {
                    utterance_id: id.into(),
                    f0_mean_hz: 210.0,
                    f1_mean_hz: 520.0,
                    f2_mean_hz: 1570.0,
                    spectral_flux_mean: flux,
                    slope_v0_500: 0.1,
                    slope_v500_1500: -0.02,
                    voiced_frame_fraction: 0.7,
                    unstable_lpc_frames: 0,
                    flags: vec![],
                }),
                error: None,
            })
            .collect();
        let schemes = ["spectral_flux", "warmth_combo"]
            .map(|n| preset(n).unwrap().resolve(None).unwrap());
        run_labeling(&records, &schemes, &LabelingConfig { test_fraction: 0.34, ..Default::default() }).unwrap()
    }

    #[test]
    fn three_rows_plus_header() {
        let m = Manifest::from_run(&run(), "spectral_flux").unwrap();
        let text = m.render(ManifestFormat::Pipe).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["a|0|Text of a.|ah", "b|1|Text of b.", "c|2|Text of c."]);
        assert_eq!(text.lines().count(), 3 + 9);
        assert_eq!(m.header.test_ids.len(), 1);
    }

    #[test]
    fn parse_and_re_export_is_fixed_point() {
        let r = run();
        for format in [ManifestFormat::Pipe, ManifestFormat::Jsonl] {
            let m = Manifest::from_run(&r, "warmth_combo").unwrap();
            let text = m.render(format).unwrap();
            let parsed = Manifest::parse(&text, Path::new("m")).unwrap();
            assert_eq!(parsed, m);
            assert_eq!(parsed.render(format).unwrap(), text);
            for (row, u) in parsed.rows.iter().zip(&r.utterances) {
                assert_eq!(row.class_id, u.class_ids["warmth_combo"]);
            }
        }
    }

    #[test]
    fn unknown_scheme_and_pipe_in_text() {
        let mut r = run();
        assert!(matches!(Manifest::from_run(&r, "nope"), Err(Error::UnknownScheme(_))));
        r.utterances[0].text = "a|b".into();
        let m = Manifest::from_run(&r, "spectral_flux").unwrap();
        assert!(m.render(ManifestFormat::Pipe).is_err());
        assert!(m.render(ManifestFormat::Jsonl).is_ok());
    }

    #[test]
    fn histogram_matches_report() {
        let r = run();
        let m = Manifest::from_run(&r, "spectral_flux").unwrap();
        assert_eq!(m.class_histogram(), r.report.schemes[0].counts);
    }

    #[test]
    fn rejects_headerless_text() {
        assert!(Manifest::parse("a|1|x\n", Path::new("m")).is_err());
        assert!(Manifest::parse("# voicetraits manifest\na|7|x\n", Path::new("m")).is_err());
    }
}
