//! LJSpeech-style corpus metadata: `id|text|normalized_text`, one row per
//! utterance, audio at `<audio_dir>/<id>.wav`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifestEntry {
    pub utterance_id: String,
    pub audio_path: PathBuf,
    pub text: String,
    /// Equal to `text` for two-field rows.
    pub normalized_text: String,
    /// Externally produced phoneme string, passed through untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<String>,
    pub audio_present: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusManifestEntry>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn missing_audio(&self) -> usize {
        self.entries.iter().filter(|e| !e.audio_present).count()
    }
}

/// Parses pipe-delimited metadata. Rows carry 2 (`id|text`), 3
/// (`id|text|normalized`) or 4 (`...|phonemes`) fields. Quotes are literal:
/// LJSpeech has unbalanced quote marks in some transcripts.
pub fn load_corpus(metadata_path: impl AsRef<Path>, audio_dir: impl AsRef<Path>) -> Result<Corpus> {
    let metadata_path = metadata_path.as_ref();
    let audio_dir = audio_dir.as_ref();
    let text = std::fs::read_to_string(metadata_path).map_err(|e| Error::io(metadata_path, e))?;

    let row_error = |line: usize, message: String| Error::Row {
        path: metadata_path.to_path_buf(),
        line,
        message,
    };
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('|').collect();
        if !(2..=4).contains(&fields.len()) {
            return Err(row_error(
                line,
                format!("expected 2 to 4 '|'-separated fields, found {}", fields.len()),
            ));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(row_error(line, "empty utterance id".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(row_error(line, format!("duplicate utterance id {id}")));
        }
        let text = fields[1].to_string();
        let normalized_text = fields
            .get(2)
            .filter(|s| !s.is_empty())
            .map_or_else(|| text.clone(), |s| s.to_string());
        let phonemes = fields.get(3).filter(|s| !s.is_empty()).map(|s| s.to_string());
        let audio_path = audio_dir.join(format!("{id}.wav"));
        let audio_present = audio_path.is_file();
        entries.push(CorpusManifestEntry {
            utterance_id: id.to_string(),
            audio_path,
            text,
            normalized_text,
            phonemes,
            audio_present,
        });
    }
    if entries.is_empty() {
        return Err(Error::NoEntries(metadata_path.to_path_buf()));
    }
    Ok(Corpus { entries })
}
