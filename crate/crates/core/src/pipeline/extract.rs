use std::collections::HashSet;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio::decode_wav;
use crate::error::{Error, Result};
use crate::lld::analyze_utterance;
use crate::pipeline::cache::{sha256_hex, FeatureCache, UtteranceRecord};
use crate::pipeline::corpus::{Corpus, CorpusManifestEntry};

#[derive(Debug, Clone, Default)]
pub struct ExtractOptions {
    /// Worker threads; `None` uses all cores.
    pub jobs: Option<usize>,
    /// Per-utterance frame-level CSV dumps go here when set.
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionSummary {
    pub total: usize,
    pub extracted: usize,
    pub reused: usize,
    pub failed: usize,
    pub missing_audio: usize,
}

enum Outcome {
    Extracted,
    Reused,
    Failed,
    Missing,
}

/// Extracts features for every corpus entry into `cache`, reusing records
/// whose audio hash is unchanged. Per-utterance failures are recorded in the
/// cache, not returned.
pub fn extract_corpus(
    corpus: &Corpus,
    cache: &FeatureCache,
    options: &ExtractOptions,
) -> Result<ExtractionSummary> {
    if let Some(dir) = &options.dump_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = options.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidAudio(format!("cannot start worker pool: {e}")))?;

    let outcomes: Vec<Outcome> = pool.install(|| {
        corpus
            .entries
            .par_iter()
            .map(|entry| process_entry(entry, cache, options))
            .collect()
    });

    let keep: HashSet<String> = corpus.entries.iter().map(|e| e.utterance_id.clone()).collect();
    cache.retain_ids(&keep);

    let mut summary = ExtractionSummary {
        total: corpus.len(),
        ..Default::default()
    };
    for outcome in outcomes {
        match outcome {
            Outcome::Extracted => summary.extracted += 1,
            Outcome::Reused => summary.reused += 1,
            Outcome::Failed => summary.failed += 1,
            Outcome::Missing => summary.missing_audio += 1,
        }
    }
    Ok(summary)
}

fn process_entry(entry: &CorpusManifestEntry, cache: &FeatureCache, options: &ExtractOptions) -> Outcome {
    let mut record = UtteranceRecord {
        utterance_id: entry.utterance_id.clone(),
        text: entry.normalized_text.clone(),
        phonemes: entry.phonemes.clone(),
        audio_sha256: None,
        features: None,
        error: None,
    };
    if !entry.audio_present {
        record.error = Some(format!("missing audio {}", entry.audio_path.display()));
        cache.insert(record);
        return Outcome::Missing;
    }
    let bytes = match std::fs::read(&entry.audio_path) {
        Ok(b) => b,
        Err(e) => {
            record.error = Some(Error::io(&entry.audio_path, e).to_string());
            cache.insert(record);
            return Outcome::Failed;
        }
    };
    let hash = sha256_hex(&bytes);
    if let Some(mut cached) = cache.lookup(&entry.utterance_id, &hash) {
        // Text may have been edited without touching the audio.
        cached.text = record.text;
        cached.phonemes = record.phonemes;
        cache.insert(cached);
        return Outcome::Reused;
    }
    record.audio_sha256 = Some(hash);

    let analysis = decode_wav(&bytes, &entry.audio_path)
        .and_then(|audio| analyze_utterance(&entry.utterance_id, &audio, cache.config()));
    let outcome = match analysis {
        Ok(analysis) => {
            if let Some(dir) = &options.dump_dir {
                let path = dir.join(format!("{}.lld.csv", entry.utterance_id));
                if let Err(e) = analysis.tracks.write_debug_csv(&path) {
                    record.error = Some(e.to_string());
                }
            }
            record.features = Some(analysis.features);
            Outcome::Extracted
        }
        Err(e) => {
            record.error = Some(e.to_string());
            Outcome::Failed
        }
    };
    cache.insert(record);
    outcome
}
