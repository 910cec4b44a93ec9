//! Feature cache: one JSON document keyed by utterance id, valid for a
//! single (pipeline version, feature config) pair. Entries remember the
//! SHA-256 of their audio so unchanged files are not re-extracted.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lld::{FeatureConfig, UtteranceFeatureVector};
use crate::PIPELINE_VERSION;

/// What the pipeline knows about one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub utterance_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonemes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_sha256: Option<String>,
    /// `None` when extraction failed; `error` then says why.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<UtteranceFeatureVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    pipeline_version: String,
    config_fingerprint: String,
    config: FeatureConfig,
    records: Vec<UtteranceRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn config_fingerprint(config: &FeatureConfig) -> String {
    let json = serde_json::to_vec(config).expect("feature config serializes");
    sha256_hex(&json)
}

/// Shared between extraction workers: lookups take a read lock, inserts
/// serialize on the write lock.
#[derive(Debug)]
pub struct FeatureCache {
    config: FeatureConfig,
    fingerprint: String,
    records: RwLock<BTreeMap<String, UtteranceRecord>>,
}

impl FeatureCache {
    pub fn new(config: FeatureConfig) -> Self {
        Self {
            fingerprint: config_fingerprint(&config),
            config,
            records: RwLock::new(BTreeMap::new()),
        }
    }

    /// Loads a cache file written by [`FeatureCache::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let file: CacheFile = serde_json::from_slice(&bytes).map_err(|e| Error::Cache {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.config_fingerprint != config_fingerprint(&file.config) {
            return Err(Error::Cache {
                path: path.to_path_buf(),
                message: "config fingerprint does not match the stored config".into(),
            });
        }
        Ok(Self {
            config: file.config,
            fingerprint: file.config_fingerprint,
            records: RwLock::new(
                file.records
                    .into_iter()
                    .map(|r| (r.utterance_id.clone(), r))
                    .collect(),
            ),
        })
        .map(|cache| cache.with_version_check(&file.pipeline_version))
    }

    fn with_version_check(self, version: &str) -> Self {
        if version != PIPELINE_VERSION {
            // Records from another pipeline version are stale.
            self.records.write().expect("cache lock").clear();
        }
        self
    }

    /// Loads `path` if it exists and was built with `config`; otherwise an
    /// empty cache for `config`.
    pub fn open_or_new(path: impl AsRef<Path>, config: FeatureConfig) -> Result<Self> {
        let path = path.as_ref();
        if path.exists() {
            let cache = Self::load(path)?;
            if cache.fingerprint == config_fingerprint(&config) {
                return Ok(cache);
            }
        }
        Ok(Self::new(config))
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.records.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The cached record, if its audio hash is `audio_sha256`.
    pub fn lookup(&self, utterance_id: &str, audio_sha256: &str) -> Option<UtteranceRecord> {
        self.records
            .read()
            .expect("cache lock")
            .get(utterance_id)
            .filter(|r| r.audio_sha256.as_deref() == Some(audio_sha256) && r.features.is_some())
            .cloned()
    }

    pub fn insert(&self, record: UtteranceRecord) {
        self.records
            .write()
            .expect("cache lock")
            .insert(record.utterance_id.clone(), record);
    }

    /// Drops records whose ids are not in `keep`.
    pub fn retain_ids(&self, keep: &std::collections::HashSet<String>) {
        self.records
            .write()
            .expect("cache lock")
            .retain(|id, _| keep.contains(id));
    }

    /// Records sorted by utterance id.
    pub fn records(&self) -> Vec<UtteranceRecord> {
        self.records
            .read()
            .expect("cache lock")
            .values()
            .cloned()
            .collect()
    }

    /// Writes the cache atomically (temp file + rename).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = CacheFile {
            pipeline_version: PIPELINE_VERSION.to_string(),
            config_fingerprint: self.fingerprint.clone(),
            config: self.config.clone(),
            records: self.records(),
        };
        let json = serde_json::to_vec_pretty(&file).map_err(|e| Error::Serialize(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        {
            let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            f.write_all(&json).map_err(|e| Error::io(&tmp, e))?;
            f.write_all(b"\n").map_err(|e| Error::io(&tmp, e))?;
        }
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}
