//! Embedding providers: a deterministic built-in hashed bag-of-words
//! embedder, a client for a remote embedding service, a content-addressed
//! on-disk cache, and cosine similarity.
//!
//! The remote protocol is `POST <endpoint>/embeddings` with body
//! `{"input": ["text", ...]}` answered by
//! `{"data": [{"index": 0, "embedding": [...]}, ...]}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Default embedding dimension for the built-in provider.
pub const DEFAULT_DIMENSION: usize = 256;

/// Environment variable that overrides the remote endpoint.
pub const ENDPOINT_ENV_VAR: &str = "S2_EMBED_ENDPOINT";

/// A fixed-dimension embedding. Always either L2-normalized or the all-zero
/// vector (used for empty text).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    /// The zero vector of the given dimension.
    pub fn zero(dimension: usize) -> Self {
        EmbeddingVector { values: vec![0.0; dimension] }
    }

    /// Build from raw values: rejects non-finite entries, L2-normalizes
    /// anything with positive norm, and maps a zero norm to the zero vector.
    pub fn from_raw(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "embedding contains non-finite values".into(),
            ));
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(EmbeddingVector { values });
        }
        let values = values.into_iter().map(|v| v / norm).collect();
        Ok(EmbeddingVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cosine similarity `u·v / (‖u‖‖v‖)`, 0 when either norm is zero, clamped
/// to `[-1, 1]` against rounding.
pub fn cosine_similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    if u.dimension() != v.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            actual: v.dimension(),
        });
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const SIGN_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// FNV-1a with a configurable offset basis; stable across platforms and
/// releases, unlike the std hasher.
fn fnv1a64(bytes: &[u8], offset: u64) -> u64 {
    let mut h = offset;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Deterministic hashed bag-of-words embedding: lowercase whitespace tokens
/// are hashed into `dimension` signed buckets and the result L2-normalized.
/// Empty (or whitespace-only) text maps to the zero vector.
pub fn builtin_embed(text: &str, dimension: usize) -> EmbeddingVector {
    assert!(dimension >= 2, "embedding dimension must be at least 2");
    let mut acc = vec![0.0f64; dimension];
    for token in text.split_whitespace() {
        let lower = token.to_lowercase();
        let bytes = lower.as_bytes();
        let bucket = (fnv1a64(bytes, FNV_OFFSET) % dimension as u64) as usize;
        let sign = if fnv1a64(bytes, FNV_OFFSET ^ SIGN_SALT) & 1 == 1 {
            1.0
        } else {
            -1.0
        };
        acc[bucket] += sign;
    }
    EmbeddingVector::from_raw(acc).expect("bucket counts are finite")
}

/// Which backend produces embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Builtin,
    Remote,
}

/// Embedding provider settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub dimension: usize,
    /// Base URL of the remote service; `/embeddings` is appended.
    pub endpoint: Option<String>,
    pub batch_size: usize,
    pub cache_path: Option<PathBuf>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::Builtin,
            dimension: DEFAULT_DIMENSION,
            endpoint: None,
            batch_size: 32,
            cache_path: None,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Validation(format!(
                "embedding dimension must be >= 2, got {}",
                self.dimension
            )));
        }
        if self.batch_size < 1 {
            return Err(Error::Validation("batch size must be >= 1".into()));
        }
        if self.kind == ProviderKind::Remote && self.endpoint.is_none() {
            return Err(Error::Validation(
                format!("remote provider needs an endpoint (flag, config file, or {ENDPOINT_ENV_VAR})"),
            ));
        }
        Ok(())
    }
}

/// One line of the append-only cache file.
#[derive(Serialize, Deserialize)]
struct CacheRecord {
    key: String,
    dim: usize,
    values: Vec<f64>,
}

struct EmbedCache {
    entries: HashMap<String, Vec<f64>>,
    file: File,
}

impl EmbedCache {
    fn open(path: &PathBuf, dimension: usize) -> Result<Self> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: CacheRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::Parse(format!("embedding cache {path:?}: {e}")))?;
                if record.dim == dimension {
                    entries.insert(record.key, record.values);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(EmbedCache { entries, file })
    }

    fn get(&self, key: &str) -> Option<&Vec<f64>> {
        self.entries.get(key)
    }

    fn insert(&mut self, key: String, dim: usize, values: Vec<f64>) -> Result<()> {
        let record = CacheRecord { key: key.clone(), dim, values };
        let mut line = serde_json::to_string(&record).expect("cache record serialization");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.entries.insert(key, record.values);
        Ok(())
    }
}

fn content_key(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Stateful embedding front-end: holds the provider config, the HTTP client
/// for remote providers, and the open cache.
pub struct Embedder {
    config: ProviderConfig,
    cache: Option<Mutex<EmbedCache>>,
    http: Option<reqwest::blocking::Client>,
}

#[derive(Serialize)]
struct RemoteRequest<'a> {
    input: &'a [String],
}

#[derive(Deserialize)]
struct RemoteResponse {
    data: Vec<RemoteItem>,
}

#[derive(Deserialize)]
struct RemoteItem {
    index: usize,
    embedding: Vec<f64>,
}

impl Embedder {
    pub fn new(config: ProviderConfig) -> Result<Self> {
        config.validate()?;
        let cache = match &config.cache_path {
            Some(path) => Some(Mutex::new(EmbedCache::open(path, config.dimension)?)),
            None => None,
        };
        let http = match config.kind {
            ProviderKind::Remote => Some(
                reqwest::blocking::Client::builder()
                    .timeout(std::time::Duration::from_secs(60))
                    .build()
                    .map_err(|e| Error::Transport { batch: 0, message: e.to_string() })?,
            ),
            ProviderKind::Builtin => None,
        };
        Ok(Embedder { config, cache, http })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    /// Embed `texts`, preserving input order. Results are served from the
    /// cache when one is configured; misses are computed (built-in) or
    /// fetched in batches (remote) and appended to the cache.
    pub fn embed_texts(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        let dim = self.config.dimension;
        let mut results: Vec<Option<EmbeddingVector>> = vec![None; texts.len()];

        // Cache lookups first.
        let mut misses: Vec<usize> = Vec::new();
        if let Some(cache) = &self.cache {
            let cache = cache.lock().expect("cache lock");
            for (i, text) in texts.iter().enumerate() {
                match cache.get(&content_key(text)) {
                    Some(values) => {
                        results[i] = Some(EmbeddingVector { values: values.clone() });
                    }
                    None => misses.push(i),
                }
            }
        } else {
            misses = (0..texts.len()).collect();
        }

        // Compute misses once per distinct text.
        let mut computed: HashMap<&str, EmbeddingVector> = HashMap::new();
        let distinct: Vec<&str> = {
            let mut seen = std::collections::HashSet::new();
            misses
                .iter()
                .map(|&i| texts[i].as_str())
                .filter(|t| seen.insert(*t))
                .collect()
        };
        match self.config.kind {
            ProviderKind::Builtin => {
                for text in &distinct {
                    computed.insert(text, builtin_embed(text, dim));
                }
            }
            ProviderKind::Remote => {
                let owned: Vec<String> = distinct.iter().map(|t| t.to_string()).collect();
                let vectors = self.fetch_remote(&owned)?;
                for (text, vector) in distinct.iter().zip(vectors) {
                    computed.insert(text, vector);
                }
            }
        }

        if let Some(cache) = &self.cache {
            let mut cache = cache.lock().expect("cache lock");
            for text in &distinct {
                let vector = &computed[text];
                cache.insert(content_key(text), dim, vector.values.clone())?;
            }
        }
        for i in misses {
            results[i] = Some(computed[texts[i].as_str()].clone());
        }
        Ok(results.into_iter().map(|r| r.expect("all slots filled")).collect())
    }

    /// Fetch embeddings for `texts` from the remote service in batches of
    /// `batch_size`. Batch boundaries are invisible in the result.
    fn fetch_remote(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        let client = self.http.as_ref().expect("remote provider has a client");
        let endpoint = self.config.endpoint.as_ref().expect("validated");
        let url = format!("{}/embeddings", endpoint.trim_end_matches('/'));
        let mut out = Vec::with_capacity(texts.len());
        for (batch_idx, batch) in texts.chunks(self.config.batch_size).enumerate() {
            let transport = |message: String| Error::Transport { batch: batch_idx, message };
            let response = client
                .post(&url)
                .json(&RemoteRequest { input: batch })
                .send()
                .map_err(|e| transport(e.to_string()))?;
            let status = response.status();
            if !status.is_success() {
                let body = response.text().unwrap_or_default();
                return Err(transport(format!("HTTP {status}: {}", body.trim())));
            }
            let parsed: RemoteResponse = response
                .json()
                .map_err(|e| transport(format!("bad response body: {e}")))?;
            if parsed.data.len() != batch.len() {
                return Err(transport(format!(
                    "expected {} embeddings, got {}",
                    batch.len(),
                    parsed.data.len()
                )));
            }
            let mut slots: Vec<Option<Vec<f64>>> = vec![None; batch.len()];
            for item in parsed.data {
                if item.index >= batch.len() {
                    return Err(transport(format!(
                        "response index {} out of range for batch of {}",
                        item.index,
                        batch.len()
                    )));
                }
                if slots[item.index].is_some() {
                    return Err(transport(format!("duplicate response index {}", item.index)));
                }
                slots[item.index] = Some(item.embedding);
            }
            for slot in slots {
                let values = slot.expect("lengths checked");
                if values.len() != self.config.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.config.dimension,
                        actual: values.len(),
                    });
                }
                out.push(EmbeddingVector::from_raw(values)?);
            }
        }
        Ok(out)
    }
}

/// One-shot convenience wrapper around [`Embedder`].
pub fn embed_texts(config: &ProviderConfig, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
    Embedder::new(config.clone())?.embed_texts(texts)
}
