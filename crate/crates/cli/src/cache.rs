//! On-disk cache of residue payloads, one JSON file per entry.
//!
//! Entries are stamped with a SHA-256 digest of key and payload. A missing,
//! corrupt or version-mismatched entry is a miss; the caller recomputes and
//! overwrites it. Writes go through a single lock and land by rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use iwasawa_core::iwasawa::{ApproximantKey, ApproximantStore};
use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const CACHE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u64,
    pub kind: String,
    pub params: Vec<u64>,
    pub schema_version: u32,
}

impl CacheKey {
    pub fn new(p: u64, kind: &str, params: Vec<u64>) -> Self {
        Self { p, kind: kind.to_owned(), params, schema_version: CACHE_SCHEMA_VERSION }
    }

    fn file_name(&self) -> String {
        let params: Vec<String> = self.params.iter().map(u64::to_string).collect();
        format!("{}-p{}-{}.json", self.kind, self.p, params.join("-"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub payload: Vec<u64>,
    /// Hex SHA-256 of the key and payload.
    pub digest: String,
}

fn digest(key: &CacheKey, payload: &[u64]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(key).expect("key serializes"));
    for x in payload {
        h.update(x.to_le_bytes());
    }
    hex::encode(h.finalize())
}

impl CacheEntry {
    pub fn new(key: CacheKey, payload: Vec<u64>) -> Self {
        let digest = digest(&key, &payload);
        Self { key, payload, digest }
    }

    pub fn verify(&self) -> bool {
        digest(&self.key, &self.payload) == self.digest
    }
}

/// Result of a cache read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(Vec<u64>),
    Miss,
    /// Present but unusable; the reason is logged.
    Rejected(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub rejected: u64,
    pub writes: u64,
}

pub struct DiskCache {
    dir: PathBuf,
    schema_version: u32,
    writer: Mutex<()>,
    hits: AtomicU64,
    misses: AtomicU64,
    rejected: AtomicU64,
    writes: AtomicU64,
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CliError> {
        Self::open_with_version(dir, CACHE_SCHEMA_VERSION)
    }

    /// Open expecting entries of `schema_version`; others are rejected.
    pub fn open_with_version(dir: impl AsRef<Path>, schema_version: u32) -> Result<Self, CliError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let probe = dir.join(".write-probe");
        fs::write(&probe, b"").map_err(|e| CliError::io(&probe, e))?;
        let _ = fs::remove_file(&probe);
        Ok(Self {
            dir,
            schema_version,
            writer: Mutex::new(()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            rejected: AtomicU64::new(0),
            writes: AtomicU64::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(&self, p: u64, kind: &str, params: Vec<u64>) -> CacheKey {
        CacheKey { p, kind: kind.to_owned(), params, schema_version: self.schema_version }
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            rejected: self.rejected.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
        }
    }

    pub fn read(&self, key: &CacheKey) -> Lookup {
        let path = self.path_of(key);
        let lookup = match fs::read(&path) {
            Err(_) => Lookup::Miss,
            Ok(bytes) => match serde_json::from_slice::<CacheEntry>(&bytes) {
                Err(e) => Lookup::Rejected(format!("unreadable entry: {e}")),
                Ok(entry) if entry.key.schema_version != self.schema_version => Lookup::Rejected(format!(
                    "schema version {} does not match {}",
                    entry.key.schema_version, self.schema_version
                )),
                Ok(entry) if entry.key != *key => Lookup::Rejected("entry key does not match its file".into()),
                Ok(entry) if !entry.verify() => Lookup::Rejected("digest mismatch".into()),
                Ok(entry) => Lookup::Hit(entry.payload),
            },
        };
        match &lookup {
            Lookup::Hit(_) => self.hits.fetch_add(1, Ordering::Relaxed),
            Lookup::Miss => self.misses.fetch_add(1, Ordering::Relaxed),
            Lookup::Rejected(reason) => {
                warn!("cache entry {} rejected ({reason}); recomputing", path.display());
                self.rejected.fetch_add(1, Ordering::Relaxed)
            }
        };
        lookup
    }

    pub fn write(&self, entry: &CacheEntry) -> Result<(), CliError> {
        let path = self.path_of(&entry.key);
        let tmp = path.with_extension("json.tmp");
        let bytes = serde_json::to_vec(entry)?;
        let _guard = self.writer.lock().expect("cache writer poisoned");
        fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
        self.writes.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Write `entry` and read it back through the integrity check.
    pub fn roundtrip(&self, entry: &CacheEntry) -> Result<CacheEntry, CliError> {
        self.write(entry)?;
        match self.read(&entry.key) {
            Lookup::Hit(payload) => Ok(CacheEntry::new(entry.key.clone(), payload)),
            Lookup::Miss => Err(CliError::Usage(format!("{} vanished after write", self.path_of(&entry.key).display()))),
            Lookup::Rejected(reason) => Err(CliError::Serialize(reason)),
        }
    }

    /// Cached payload for `key`, or `compute` stored under it.
    pub fn get_or_compute<F>(&self, key: &CacheKey, compute: F) -> Result<Vec<u64>, CliError>
    where
        F: FnOnce() -> Result<Vec<u64>, CliError>,
    {
        if let Lookup::Hit(payload) = self.read(key) {
            return Ok(payload);
        }
        let payload = compute()?;
        self.write(&CacheEntry::new(key.clone(), payload.clone()))?;
        Ok(payload)
    }

    fn approximant_key(&self, key: &ApproximantKey) -> CacheKey {
        self.key(key.p, "approximant", vec![key.i, key.level as u64, key.precision as u64])
    }
}

impl ApproximantStore for DiskCache {
    fn load(&self, key: &ApproximantKey) -> Option<Vec<u64>> {
        match self.read(&self.approximant_key(key)) {
            Lookup::Hit(payload) => Some(payload),
            _ => None,
        }
    }

    fn store(&self, key: &ApproximantKey, coeffs: &[u64]) {
        let entry = CacheEntry::new(self.approximant_key(key), coeffs.to_vec());
        if let Err(e) = self.write(&entry) {
            warn!("could not persist approximant: {e}");
        }
    }
}
