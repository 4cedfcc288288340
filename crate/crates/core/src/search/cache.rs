//! Persistent query cache.
//!
//! Stored as JSON, entries sorted by backend then query:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "entries": [
//!     { "backend": "corpus:docs", "query": "NC", "result_set_size": 3, "timestamp": 1760572800 }
//!   ]
//! }
//! ```
//!
//! API keys never enter the cache: backend ids are built from the URL
//! template, not the substituted URL.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::{execute, Backend, QueryResult, SearchError};

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    backend: String,
    query: String,
    result_set_size: u64,
    timestamp: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheFile {
    format_version: u32,
    entries: Vec<Entry>,
}

type Key = (String, String);

pub struct QueryCache {
    path: Option<PathBuf>,
    entries: RwLock<BTreeMap<Key, Entry>>,
    write: Mutex<()>,
    refresh: bool,
}

impl QueryCache {
    /// A cache that is never written to disk.
    pub fn in_memory() -> Self {
        QueryCache {
            path: None,
            entries: RwLock::new(BTreeMap::new()),
            write: Mutex::new(()),
            refresh: false,
        }
    }

    /// Open (or start) the cache file at `path`. A missing file is an
    /// empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, SearchError> {
        let path = path.as_ref().to_owned();
        let mut entries = BTreeMap::new();
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                let file: CacheFile = serde_json::from_str(&text)
                    .map_err(|e| SearchError::CacheIo(format!("{}: {e}", path.display())))?;
                if file.format_version != CACHE_FORMAT_VERSION {
                    return Err(SearchError::CacheIo(format!(
                        "{}: unsupported format_version {}",
                        path.display(),
                        file.format_version
                    )));
                }
                for e in file.entries {
                    entries.insert((e.backend.clone(), e.query.clone()), e);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(SearchError::CacheIo(format!("{}: {e}", path.display()))),
        }
        Ok(QueryCache {
            path: Some(path),
            entries: RwLock::new(entries),
            write: Mutex::new(()),
            refresh: false,
        })
    }

    /// Ignore stored entries on lookup; fresh results still overwrite them.
    pub fn with_refresh(mut self, refresh: bool) -> Self {
        self.refresh = refresh;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, backend: &str, query: &str) -> Option<QueryResult> {
        if self.refresh {
            return None;
        }
        let entries = self.entries.read().unwrap();
        entries
            .get(&(backend.to_owned(), query.to_owned()))
            .map(|e| QueryResult {
                query: e.query.clone(),
                result_set_size: e.result_set_size,
                backend: e.backend.clone(),
                timestamp: e.timestamp,
                from_cache: true,
            })
    }

    pub fn insert(&self, result: &QueryResult) -> Result<(), SearchError> {
        let _guard = self.write.lock().unwrap();
        let entry = Entry {
            backend: result.backend.clone(),
            query: result.query.clone(),
            result_set_size: result.result_set_size,
            timestamp: result.timestamp,
        };
        self.entries
            .write()
            .unwrap()
            .insert((entry.backend.clone(), entry.query.clone()), entry);
        self.persist()
    }

    fn persist(&self) -> Result<(), SearchError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let file = CacheFile {
            format_version: CACHE_FORMAT_VERSION,
            entries: self.entries.read().unwrap().values().cloned().collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("cache serializes");
        text.push('\n');
        let io = |e: std::io::Error| SearchError::CacheIo(format!("{}: {e}", path.display()));
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }
}

/// Serve from `cache` when possible; otherwise query the backend and
/// store the answer.
pub fn cached_execute(
    cache: &QueryCache,
    backend: &dyn Backend,
    query: &str,
) -> Result<QueryResult, SearchError> {
    if query.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    if let Some(hit) = cache.get(&backend.id(), query) {
        return Ok(hit);
    }
    let result = execute(backend, query)?;
    cache.insert(&result)?;
    Ok(result)
}
