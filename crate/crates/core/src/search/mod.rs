//! Fragment queries against pluggable backends.
//!
//! A [`Backend`] turns a query string into a result-set size. Two are
//! provided: [`WebBackend`] calls any HTTP search API whose JSON response
//! carries a hit count, and [`CorpusBackend`] counts matching documents in
//! a local [`SubstringIndex`](crate::corpus::SubstringIndex). Results can
//! be memoized on disk by a [`QueryCache`].

mod cache;
mod clock;
mod config;
mod sweep;
mod web;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

pub use cache::{cached_execute, QueryCache, CACHE_FORMAT_VERSION};
pub use clock::{Clock, ManualClock, SystemClock};
pub use config::{BackendConfig, CorpusConfig, WebConfig};
pub use sweep::{sweep, SweepOptions};
pub use web::{
    extract_count, HttpResponse, RateLimiter, ReqwestTransport, Transport, WebBackend, MAX_ATTEMPTS,
};

use crate::corpus::{Corpus, CorpusError, SubstringIndex};
use crate::fragment::FragmentError;
use crate::smiles::SmilesError;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("empty query")]
    EmptyQuery,
    #[error("network error: {0}")]
    NetworkError(String),
    #[error("rate limited by remote after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("count field {path:?} missing from response")]
    CountFieldMissing { path: String },
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("invalid backend config: {0}")]
    InvalidConfig(String),
    #[error("query cache: {0}")]
    CacheIo(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

impl SearchError {
    pub fn code(&self) -> &'static str {
        match self {
            SearchError::EmptyQuery => "EmptyQuery",
            SearchError::NetworkError(_) => "NetworkError",
            SearchError::RateLimited { .. } => "RateLimited",
            SearchError::CountFieldMissing { .. } => "CountFieldMissing",
            SearchError::BackendUnavailable(_) => "BackendUnavailable",
            SearchError::InvalidConfig(_) => "InvalidConfig",
            SearchError::CacheIo(_) => "CacheIo",
            SearchError::Corpus(e) => e.code(),
            SearchError::Smiles(e) => e.code(),
            SearchError::Fragment(e) => e.code(),
        }
    }
}

/// Outcome of one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub query: String,
    pub result_set_size: u64,
    pub backend: String,
    /// Seconds since the Unix epoch when the backend answered.
    pub timestamp: u64,
    pub from_cache: bool,
}

pub trait Backend: Send + Sync {
    /// Stable identifier, used as part of the cache key.
    fn id(&self) -> String;

    /// Result-set size for `query`. Called only with non-empty queries.
    fn count(&self, query: &str) -> Result<u64, SearchError>;
}

impl<B: Backend + ?Sized> Backend for &B {
    fn id(&self) -> String {
        (**self).id()
    }

    fn count(&self, query: &str) -> Result<u64, SearchError> {
        (**self).count(query)
    }
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn count(&self, query: &str) -> Result<u64, SearchError> {
        (**self).count(query)
    }
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Run one query directly against the backend.
pub fn execute(backend: &dyn Backend, query: &str) -> Result<QueryResult, SearchError> {
    if query.is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let result_set_size = backend.count(query)?;
    Ok(QueryResult {
        query: query.to_owned(),
        result_set_size,
        backend: backend.id(),
        timestamp: unix_now(),
        from_cache: false,
    })
}

/// Distinct-document counts over a local corpus.
pub struct CorpusBackend {
    id: String,
    index: SubstringIndex,
}

impl CorpusBackend {
    pub fn new(id: impl Into<String>, corpus: &Corpus) -> Result<Self, CorpusError> {
        Ok(CorpusBackend {
            id: id.into(),
            index: SubstringIndex::build(corpus)?,
        })
    }

    pub fn index(&self) -> &SubstringIndex {
        &self.index
    }
}

impl Backend for CorpusBackend {
    fn id(&self) -> String {
        format!("corpus:{}", self.id)
    }

    fn count(&self, query: &str) -> Result<u64, SearchError> {
        Ok(self.index.count_documents(query)? as u64)
    }
}

/// Wraps a backend and counts the calls that reach it.
pub struct CountingBackend<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B: Backend> CountingBackend<B> {
    pub fn new(inner: B) -> Self {
        CountingBackend {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: Backend> Backend for CountingBackend<B> {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn count(&self, query: &str) -> Result<u64, SearchError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.count(query)
    }
}
