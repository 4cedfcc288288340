//! Backend configuration files (TOML).
//!
//! ```toml
//! kind = "web"
//! url_template = "https://api.example.com/search?key={api_key}&q={query}"
//! count_path = "searchInformation.totalResults"
//! api_key_env = "FRAGLEAD_API_KEY"
//! qps_limit = 1.0
//! exact_phrase = true
//! ```
//!
//! ```toml
//! kind = "corpus"
//! corpus = "./docs"
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;

use super::{Backend, CorpusBackend, ReqwestTransport, SearchError, SystemClock, WebBackend};
use crate::corpus::Corpus;

fn default_qps() -> f64 {
    1.0
}

fn default_in_flight() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebConfig {
    /// Request URL with one `{query}` placeholder and optionally `{api_key}`.
    pub url_template: String,
    /// Dot-separated path to the hit count in the JSON response.
    pub count_path: String,
    /// Environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
    /// Header to carry the API key, for APIs that do not take it in the URL.
    #[serde(default)]
    pub api_key_header: Option<String>,
    #[serde(default = "default_qps")]
    pub qps_limit: f64,
    /// Wrap queries in double quotes.
    #[serde(default)]
    pub exact_phrase: bool,
    /// Concurrent requests during a sweep.
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

impl WebConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let placeholders = self.url_template.matches("{query}").count();
        if placeholders != 1 {
            return Err(SearchError::InvalidConfig(format!(
                "url_template must contain exactly one {{query}} placeholder, found {placeholders}"
            )));
        }
        if !(self.qps_limit > 0.0 && self.qps_limit.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "qps_limit must be positive, got {}",
                self.qps_limit
            )));
        }
        if self.count_path.is_empty() {
            return Err(SearchError::InvalidConfig("count_path is empty".into()));
        }
        if self.max_in_flight == 0 {
            return Err(SearchError::InvalidConfig(
                "max_in_flight must be at least 1".into(),
            ));
        }
        if self.needs_api_key() && self.api_key_env.is_none() {
            return Err(SearchError::InvalidConfig(
                "api key used but api_key_env is not set".into(),
            ));
        }
        Ok(())
    }

    pub fn needs_api_key(&self) -> bool {
        self.url_template.contains("{api_key}") || self.api_key_header.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    /// Directory of documents or line-delimited file, relative to the
    /// config file.
    pub corpus: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendConfig {
    Web(WebConfig),
    Corpus(CorpusConfig),
}

impl BackendConfig {
    pub fn from_toml(text: &str) -> Result<Self, SearchError> {
        let config: BackendConfig =
            toml::from_str(text).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
        if let BackendConfig::Web(web) = &config {
            web.validate()?;
        }
        Ok(config)
    }

    /// Load a config file; a relative corpus path is resolved against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SearchError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SearchError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        if let BackendConfig::Corpus(c) = &mut config {
            if c.corpus.is_relative() {
                if let Some(dir) = path.parent() {
                    c.corpus = dir.join(&c.corpus);
                }
            }
        }
        Ok(config)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BackendConfig::Web(_) => "web",
            BackendConfig::Corpus(_) => "corpus",
        }
    }

    pub fn max_in_flight(&self) -> usize {
        match self {
            BackendConfig::Web(w) => w.max_in_flight,
            BackendConfig::Corpus(_) => 1,
        }
    }

    /// Instantiate the backend. The web API key is read from the
    /// configured environment variable.
    pub fn build(&self) -> Result<Box<dyn Backend>, SearchError> {
        match self {
            BackendConfig::Web(web) => {
                let key = web
                    .api_key_env
                    .as_ref()
                    .and_then(|name| std::env::var(name).ok())
                    .filter(|k| !k.is_empty());
                let transport = ReqwestTransport::new(Duration::from_secs(30))?;
                Ok(Box::new(WebBackend::new(
                    web.clone(),
                    key,
                    transport,
                    SystemClock::default(),
                )?))
            }
            BackendConfig::Corpus(c) => {
                let corpus = Corpus::load(&c.corpus)?;
                Ok(Box::new(CorpusBackend::new(
                    c.corpus.display().to_string(),
                    &corpus,
                )?))
            }
        }
    }
}
