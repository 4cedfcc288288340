use std::sync::Mutex;
use std::time::Duration;

use serde_json::Value;

use super::{Backend, Clock, SearchError, SystemClock, WebConfig};

/// Total tries per query on transport errors and HTTP 429.
pub const MAX_ATTEMPTS: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(500);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Minimal blocking HTTP GET.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, headers: &[(String, String)]) -> Result<HttpResponse, String>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(timeout: Duration) -> Result<Self, SearchError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("fraglead/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| SearchError::BackendUnavailable(e.to_string()))?;
        Ok(ReqwestTransport { client })
    }
}

impl Transport for ReqwestTransport {
    fn get(&self, url: &str, headers: &[(String, String)]) -> Result<HttpResponse, String> {
        let mut request = self.client.get(url);
        for (name, value) in headers {
            request = request.header(name, value);
        }
        // strip the URL from errors; it may carry an API key
        let response = request.send().map_err(|e| e.without_url().to_string())?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| e.without_url().to_string())?;
        Ok(HttpResponse { status, body })
    }
}

/// Spaces requests at least `1 / qps` apart.
pub struct RateLimiter<C> {
    clock: C,
    interval: Duration,
    next_slot: Mutex<Option<Duration>>,
}

impl<C: Clock> RateLimiter<C> {
    pub fn new(clock: C, qps: f64) -> Self {
        RateLimiter {
            clock,
            interval: Duration::from_secs_f64(1.0 / qps),
            next_slot: Mutex::new(None),
        }
    }

    pub fn clock(&self) -> &C {
        &self.clock
    }

    /// Block until a request may be issued; returns the issue time.
    pub fn acquire(&self) -> Duration {
        let mut next = self.next_slot.lock().unwrap();
        let now = self.clock.now();
        let issue = match *next {
            Some(slot) if slot > now => {
                self.clock.sleep(slot - now);
                slot
            }
            _ => now,
        };
        *next = Some(issue + self.interval);
        issue
    }
}

/// Follow a dot-separated path (`searchInformation.totalResults`,
/// `hits.0.count`) to a hit count. Numbers and digit strings (commas
/// allowed) are accepted.
pub fn extract_count(body: &str, path: &str) -> Result<u64, SearchError> {
    let missing = || SearchError::CountFieldMissing {
        path: path.to_owned(),
    };
    let root: Value = serde_json::from_str(body).map_err(|_| missing())?;
    let mut node = &root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
            _ => None,
        }
        .ok_or_else(missing)?;
    }
    match node {
        Value::Number(n) => n
            .as_u64()
            .or_else(|| {
                n.as_f64()
                    .filter(|f| *f >= 0.0 && f.fract() == 0.0)
                    .map(|f| f as u64)
            })
            .ok_or_else(missing),
        Value::String(s) => s.replace(',', "").trim().parse().map_err(|_| missing()),
        _ => Err(missing()),
    }
}

/// Hit counts from a JSON search API described by a [`WebConfig`].
pub struct WebBackend<T = ReqwestTransport, C = SystemClock> {
    config: WebConfig,
    api_key: Option<String>,
    transport: T,
    limiter: RateLimiter<C>,
}

impl<T: Transport, C: Clock> WebBackend<T, C> {
    /// `api_key` is substituted for `{api_key}` in the template and sent in
    /// `api_key_header` when configured.
    pub fn new(
        config: WebConfig,
        api_key: Option<String>,
        transport: T,
        clock: C,
    ) -> Result<Self, SearchError> {
        config.validate()?;
        if config.needs_api_key() && api_key.is_none() {
            return Err(SearchError::BackendUnavailable(format!(
                "API key required but environment variable {:?} is not set",
                config.api_key_env.as_deref().unwrap_or("")
            )));
        }
        let limiter = RateLimiter::new(clock, config.qps_limit);
        Ok(WebBackend {
            config,
            api_key,
            transport,
            limiter,
        })
    }

    pub fn config(&self) -> &WebConfig {
        &self.config
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    pub fn limiter(&self) -> &RateLimiter<C> {
        &self.limiter
    }

    /// Request URL for `query`, with the key substituted.
    pub fn url_for(&self, query: &str) -> String {
        let phrase = if self.config.exact_phrase {
            format!("\"{query}\"")
        } else {
            query.to_owned()
        };
        let encode =
            |s: &str| url::form_urlencoded::byte_serialize(s.as_bytes()).collect::<String>();
        let mut url = self
            .config
            .url_template
            .replace("{query}", &encode(&phrase));
        if let Some(key) = &self.api_key {
            url = url.replace("{api_key}", &encode(key));
        }
        url
    }

    fn headers(&self) -> Vec<(String, String)> {
        match (&self.config.api_key_header, &self.api_key) {
            (Some(name), Some(key)) => vec![(name.clone(), key.clone())],
            _ => Vec::new(),
        }
    }
}

impl<T: Transport, C: Clock> Backend for WebBackend<T, C> {
    fn id(&self) -> String {
        format!(
            "web:{}{}",
            self.config.url_template,
            if self.config.exact_phrase {
                "#exact"
            } else {
                ""
            }
        )
    }

    fn count(&self, query: &str) -> Result<u64, SearchError> {
        let url = self.url_for(query);
        let headers = self.headers();
        let mut last = SearchError::NetworkError("no attempt made".into());
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                self.limiter
                    .clock()
                    .sleep(BACKOFF_BASE * 2u32.pow(attempt - 1));
            }
            self.limiter.acquire();
            match self.transport.get(&url, &headers) {
                Err(e) => last = SearchError::NetworkError(e),
                Ok(r) if r.status == 429 => {
                    last = SearchError::RateLimited {
                        attempts: attempt + 1,
                    }
                }
                Ok(r) if (200..300).contains(&r.status) => {
                    return extract_count(&r.body, &self.config.count_path)
                }
                Ok(r) => {
                    return Err(SearchError::BackendUnavailable(format!(
                        "HTTP status {}",
                        r.status
                    )))
                }
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::super::ManualClock;
    use super::*;
    use std::sync::Arc;

    struct Scripted {
        replies: Mutex<Vec<Result<HttpResponse, String>>>,
        urls: Mutex<Vec<String>>,
    }

    impl Scripted {
        fn new(mut replies: Vec<Result<HttpResponse, String>>) -> Self {
            replies.reverse();
            Scripted {
                replies: Mutex::new(replies),
                urls: Mutex::new(Vec::new()),
            }
        }
    }

    impl Transport for Scripted {
        fn get(&self, url: &str, _: &[(String, String)]) -> Result<HttpResponse, String> {
            self.urls.lock().unwrap().push(url.to_owned());
            self.replies
                .lock()
                .unwrap()
                .pop()
                .unwrap_or_else(|| Err("script exhausted".into()))
        }
    }

    fn ok(body: &str) -> Result<HttpResponse, String> {
        Ok(HttpResponse {
            status: 200,
            body: body.into(),
        })
    }

    fn status(code: u16) -> Result<HttpResponse, String> {
        Ok(HttpResponse {
            status: code,
            body: String::new(),
        })
    }

    fn config(exact: bool) -> WebConfig {
        WebConfig {
            url_template: "http://search.test/q?s={query}&k={api_key}".into(),
            count_path: "total".into(),
            api_key_env: Some("KEY".into()),
            api_key_header: None,
            qps_limit: 2.0,
            exact_phrase: exact,
            max_in_flight: 1,
        }
    }

    #[test]
    fn count_paths() {
        assert_eq!(extract_count(r#"{"total": 42}"#, "total").unwrap(), 42);
        let body = r#"{"searchInformation": {"totalResults": "38,500,000"}}"#;
        assert_eq!(
            extract_count(body, "searchInformation.totalResults").unwrap(),
            38_500_000
        );
        assert_eq!(extract_count(r#"{"a": [{"n": 7.0}]}"#, "a.0.n").unwrap(), 7);
        for (body, path) in [
            (r#"{"total": 42}"#, "count"),
            (r#"{"total": -1}"#, "total"),
            (r#"{"total": "many"}"#, "total"),
            ("not json", "total"),
        ] {
            assert!(matches!(
                extract_count(body, path),
                Err(SearchError::CountFieldMissing { .. })
            ));
        }
    }

    #[test]
    fn exact_phrase_is_quoted_and_encoded() {
        let t = Scripted::new(vec![ok(r#"{"total": 1}"#)]);
        let b = WebBackend::new(config(true), Some("k&y".into()), t, ManualClock::new()).unwrap();
        assert_eq!(b.count("(N)=NC2").unwrap(), 1);
        let url = b.transport().urls.lock().unwrap()[0].clone();
        assert_eq!(url, "http://search.test/q?s=%22%28N%29%3DNC2%22&k=k%26y");

        let b = WebBackend::new(
            config(false),
            Some("k".into()),
            Scripted::new(vec![]),
            ManualClock::new(),
        )
        .unwrap();
        assert_eq!(b.url_for("C#N"), "http://search.test/q?s=C%23N&k=k");
    }

    #[test]
    fn missing_key_is_reported_without_request() {
        let err = WebBackend::new(
            config(false),
            None,
            Scripted::new(vec![]),
            ManualClock::new(),
        )
        .err()
        .unwrap();
        assert_eq!(err.code(), "BackendUnavailable");
    }

    #[test]
    fn retries_then_rate_limited() {
        let clock = Arc::new(ManualClock::new());
        let t = Scripted::new(vec![
            status(429),
            status(429),
            status(429),
            ok(r#"{"total": 5}"#),
        ]);
        let b = WebBackend::new(config(false), Some("k".into()), t, clock.clone()).unwrap();
        assert!(matches!(
            b.count("C"),
            Err(SearchError::RateLimited { attempts: 3 })
        ));
        assert_eq!(b.transport().urls.lock().unwrap().len(), 3);
        let backoffs: Vec<_> = clock
            .sleeps()
            .into_iter()
            .filter(|d| *d >= BACKOFF_BASE)
            .collect();
        assert_eq!(backoffs, [BACKOFF_BASE, BACKOFF_BASE * 2]);
    }

    #[test]
    fn transient_failure_recovers() {
        let t = Scripted::new(vec![Err("reset".into()), ok(r#"{"total": 9}"#)]);
        let b = WebBackend::new(config(false), Some("k".into()), t, ManualClock::new()).unwrap();
        assert_eq!(b.count("C").unwrap(), 9);
        let t = Scripted::new(vec![Err("a".into()), Err("b".into()), Err("c".into())]);
        let b = WebBackend::new(config(false), Some("k".into()), t, ManualClock::new()).unwrap();
        assert!(matches!(b.count("C"), Err(SearchError::NetworkError(m)) if m == "c"));
    }

    #[test]
    fn server_error_is_not_retried() {
        let t = Scripted::new(vec![status(503), ok(r#"{"total": 1}"#)]);
        let b = WebBackend::new(config(false), Some("k".into()), t, ManualClock::new()).unwrap();
        assert_eq!(b.count("C").unwrap_err().code(), "BackendUnavailable");
    }

    #[test]
    fn limiter_respects_qps_in_every_window() {
        let clock = ManualClock::new();
        let qps = 3.0;
        let limiter = RateLimiter::new(&clock, qps);
        let mut issued = Vec::new();
        for i in 0..40 {
            // irregular caller pacing
            clock.advance(Duration::from_millis([0, 10, 700, 50][i % 4]));
            issued.push(limiter.acquire());
        }
        let window = Duration::from_secs(2);
        for &start in &issued {
            let n = issued
                .iter()
                .filter(|&&t| t >= start && t < start + window)
                .count();
            assert!(
                n as f64 <= qps * window.as_secs_f64(),
                "{n} requests in window at {start:?}"
            );
        }
    }
}
