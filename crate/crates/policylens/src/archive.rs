//! Wayback Machine CDX client behind a pluggable fetcher.
//!
//! Queries target one snapshot per year for the last ten years plus
//! month-start dates around configured regulation events. All network
//! access goes through the [`Fetcher`] trait; the test suite only ever
//! uses recorded fixtures.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One archived capture of a URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRef {
    pub original_url: String,
    /// YYYYMMDDhhmmss
    pub capture_timestamp: String,
    pub archive_url: String,
    pub status_code: u16,
}

/// The dates at which a target URL will be queried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub target_url: String,
    pub dates: Vec<NaiveDate>,
}

/// A named regulation taking effect on a date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegulationEvent {
    pub name: String,
    pub date: NaiveDate,
}

/// GDPR (2018-05-25) and CCPA (2020-01-01).
pub fn default_events() -> Vec<RegulationEvent> {
    vec![
        RegulationEvent {
            name: "GDPR".into(),
            date: NaiveDate::from_ymd_opt(2018, 5, 25).expect("valid date"),
        },
        RegulationEvent {
            name: "CCPA".into(),
            date: NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date"),
        },
    ]
}

/// Build the query plan: `today` minus 1..=10 years (Feb-29 clamped to
/// Feb-28), plus month-start dates within `months_around` months of each
/// event. Sorted and duplicate-free.
pub fn plan_queries(
    url: &str,
    today: NaiveDate,
    events: &[RegulationEvent],
    months_around: u32,
) -> QueryPlan {
    let mut dates = Vec::new();
    for back in 1..=10 {
        let year = today.year() - back;
        let date = NaiveDate::from_ymd_opt(year, today.month(), today.day())
            .or_else(|| NaiveDate::from_ymd_opt(year, today.month(), 28))
            .expect("clamped day always valid");
        dates.push(date);
    }
    for event in events {
        let base = (event.date.year(), event.date.month());
        for offset in -(months_around as i32)..=months_around as i32 {
            let total = base.0 * 12 + base.1 as i32 - 1 + offset;
            let (year, month) = (total.div_euclid(12), total.rem_euclid(12) as u32 + 1);
            dates.push(NaiveDate::from_ymd_opt(year, month, 1).expect("month starts exist"));
        }
    }
    dates.sort();
    dates.dedup();
    QueryPlan { target_url: url.to_string(), dates }
}

// ---------------------------------------------------------------------------
// Fetcher plumbing
// ---------------------------------------------------------------------------

/// A fetched HTTP response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

/// Minimal HTTP GET abstraction.
pub trait Fetcher: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse>;
}

/// Recorded request→response pairs, loaded from JSON
/// `{url: {"status": u16, "body": "..."}}`.
#[derive(Debug, Clone, Default)]
pub struct FixtureFetcher {
    responses: HashMap<String, HttpResponse>,
}

#[derive(Deserialize)]
struct FixtureEntry {
    status: u16,
    body: String,
}

impl FixtureFetcher {
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: HashMap<String, FixtureEntry> = serde_json::from_str(json)?;
        let responses = raw
            .into_iter()
            .map(|(url, e)| (url, HttpResponse { status: e.status, body: e.body.into_bytes() }))
            .collect();
        Ok(Self { responses })
    }

    pub fn insert(&mut self, url: &str, status: u16, body: &str) {
        self.responses
            .insert(url.to_string(), HttpResponse { status, body: body.as_bytes().to_vec() });
    }
}

impl Fetcher for FixtureFetcher {
    fn get(&self, url: &str) -> Result<HttpResponse> {
        self.responses
            .get(url)
            .cloned()
            .ok_or_else(|| Error::Fetch { url: url.to_string(), message: "no fixture recorded".into() })
    }
}

/// Live fetcher over a blocking HTTP client.
pub struct LiveFetcher {
    client: reqwest::blocking::Client,
}

impl LiveFetcher {
    pub fn new() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("policylens/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Fetch { url: String::new(), message: e.to_string() })?;
        Ok(Self { client })
    }
}

impl Fetcher for LiveFetcher {
    fn get(&self, url: &str) -> Result<HttpResponse> {
        let response = self
            .client
            .get(url)
            .send()
            .map_err(|e| Error::Fetch { url: url.to_string(), message: e.to_string() })?;
        let status = response.status().as_u16();
        let body = response
            .bytes()
            .map_err(|e| Error::Fetch { url: url.to_string(), message: e.to_string() })?
            .to_vec();
        Ok(HttpResponse { status, body })
    }
}

/// Per-host rate limiting wrapper (default one request per second).
pub struct RateLimitedFetcher<F> {
    inner: F,
    min_interval: Duration,
    last_request: Mutex<HashMap<String, Instant>>,
}

impl<F: Fetcher> RateLimitedFetcher<F> {
    pub fn new(inner: F, min_interval: Duration) -> Self {
        Self { inner, min_interval, last_request: Mutex::new(HashMap::new()) }
    }

    pub fn per_second(inner: F) -> Self {
        Self::new(inner, Duration::from_secs(1))
    }
}

impl<F: Fetcher> Fetcher for RateLimitedFetcher<F> {
    fn get(&self, url: &str) -> Result<HttpResponse> {
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default();
        let wait = {
            let mut last = self.last_request.lock().expect("rate limiter lock");
            let now = Instant::now();
            let wait = last
                .get(&host)
                .and_then(|&t| self.min_interval.checked_sub(now.duration_since(t)))
                .unwrap_or(Duration::ZERO);
            last.insert(host, now + wait);
            wait
        };
        if wait > Duration::ZERO {
            std::thread::sleep(wait);
        }
        self.inner.get(url)
    }
}

// ---------------------------------------------------------------------------
// CDX queries
// ---------------------------------------------------------------------------

/// Archive endpoints and retry policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchiveConfig {
    /// e.g. "https://web.archive.org"
    pub base_url: String,
    pub max_retries: u32,
    /// base backoff delay in milliseconds (doubles per attempt)
    pub backoff_ms: u64,
}

impl Default for ArchiveConfig {
    fn default() -> Self {
        Self { base_url: "https://web.archive.org".into(), max_retries: 3, backoff_ms: 250 }
    }
}

impl ArchiveConfig {
    /// CDX query URL for captures within a year of the requested date.
    pub fn cdx_url(&self, target: &str, date: NaiveDate) -> String {
        let from = date - chrono::Duration::days(365);
        let to = date + chrono::Duration::days(365);
        format!(
            "{}/cdx/search/cdx?url={}&from={}&to={}&output=json",
            self.base_url.trim_end_matches('/'),
            target,
            from.format("%Y%m%d"),
            to.format("%Y%m%d"),
        )
    }

    pub fn archive_url(&self, timestamp: &str, original: &str) -> String {
        format!("{}/web/{}/{}", self.base_url.trim_end_matches('/'), timestamp, original)
    }
}

/// The capture closest to the requested date, with its distance in days.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestSnapshot {
    pub snapshot: SnapshotRef,
    pub day_distance: i64,
}

/// Query the CDX index and select the capture minimizing the distance to
/// `date` (ties take the earlier capture). HTTP failures are retried with
/// exponential backoff up to `config.max_retries`; malformed CDX rows are
/// skipped with a warning.
pub fn nearest_snapshot<F: Fetcher>(
    url: &str,
    date: NaiveDate,
    fetcher: &F,
    config: &ArchiveConfig,
) -> Result<Option<NearestSnapshot>> {
    let query = config.cdx_url(url, date);
    let response = get_with_retry(fetcher, &query, config)?;
    if response.status != 200 {
        return Err(Error::SnapshotStatus { url: query, status: response.status });
    }
    let body = String::from_utf8_lossy(&response.body);
    let captures = parse_cdx(&body, config);
    Ok(select_nearest(captures, date))
}

fn get_with_retry<F: Fetcher>(fetcher: &F, url: &str, config: &ArchiveConfig) -> Result<HttpResponse> {
    let mut attempt = 0;
    loop {
        match fetcher.get(url) {
            Ok(r) => return Ok(r),
            Err(e) if attempt < config.max_retries => {
                let delay = Duration::from_millis(config.backoff_ms << attempt);
                log::warn!("fetch attempt {} failed for {url}: {e}; retrying", attempt + 1);
                std::thread::sleep(delay);
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Parse a CDX response in either the JSON-array or space-separated text
/// format. Rows whose timestamp or status do not parse are skipped.
pub fn parse_cdx(body: &str, config: &ArchiveConfig) -> Vec<SnapshotRef> {
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    if trimmed.starts_with('[') {
        match serde_json::from_str::<Vec<Vec<String>>>(trimmed) {
            Ok(mut parsed) => {
                // First row is the column header.
                if !parsed.is_empty() {
                    parsed.remove(0);
                }
                rows = parsed;
            }
            Err(e) => {
                log::warn!("unparseable CDX JSON body: {e}");
                return Vec::new();
            }
        }
    } else {
        for line in trimmed.lines() {
            rows.push(line.split_whitespace().map(str::to_string).collect());
        }
    }

    let mut captures = Vec::new();
    for row in rows {
        // urlkey timestamp original mimetype statuscode digest length
        if row.len() < 5 {
            log::warn!("skipping short CDX row: {row:?}");
            continue;
        }
        let timestamp = row[1].clone();
        if timestamp.len() != 14 || capture_date(&timestamp).is_none() {
            log::warn!("skipping CDX row with bad timestamp {timestamp:?}");
            continue;
        }
        let status_code = match row[4].parse::<u16>() {
            Ok(s) => s,
            Err(_) => {
                log::warn!("skipping CDX row with bad status {:?}", row[4]);
                continue;
            }
        };
        let original_url = row[2].clone();
        captures.push(SnapshotRef {
            archive_url: config.archive_url(&timestamp, &original_url),
            original_url,
            capture_timestamp: timestamp,
            status_code,
        });
    }
    captures
}

fn capture_date(timestamp: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(&timestamp[..8], "%Y%m%d").ok()
}

fn select_nearest(captures: Vec<SnapshotRef>, date: NaiveDate) -> Option<NearestSnapshot> {
    captures
        .into_iter()
        .filter_map(|snapshot| {
            let d = capture_date(&snapshot.capture_timestamp)?;
            let day_distance = (d - date).num_days().abs();
            Some(NearestSnapshot { snapshot, day_distance })
        })
        .min_by(|a, b| {
            a.day_distance
                .cmp(&b.day_distance)
                .then_with(|| a.snapshot.capture_timestamp.cmp(&b.snapshot.capture_timestamp))
        })
}

const TOOLBAR_BEGIN: &str = "<!-- BEGIN WAYBACK TOOLBAR INSERT -->";
const TOOLBAR_END: &str = "<!-- END WAYBACK TOOLBAR INSERT -->";

/// Fetch the archived page body, stripping the injected Wayback toolbar.
/// Non-200 responses surface as [`Error::SnapshotStatus`] with the
/// snapshot context.
pub fn fetch_snapshot<F: Fetcher>(reference: &SnapshotRef, fetcher: &F) -> Result<Vec<u8>> {
    let response = fetcher.get(&reference.archive_url)?;
    if response.status != 200 {
        return Err(Error::SnapshotStatus {
            url: reference.archive_url.clone(),
            status: response.status,
        });
    }
    let body = String::from_utf8_lossy(&response.body).into_owned();
    Ok(strip_toolbar(&body).into_bytes())
}

fn strip_toolbar(body: &str) -> String {
    match (body.find(TOOLBAR_BEGIN), body.find(TOOLBAR_END)) {
        (Some(start), Some(end)) if end >= start => {
            let mut out = String::with_capacity(body.len());
            out.push_str(&body[..start]);
            out.push_str(&body[end + TOOLBAR_END.len()..]);
            out
        }
        _ => body.to_string(),
    }
}
