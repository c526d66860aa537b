//! Product-page parsing, IoT scoring, and manufacturer-website resolution.
//!
//! Product listings are parsed with per-platform selector profiles. A
//! product's description is scored for "smartness" against a weighted
//! keyword list; any high-confidence term (e.g. "alexa") short-circuits to
//! a score of 1.0. Manufacturer sites are resolved by comparing the
//! manufacturer name against the registrable domain of each search result
//! with Ratcliff/Obershelp similarity.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use url::Url;

use crate::error::{Error, Result};
use crate::html::Document;
use crate::text::{self, PhraseMatcher, Stopwords};

/// Built-in keyword weights and high-confidence terms.
pub const IOT_KEYWORDS_JSON: &str = include_str!("../assets/iot_keywords.json");

/// Weighted keyword configuration for [`score_iot`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IotScoreConfig {
    /// word -> weight in (0, 1]
    pub keyword_weights: BTreeMap<String, f64>,
    /// phrases that force `is_smart` regardless of the weighted score
    pub high_confidence_terms: Vec<String>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_cap")]
    pub per_keyword_count_cap: usize,
}

fn default_threshold() -> f64 {
    0.4
}

fn default_cap() -> usize {
    3
}

impl Default for IotScoreConfig {
    fn default() -> Self {
        serde_json::from_str(IOT_KEYWORDS_JSON).expect("built-in keyword config is valid")
    }
}

impl IotScoreConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(json)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (word, &w) in &self.keyword_weights {
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::Invariant(format!("weight for {word:?} outside (0,1]: {w}")));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Invariant(format!("threshold outside (0,1): {}", self.threshold)));
        }
        Ok(())
    }
}

/// Outcome of scoring one product description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IotScore {
    pub score: f64,
    pub is_smart: bool,
    pub matched_terms: Vec<String>,
}

/// Score a description for IoT-relevant vocabulary.
///
/// High-confidence phrases (word-boundary, case-insensitive) force
/// `score = 1.0`. Otherwise tokens are lowercased, stopword-filtered, and
/// plural-folded, and the score is
/// `min(1, sum_k w_k * min(count_k, cap) / Z)` with
/// `Z = sum over matched keywords of w_k * cap` (1 when nothing matches),
/// so a product that saturates every matched keyword scores 1.0.
pub fn score_iot(description: &str, config: &IotScoreConfig) -> IotScore {
    let high = PhraseMatcher::new(&config.high_confidence_terms);
    let tokens = text::words(description);
    let high_hits = high.find(&tokens);
    if !high_hits.is_empty() {
        let mut matched: Vec<String> = high_hits
            .iter()
            .map(|&(start, len)| tokens[start..start + len].join(" "))
            .collect();
        matched.dedup();
        return IotScore { score: 1.0, is_smart: true, matched_terms: matched };
    }

    let stopwords = Stopwords::english();
    let cap = config.per_keyword_count_cap.max(1);
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    for token in &tokens {
        if stopwords.contains(token) {
            continue;
        }
        let folded = text::fold_plural(token);
        if let Some((key, _)) = config.keyword_weights.get_key_value(folded.as_str()) {
            let c = counts.entry(key.as_str()).or_insert(0);
            if *c == 0 {
                order.push(key.clone());
            }
            *c += 1;
        }
    }

    if counts.is_empty() {
        return IotScore { score: 0.0, is_smart: false, matched_terms: Vec::new() };
    }
    let mut numerator = 0.0;
    let mut z = 0.0;
    for (key, &count) in &counts {
        let w = config.keyword_weights[*key];
        numerator += w * count.min(cap) as f64;
        z += w * cap as f64;
    }
    let score = (numerator / z).min(1.0);
    IotScore { score, is_smart: score >= config.threshold, matched_terms: order }
}

// ---------------------------------------------------------------------------
// Ratcliff/Obershelp similarity
// ---------------------------------------------------------------------------

/// Gestalt pattern matching: `2 * M / (|a| + |b|)` where `M` accumulates
/// matched characters from recursive longest-common-substring
/// decomposition. Ties between equally long blocks are broken by the
/// earliest start in `a`, then in `b`. Two empty strings score 1.0.
pub fn ratcliff_obershelp(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    let matched = matched_chars(&a, &b);
    2.0 * matched as f64 / total as f64
}

fn matched_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (len, a_start, b_start) = longest_common_block(a, b);
    if len == 0 {
        return 0;
    }
    len + matched_chars(&a[..a_start], &b[..b_start])
        + matched_chars(&a[a_start + len..], &b[b_start + len..])
}

/// Longest common substring via suffix-length DP; O(|a|*|b|) time,
/// O(|b|) space.
fn longest_common_block(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0usize, 0usize, 0usize);
    let mut prev = vec![0usize; b.len() + 1];
    let mut row = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            row[j + 1] = if ca == cb { prev[j] + 1 } else { 0 };
            let len = row[j + 1];
            if len > 0 {
                let start = (i + 1 - len, j + 1 - len);
                if len > best.0
                    || (len == best.0 && (start.0, start.1) < (best.1, best.2))
                {
                    best = (len, start.0, start.1);
                }
            }
        }
        std::mem::swap(&mut prev, &mut row);
    }
    best
}

// ---------------------------------------------------------------------------
// Manufacturer website resolution
// ---------------------------------------------------------------------------

/// One page of search results for a query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResultPage {
    pub query: String,
    pub result_urls: Vec<String>,
}

/// Source of search results. Live engines and recorded fixtures share
/// this interface; tests only ever use fixtures.
pub trait SearchProvider {
    fn search(&self, query: &str) -> Result<SearchResultPage>;
}

/// Fixture-backed provider loaded from JSON `{query: [urls]}`.
#[derive(Debug, Clone, Default)]
pub struct FixtureSearchProvider {
    map: HashMap<String, Vec<String>>,
}

impl FixtureSearchProvider {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(Self { map: serde_json::from_str(json)? })
    }

    pub fn insert(&mut self, query: &str, urls: Vec<String>) {
        self.map.insert(query.to_string(), urls);
    }
}

impl SearchProvider for FixtureSearchProvider {
    fn search(&self, query: &str) -> Result<SearchResultPage> {
        let result_urls = self.map.get(query).cloned().unwrap_or_default();
        Ok(SearchResultPage { query: query.to_string(), result_urls })
    }
}

/// A resolved manufacturer website.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSite {
    pub url: String,
    pub resolution_score: f64,
}

/// Find the manufacturer's official website among search results.
///
/// Each result URL is scored as the Ratcliff/Obershelp similarity between
/// the normalized manufacturer name and the registrable-domain label of
/// the URL. The best URL is returned only when its score reaches
/// `threshold` (the paper operates at 0.8).
pub fn resolve_manufacturer_site<P: SearchProvider>(
    name: &str,
    device_type: &str,
    provider: &P,
    threshold: f64,
) -> Result<Option<ResolvedSite>> {
    let query = format!("{name} {device_type}");
    let page = provider.search(&query)?;
    let target = normalize_name(name);
    let mut best: Option<ResolvedSite> = None;
    for raw in &page.result_urls {
        let Some(domain) = registrable_domain_label(raw) else {
            continue;
        };
        let score = ratcliff_obershelp(&target, &domain);
        if best.as_ref().map_or(true, |b| score > b.resolution_score) {
            best = Some(ResolvedSite { url: raw.clone(), resolution_score: score });
        }
    }
    Ok(best.filter(|b| b.resolution_score >= threshold))
}

/// Lowercase and strip everything that is not a letter or digit.
pub fn normalize_name(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Registrable-domain label: the eTLD+1 without its public suffix, e.g.
/// "fitbit" for `https://www.fitbit.com/health` and for
/// `https://shop.fitbit.co.uk/`.
pub fn registrable_domain_label(raw_url: &str) -> Option<String> {
    let url = Url::parse(raw_url).ok()?;
    let host = url.host_str()?.to_lowercase();
    if host.parse::<std::net::IpAddr>().is_ok() {
        return Some(host);
    }
    let labels: Vec<&str> = host.split('.').filter(|l| !l.is_empty()).collect();
    if labels.is_empty() {
        return None;
    }
    if labels.len() == 1 {
        return Some(labels[0].to_string());
    }
    // Longest matching public suffix, two labels preferred over one.
    let two = labels[labels.len().saturating_sub(2)..].join(".");
    let suffix_len = if labels.len() >= 3 && TWO_LEVEL_SUFFIXES.contains(&two.as_str()) {
        2
    } else {
        1
    };
    Some(labels[labels.len() - suffix_len - 1].to_string())
}

const TWO_LEVEL_SUFFIXES: &[&str] = &[
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk", "ltd.uk", "plc.uk", "com.au",
    "net.au", "org.au", "edu.au", "gov.au", "co.nz", "net.nz", "org.nz", "co.jp", "ne.jp",
    "or.jp", "ac.jp", "go.jp", "com.cn", "net.cn", "org.cn", "gov.cn", "com.br", "net.br",
    "org.br", "com.mx", "com.ar", "com.tr", "co.in", "net.in", "org.in", "co.kr", "or.kr",
    "com.sg", "com.hk", "co.za", "com.tw", "com.my", "co.th", "com.vn", "com.ua", "co.il",
    "com.pl", "com.ru",
];

// ---------------------------------------------------------------------------
// Product extraction
// ---------------------------------------------------------------------------

/// Declarative per-platform selector profile. Selector values use the
/// CSS subset documented in [`crate::html`]. Fields other than `product`
/// are resolved within each product tile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlatformProfile {
    /// selector for one product tile
    pub product: String,
    /// selector for the anchor carrying the product link
    pub url: String,
    pub title: String,
    pub description: String,
    pub manufacturer: String,
    #[serde(default)]
    pub origin_country: Option<String>,
    /// base used to absolutize relative product links
    #[serde(default)]
    pub base_url: Option<String>,
}

impl PlatformProfile {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// One product scraped from a listing page.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductListing {
    pub product_url: String,
    pub title: String,
    pub description: String,
    pub manufacturer_name: String,
    pub origin_country: Option<String>,
}

/// Extract product tiles from a listing page.
///
/// Matching nothing is not an error: listings legitimately run empty, so
/// an empty list is returned and a warning logged. Duplicate product URLs
/// are collapsed, keeping the first occurrence.
pub fn extract_products(html: &str, profile: &PlatformProfile) -> Vec<ProductListing> {
    let doc = Document::parse(html);
    let base = profile.base_url.as_deref().and_then(|b| Url::parse(b).ok());
    let tiles = doc.select(&profile.product);
    if tiles.is_empty() {
        log::warn!("product selector {:?} matched nothing", profile.product);
        return Vec::new();
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for tile in tiles {
        let href = doc
            .select_within(tile, &profile.url)
            .into_iter()
            .find_map(|n| doc.attr(n, "href").map(str::to_string));
        let Some(href) = href else {
            log::warn!("tile without link selector match skipped");
            continue;
        };
        let absolute = match absolutize(&href, base.as_ref()) {
            Some(u) => u,
            None => {
                log::warn!("skipping unresolvable product href {href:?}");
                continue;
            }
        };
        if !seen.insert(absolute.clone()) {
            continue;
        }
        let text_for = |selector: &str| -> String {
            doc.select_within(tile, selector)
                .first()
                .map(|&n| doc.text_of(n))
                .unwrap_or_default()
                .trim()
                .to_string()
        };
        let origin_country = profile
            .origin_country
            .as_deref()
            .map(text_for)
            .filter(|s| !s.is_empty())
            .map(|s| country_code(&s));
        out.push(ProductListing {
            product_url: absolute,
            title: text_for(&profile.title),
            description: text_for(&profile.description),
            manufacturer_name: text_for(&profile.manufacturer),
            origin_country,
        });
    }
    out
}

fn absolutize(href: &str, base: Option<&Url>) -> Option<String> {
    if let Ok(url) = Url::parse(href) {
        return Some(url.to_string());
    }
    base.and_then(|b| b.join(href).ok()).map(|u| u.to_string())
}

/// Map a country name (or code) to ISO-3166 alpha-2; "unknown" otherwise.
pub fn country_code(name: &str) -> String {
    let key = name.trim().to_lowercase();
    if key.len() == 2 && key.chars().all(|c| c.is_ascii_alphabetic()) {
        return key.to_uppercase();
    }
    let table: &[(&str, &str)] = &[
        ("united states", "US"),
        ("usa", "US"),
        ("america", "US"),
        ("china", "CN"),
        ("germany", "DE"),
        ("france", "FR"),
        ("spain", "ES"),
        ("italy", "IT"),
        ("portugal", "PT"),
        ("united kingdom", "GB"),
        ("great britain", "GB"),
        ("england", "GB"),
        ("japan", "JP"),
        ("south korea", "KR"),
        ("korea", "KR"),
        ("canada", "CA"),
        ("mexico", "MX"),
        ("brazil", "BR"),
        ("india", "IN"),
        ("australia", "AU"),
        ("netherlands", "NL"),
        ("sweden", "SE"),
        ("norway", "NO"),
        ("denmark", "DK"),
        ("finland", "FI"),
        ("poland", "PL"),
        ("switzerland", "CH"),
        ("austria", "AT"),
        ("belgium", "BE"),
        ("ireland", "IE"),
        ("taiwan", "TW"),
        ("vietnam", "VN"),
        ("hong kong", "HK"),
        ("israel", "IL"),
        ("russia", "RU"),
        ("czech republic", "CZ"),
        ("hungary", "HU"),
    ];
    table
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, code)| code.to_string())
        .unwrap_or_else(|| "unknown".to_string())
}
