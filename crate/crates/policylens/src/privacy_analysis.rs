//! Policy-level privacy insights: keyword coverage, last-update
//! detection, and device-mention detection.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::text::{self, PhraseMatcher, SentenceSplitter};
use crate::topics::{keyword_counts, KeywordTaxonomy};

/// Built-in per-category device terms.
pub const CATEGORY_TERMS_JSON: &str = include_str!("../assets/category_terms.json");

/// Coverage of one taxonomy attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeCoverage {
    pub count: usize,
    pub normalized_freq: f64,
    pub covered: bool,
}

/// Per-attribute keyword coverage for one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordCoverageReport {
    pub attributes: BTreeMap<String, AttributeCoverage>,
    /// covered attributes / total attributes
    pub coverage_fraction: f64,
}

/// Count seed keywords per attribute; an attribute is covered when it has
/// at least one hit. Counts delegate to [`keyword_counts`] exactly.
pub fn coverage_report(text_input: &str, taxonomy: &KeywordTaxonomy) -> KeywordCoverageReport {
    let counts = keyword_counts(text_input, taxonomy);
    let total = counts.len();
    let mut covered = 0usize;
    let attributes: BTreeMap<String, AttributeCoverage> = counts
        .into_iter()
        .map(|(name, c)| {
            let is_covered = c.count > 0;
            covered += usize::from(is_covered);
            (
                name,
                AttributeCoverage {
                    count: c.count,
                    normalized_freq: c.normalized_freq,
                    covered: is_covered,
                },
            )
        })
        .collect();
    KeywordCoverageReport {
        coverage_fraction: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
        attributes,
    }
}

/// How to read ambiguous slash dates. The corpus is US e-commerce, so
/// month-first is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlashDateOrder {
    #[default]
    MonthFirst,
    DayFirst,
}

const TRIGGERS: [&str; 5] =
    ["last updated", "last update", "effective date", "last modified", "updated on"];

/// Maximum character distance between a trigger phrase and its date.
const TRIGGER_WINDOW: usize = 80;

/// Find the policy's self-declared update date: a parseable date within
/// 80 characters of a trigger phrase ("last updated", "effective date",
/// ...). The date nearest each trigger wins; with several triggers the
/// latest date wins. Dates that do not survive calendar validation are
/// ignored.
pub fn detect_last_update(text_input: &str) -> Option<NaiveDate> {
    detect_last_update_with(text_input, SlashDateOrder::default())
}

pub fn detect_last_update_with(text_input: &str, order: SlashDateOrder) -> Option<NaiveDate> {
    let lower = text_input.to_lowercase();
    let dates = find_dates(&lower, order);
    if dates.is_empty() {
        return None;
    }
    let mut best: Option<NaiveDate> = None;
    for trigger in TRIGGERS {
        let mut from = 0;
        while let Some(offset) = lower[from..].find(trigger) {
            let at = from + offset;
            let nearest = dates
                .iter()
                .filter(|(pos, _)| pos.abs_diff(at) <= TRIGGER_WINDOW)
                .min_by_key(|(pos, _)| pos.abs_diff(at));
            if let Some((_, date)) = nearest {
                best = Some(match best {
                    Some(b) => b.max(*date),
                    None => *date,
                });
            }
            from = at + trigger.len();
        }
    }
    best
}

fn date_patterns() -> &'static [Regex; 4] {
    static PATTERNS: OnceLock<[Regex; 4]> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        let month = "january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec";
        [
            // Month D, YYYY
            Regex::new(&format!(r"\b({month})\.?\s+(\d{{1,2}})(?:st|nd|rd|th)?,?\s+(\d{{4}})\b"))
                .expect("valid regex"),
            // D Month YYYY
            Regex::new(&format!(r"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({month})\.?,?\s+(\d{{4}})\b"))
                .expect("valid regex"),
            // MM/DD/YYYY (or DD/MM per config)
            Regex::new(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b").expect("valid regex"),
            // YYYY-MM-DD
            Regex::new(r"\b(\d{4})-(\d{2})-(\d{2})\b").expect("valid regex"),
        ]
    })
}

fn month_number(name: &str) -> Option<u32> {
    let n = match name.trim_end_matches('.') {
        "january" | "jan" => 1,
        "february" | "feb" => 2,
        "march" | "mar" => 3,
        "april" | "apr" => 4,
        "may" => 5,
        "june" | "jun" => 6,
        "july" | "jul" => 7,
        "august" | "aug" => 8,
        "september" | "sep" | "sept" => 9,
        "october" | "oct" => 10,
        "november" | "nov" => 11,
        "december" | "dec" => 12,
        _ => return None,
    };
    Some(n)
}

/// All valid (byte position, date) pairs in the lowercased text.
fn find_dates(lower: &str, order: SlashDateOrder) -> Vec<(usize, NaiveDate)> {
    let [month_first, day_first, slash, iso] = date_patterns();
    let mut out: Vec<(usize, NaiveDate)> = Vec::new();

    for m in month_first.captures_iter(lower) {
        let pos = m.get(0).expect("capture 0").start();
        let (month, day, year) = (
            month_number(&m[1]),
            m[2].parse::<u32>().ok(),
            m[3].parse::<i32>().ok(),
        );
        if let (Some(mo), Some(d), Some(y)) = (month, day, year) {
            if let Some(date) = NaiveDate::from_ymd_opt(y, mo, d) {
                out.push((pos, date));
            }
        }
    }
    for m in day_first.captures_iter(lower) {
        let pos = m.get(0).expect("capture 0").start();
        if let (Ok(d), Some(mo), Ok(y)) =
            (m[1].parse::<u32>(), month_number(&m[2]), m[3].parse::<i32>())
        {
            if let Some(date) = NaiveDate::from_ymd_opt(y, mo, d) {
                out.push((pos, date));
            }
        }
    }
    for m in slash.captures_iter(lower) {
        let pos = m.get(0).expect("capture 0").start();
        if let (Ok(a), Ok(b), Ok(y)) =
            (m[1].parse::<u32>(), m[2].parse::<u32>(), m[3].parse::<i32>())
        {
            let (mo, d) = match order {
                SlashDateOrder::MonthFirst => (a, b),
                SlashDateOrder::DayFirst => (b, a),
            };
            if let Some(date) = NaiveDate::from_ymd_opt(y, mo, d) {
                out.push((pos, date));
            }
        }
    }
    for m in iso.captures_iter(lower) {
        let pos = m.get(0).expect("capture 0").start();
        if let (Ok(y), Ok(mo), Ok(d)) =
            (m[1].parse::<i32>(), m[2].parse::<u32>(), m[3].parse::<u32>())
        {
            if let Some(date) = NaiveDate::from_ymd_opt(y, mo, d) {
                out.push((pos, date));
            }
        }
    }
    out
}

/// Per-category device terms (JSON keyed by the 28 categories).
pub fn load_category_terms(json: &str) -> Result<BTreeMap<String, Vec<String>>> {
    Ok(serde_json::from_str(json)?)
}

pub fn builtin_category_terms() -> BTreeMap<String, Vec<String>> {
    load_category_terms(CATEGORY_TERMS_JSON).expect("built-in category terms are valid")
}

const DATA_VERBS: [&str; 16] = [
    "collect",
    "collects",
    "collected",
    "collecting",
    "process",
    "processes",
    "processed",
    "processing",
    "record",
    "records",
    "recorded",
    "recording",
    "store",
    "stores",
    "stored",
    "storing",
];

/// True when any sentence mentions a device term together with a
/// data-practice verb (collect/process/record/store in any inflection).
/// Adding qualifying sentences can only flip false to true.
pub fn detect_device_mention(text_input: &str, category_terms: &[String]) -> bool {
    if category_terms.is_empty() {
        return false;
    }
    let term_matcher = PhraseMatcher::new(category_terms);
    let splitter = SentenceSplitter::default();
    for sentence in splitter.split(text_input) {
        let tokens = text::words(&sentence);
        if tokens.is_empty() {
            continue;
        }
        let has_term = !term_matcher.find(&tokens).is_empty();
        let has_verb = tokens.iter().any(|t| DATA_VERBS.contains(&t.as_str()));
        if has_term && has_verb {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn coverage_empty_text_is_zero() {
        let tax = KeywordTaxonomy::default();
        let report = coverage_report("", &tax);
        assert_eq!(report.coverage_fraction, 0.0);
        assert!(report.attributes.values().all(|a| !a.covered));
    }

    #[test]
    fn coverage_one_keyword_per_attribute_is_full() {
        let tax = KeywordTaxonomy::default();
        let text_input: String = tax
            .attributes
            .iter()
            .map(|a| a.keywords[0].clone())
            .collect::<Vec<_>>()
            .join(" . ");
        let report = coverage_report(&text_input, &tax);
        assert_eq!(report.coverage_fraction, 1.0);
    }

    #[test]
    fn coverage_counts_delegate_exactly() {
        let tax = KeywordTaxonomy::default();
        let text_input = "We collect your email and share data with third party analytics.";
        let report = coverage_report(text_input, &tax);
        let counts = keyword_counts(text_input, &tax);
        for (name, c) in counts {
            assert_eq!(report.attributes[&name].count, c.count, "{name}");
            assert_eq!(report.attributes[&name].normalized_freq, c.normalized_freq);
        }
    }

    #[test]
    fn last_update_direct_pattern() {
        assert_eq!(
            detect_last_update("Last updated: May 25, 2018"),
            Some(date(2018, 5, 25))
        );
    }

    #[test]
    fn last_update_none_without_nearby_date() {
        assert_eq!(detect_last_update("This policy was last updated recently."), None);
        let far = format!("Last updated.{}May 25, 2018", " filler".repeat(30));
        assert_eq!(detect_last_update(&far), None, "date beyond the 80-char window");
    }

    #[test]
    fn last_update_latest_of_multiple_triggers() {
        let text_input =
            "Effective Date: 01/15/2020 applies. Later revision note: Last updated: March 3, 2021.";
        assert_eq!(detect_last_update(text_input), Some(date(2021, 3, 3)));
    }

    #[test]
    fn last_update_all_formats_parse() {
        for (s, want) in [
            ("last updated 7 June 2019", date(2019, 6, 7)),
            ("last updated on 2022-11-30", date(2022, 11, 30)),
            ("effective date: 12/31/2021", date(2021, 12, 31)),
            ("last modified January 2nd, 2023", date(2023, 1, 2)),
        ] {
            assert_eq!(detect_last_update(s), Some(want), "{s}");
        }
    }

    #[test]
    fn last_update_rejects_invalid_calendar_dates() {
        assert_eq!(detect_last_update("Last updated: 02/30/2021"), None);
        assert_eq!(detect_last_update("Last updated: 2021-13-40"), None);
    }

    #[test]
    fn day_first_config_flips_slash_dates() {
        let text_input = "last updated 03/04/2021";
        assert_eq!(
            detect_last_update_with(text_input, SlashDateOrder::MonthFirst),
            Some(date(2021, 3, 4))
        );
        assert_eq!(
            detect_last_update_with(text_input, SlashDateOrder::DayFirst),
            Some(date(2021, 4, 3))
        );
    }

    #[test]
    fn device_mention_positive() {
        let terms = vec!["smart camera".to_string(), "device".to_string()];
        assert!(detect_device_mention("Our smart camera collects video continuously.", &terms));
    }

    #[test]
    fn device_mention_requires_cooccurrence_in_sentence() {
        let terms = vec!["smart camera".to_string()];
        // Verb and term live in different sentences.
        assert!(!detect_device_mention(
            "We collect information. The smart camera is waterproof.",
            &terms
        ));
        // Website-only cookie text has no device term at all.
        assert!(!detect_device_mention(
            "We collect cookies on this website to improve the experience.",
            &terms
        ));
        assert!(!detect_device_mention("", &terms));
    }

    #[test]
    fn device_mention_monotone_under_appending() {
        let terms = vec!["tracker".to_string()];
        let base = "This policy covers the website only.";
        assert!(!detect_device_mention(base, &terms));
        let extended = format!("{base} The tracker records heart rate data.");
        assert!(detect_device_mention(&extended, &terms));
        let more = format!("{extended} Unrelated closing sentence.");
        assert!(detect_device_mention(&more, &terms));
    }

    #[test]
    fn builtin_category_terms_cover_28_categories() {
        let terms = builtin_category_terms();
        assert_eq!(terms.len(), 28);
        assert!(terms.values().all(|v| !v.is_empty()));
    }
}
