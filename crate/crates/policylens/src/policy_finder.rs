//! Privacy-policy link discovery and main-text extraction.
//!
//! Link candidates are scored from keyword hits in the anchor text and the
//! URL path, with a bonus for footer/nav placement. Text extraction
//! segments the page into blocks at block-level tags and keeps the blocks
//! that read like content: enough words, few links, with single-block
//! gaps smoothed over.

use serde::{Deserialize, Serialize};
use url::Url;

use crate::error::{Error, Result};
use crate::html::{self, Document, NodeId, NodeKind};
use crate::text::{self, PhraseMatcher};

/// A scored link that may point to a privacy policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkCandidate {
    pub url: String,
    pub anchor_text: String,
    pub score: f64,
    pub matched_keywords: Vec<String>,
}

/// Thresholds and keyword lists for link discovery and text extraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// blocks shorter than this many words are boilerplate
    pub min_block_words: usize,
    /// blocks with a higher fraction of link words are boilerplate
    pub max_link_density: f64,
    pub english_keywords: Vec<String>,
    pub multilingual_keywords: Vec<String>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            min_block_words: 12,
            max_link_density: 0.33,
            english_keywords: ["privacy", "policy", "data", "protection", "cookie", "legal"]
                .map(String::from)
                .to_vec(),
            multilingual_keywords: [
                "datenschutz",
                "datenschutzerklärung",
                "confidentialité",
                "confidentialite",
                "privacidad",
                "privacidade",
                "informativa",
                "vie privée",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

impl ExtractionConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(json)?;
        if cfg.max_link_density < 0.0 || cfg.max_link_density > 1.0 {
            return Err(Error::Invariant(format!(
                "max_link_density outside [0,1]: {}",
                cfg.max_link_density
            )));
        }
        Ok(cfg)
    }

    fn all_keywords(&self) -> impl Iterator<Item = &str> {
        self.english_keywords
            .iter()
            .chain(self.multilingual_keywords.iter())
            .map(String::as_str)
    }
}

/// Rank the document's links by how likely they point to a privacy policy.
///
/// Score: 2 per keyword hit in the anchor text, 1 per keyword hit in the
/// URL path, plus 1 when the link sits under a footer or nav element.
/// Relative hrefs resolve against `base_url`; only candidates with a
/// positive score are returned, sorted by score, ties in document order.
pub fn find_policy_links(
    html_input: &str,
    base_url: &str,
    cfg: &ExtractionConfig,
) -> Result<Vec<LinkCandidate>> {
    let base = Url::parse(base_url)
        .map_err(|e| Error::InvalidInput(format!("base url {base_url:?}: {e}")))?;
    let doc = Document::parse(html_input);
    let matcher = PhraseMatcher::new(cfg.all_keywords());

    let mut candidates = Vec::new();
    for node in doc.select("a[href]") {
        let href = doc.attr(node, "href").unwrap_or_default().trim().to_string();
        if href.is_empty()
            || href.starts_with('#')
            || href.starts_with("javascript:")
            || href.starts_with("mailto:")
        {
            continue;
        }
        let resolved = match base.join(&href) {
            Ok(u) => u,
            Err(e) => {
                log::warn!("skipping unparseable href {href:?}: {e}");
                continue;
            }
        };

        let anchor_text = doc.text_of(node);
        let anchor_tokens = text::words(&anchor_text);
        let anchor_hits = matcher.find(&anchor_tokens);

        let path_tokens = text::words(resolved.path());
        let path_hits = matcher.find(&path_tokens);

        let mut matched_keywords: Vec<String> = anchor_hits
            .iter()
            .map(|&(s, l)| anchor_tokens[s..s + l].join(" "))
            .chain(path_hits.iter().map(|&(s, l)| path_tokens[s..s + l].join(" ")))
            .collect();
        matched_keywords.sort();
        matched_keywords.dedup();

        let context_bonus = doc
            .ancestors(node)
            .filter_map(|a| doc.tag(a).map(str::to_string))
            .any(|t| t == "footer" || t == "nav");

        let score = 2.0 * anchor_hits.len() as f64
            + path_hits.len() as f64
            + if context_bonus { 1.0 } else { 0.0 };
        if score > 0.0 && !matched_keywords.is_empty() {
            candidates.push(LinkCandidate {
                url: resolved.to_string(),
                anchor_text: text::normalize_space(&anchor_text),
                score,
                matched_keywords,
            });
        }
    }
    candidates.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
    Ok(candidates)
}

// ---------------------------------------------------------------------------
// Main-text extraction
// ---------------------------------------------------------------------------

#[derive(Debug, Default)]
struct Block {
    words: Vec<String>,
    link_words: usize,
}

impl Block {
    fn link_density(&self) -> f64 {
        if self.words.is_empty() {
            0.0
        } else {
            self.link_words as f64 / self.words.len() as f64
        }
    }
}

/// Extract the main content of a page.
///
/// The document is flattened into text blocks at block-level tag
/// boundaries. A block is content when it has at least `min_block_words`
/// words and link density at most `max_link_density`. A single
/// boilerplate block wedged between two content blocks is promoted
/// (gap smoothing). Content blocks are joined by blank lines.
pub fn extract_main_text(html_input: &str, cfg: &ExtractionConfig) -> Result<String> {
    let doc = Document::parse(html_input);
    let mut blocks = Vec::new();
    let mut current = Block::default();
    collect_blocks(&doc, doc.root(), 0, &mut current, &mut blocks);
    flush_block(&mut current, &mut blocks);

    if blocks.iter().all(|b| b.words.is_empty()) {
        return Err(Error::NoExtractableText);
    }

    let mut is_content: Vec<bool> = blocks
        .iter()
        .map(|b| b.words.len() >= cfg.min_block_words && b.link_density() <= cfg.max_link_density)
        .collect();

    // Gap smoothing: boilerplate between two content blocks becomes content.
    for i in 1..blocks.len().saturating_sub(1) {
        if !is_content[i] && is_content[i - 1] && is_content[i + 1] && !blocks[i].words.is_empty() {
            is_content[i] = true;
        }
    }

    let kept: Vec<String> = blocks
        .iter()
        .zip(&is_content)
        .filter(|(b, &keep)| keep && !b.words.is_empty())
        .map(|(b, _)| b.words.join(" "))
        .collect();
    if kept.is_empty() {
        return Err(Error::NoExtractableText);
    }
    Ok(kept.join("\n\n"))
}

fn collect_blocks(
    doc: &Document,
    node: NodeId,
    anchor_depth: usize,
    current: &mut Block,
    blocks: &mut Vec<Block>,
) {
    match doc.kind(node) {
        NodeKind::Text(t) => {
            for token in t.split_whitespace() {
                current.words.push(token.to_string());
                if anchor_depth > 0 {
                    current.link_words += 1;
                }
            }
        }
        NodeKind::Element { tag, .. } => {
            if matches!(tag.as_str(), "script" | "style" | "noscript" | "head" | "template") {
                return;
            }
            let is_block = html::is_block_element(tag);
            if is_block {
                flush_block(current, blocks);
            }
            let depth = anchor_depth + usize::from(tag == "a");
            for &child in doc.children(node) {
                collect_blocks(doc, child, depth, current, blocks);
            }
            if is_block {
                flush_block(current, blocks);
            }
        }
    }
}

fn flush_block(current: &mut Block, blocks: &mut Vec<Block>) {
    if !current.words.is_empty() {
        blocks.push(std::mem::take(current));
    }
}

// ---------------------------------------------------------------------------
// Policy text cleaning
// ---------------------------------------------------------------------------

const BANNER_PHRASES: &[&str] = &[
    "accept all cookies",
    "accept cookies",
    "reject all",
    "cookie settings",
    "cookie preferences",
    "manage cookies",
    "we use cookies",
    "this website uses cookies",
    "allow all",
];

/// Clean extracted policy text: normalize unicode quotes and dashes, drop
/// short cookie-banner remnants, remove every line that repeats three or
/// more times verbatim, and collapse whitespace. Idempotent.
pub fn clean_policy_text(input: &str) -> String {
    let normalized = normalize_unicode_punct(input);
    let lines: Vec<String> =
        normalized.lines().map(|l| text::normalize_space(l)).collect();

    let mut line_counts: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for line in &lines {
        if !line.is_empty() {
            *line_counts.entry(line.as_str()).or_insert(0) += 1;
        }
    }

    let banner = PhraseMatcher::new(BANNER_PHRASES.iter().copied());
    let mut kept: Vec<&str> = Vec::new();
    for line in &lines {
        if line.is_empty() {
            if kept.last().is_some_and(|l| !l.is_empty()) {
                kept.push("");
            }
            continue;
        }
        if line_counts[line.as_str()] >= 3 {
            continue;
        }
        let tokens = text::words(line);
        if tokens.len() <= 8 && !banner.find(&tokens).is_empty() {
            continue;
        }
        kept.push(line);
    }
    while kept.last() == Some(&"") {
        kept.pop();
    }
    kept.join("\n")
}

fn normalize_unicode_punct(input: &str) -> String {
    input
        .chars()
        .map(|c| match c {
            '\u{2018}' | '\u{2019}' | '\u{201a}' | '\u{2032}' => '\'',
            '\u{201c}' | '\u{201d}' | '\u{201e}' | '\u{2033}' => '"',
            '\u{2013}' | '\u{2014}' | '\u{2015}' | '\u{2212}' => '-',
            '\u{a0}' => ' ',
            other => other,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_candidate_is_privacy_policy_link() {
        let page = r#"
            <body>
              <nav><a href="/shop">Shop</a><a href="/about">About Us</a></nav>
              <footer>
                <a href="/legal/privacy">Privacy Policy</a>
                <a href="/legal/terms">Terms of Service</a>
              </footer>
            </body>"#;
        let cfg = ExtractionConfig::default();
        let links = find_policy_links(page, "https://example.com/", &cfg).unwrap();
        let top = &links[0];
        assert_eq!(top.url, "https://example.com/legal/privacy");
        assert!(top.matched_keywords.contains(&"privacy".to_string()));
        assert!(top.matched_keywords.contains(&"policy".to_string()));
        // anchor hits 2*2 + path hit 1 + footer bonus 1
        assert_eq!(top.score, 6.0);
    }

    #[test]
    fn relative_href_resolved_against_base() {
        let page = r#"<a href="privacy.html">privacy</a>"#;
        let cfg = ExtractionConfig::default();
        let links = find_policy_links(page, "https://x.com/a/", &cfg).unwrap();
        assert_eq!(links[0].url, "https://x.com/a/privacy.html");
    }

    #[test]
    fn multilingual_anchor_matches() {
        let page = r#"<footer><a href="/de/legal">Datenschutz</a></footer>"#;
        let cfg = ExtractionConfig::default();
        let links = find_policy_links(page, "https://example.de/", &cfg).unwrap();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].matched_keywords, vec!["datenschutz"]);
    }

    #[test]
    fn no_keyword_links_are_dropped() {
        let page = r##"<a href="/shop">Buy now</a><a href="#top">Top</a>"##;
        let cfg = ExtractionConfig::default();
        assert!(find_policy_links(page, "https://example.com/", &cfg).unwrap().is_empty());
    }

    fn para(words: usize, tag: &str) -> String {
        let body: Vec<String> = (0..words).map(|i| format!("word{i}")).collect();
        format!("<{tag}>{}</{tag}>", body.join(" "))
    }

    #[test]
    fn extracts_paragraphs_not_nav() {
        let mut page = String::from("<body><nav>");
        for i in 0..20 {
            page.push_str(&format!("<a href='/l{i}'>link {i}</a> "));
        }
        page.push_str("</nav>");
        for _ in 0..5 {
            page.push_str(&para(20, "p"));
        }
        page.push_str("<footer><a href='/p'>Privacy</a> <a href='/t'>Terms</a></footer></body>");

        let cfg = ExtractionConfig::default();
        let text_out = extract_main_text(&page, &cfg).unwrap();
        let blocks: Vec<&str> = text_out.split("\n\n").collect();
        assert_eq!(blocks.len(), 5);
        assert!(!text_out.contains("link 3"));
        assert!(!text_out.contains("Privacy"));
    }

    #[test]
    fn single_long_paragraph_kept_verbatim() {
        let page = "<p>The quick brown fox jumps over the lazy dog while twelve watchful geese observe.</p>";
        let cfg = ExtractionConfig::default();
        let text_out = extract_main_text(page, &cfg).unwrap();
        assert_eq!(
            text_out,
            "The quick brown fox jumps over the lazy dog while twelve watchful geese observe."
        );
    }

    #[test]
    fn nav_only_page_is_error() {
        let page = "<nav><a href='/a'>one</a> <a href='/b'>two</a></nav>";
        let cfg = ExtractionConfig::default();
        assert!(matches!(extract_main_text(page, &cfg), Err(Error::NoExtractableText)));
        assert!(matches!(extract_main_text("", &cfg), Err(Error::NoExtractableText)));
    }

    #[test]
    fn gap_smoothing_promotes_sandwiched_block() {
        let mut page = String::new();
        page.push_str(&para(20, "p"));
        page.push_str("<p>Short heading here</p>");
        page.push_str(&para(20, "p"));
        let cfg = ExtractionConfig::default();
        let text_out = extract_main_text(&page, &cfg).unwrap();
        assert!(text_out.contains("Short heading here"));
    }

    #[test]
    fn extraction_never_invents_tokens() {
        let page = r#"<div><p>Alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu.</p>
                      <ul><li><a href="/x">menu</a></li></ul></div>"#;
        let cfg = ExtractionConfig::default();
        let out = extract_main_text(page, &cfg).unwrap();
        let input_tokens = text::words(page);
        for token in text::words(&out) {
            assert!(input_tokens.contains(&token), "invented token {token:?}");
        }
    }

    #[test]
    fn clean_removes_repeated_lines() {
        let body = "Introduction to the policy.\n\u{a9} Acme 2023\nWe collect data.\n\u{a9} Acme 2023\nWe share data.\n\u{a9} Acme 2023\nContact us.\n\u{a9} Acme 2023";
        let cleaned = clean_policy_text(body);
        assert!(!cleaned.contains("Acme 2023"));
        assert!(cleaned.contains("We collect data."));
    }

    #[test]
    fn clean_strips_cookie_banner_remnants() {
        let body = "Accept all cookies\nOur privacy practices are described below in detail for your reference.";
        let cleaned = clean_policy_text(body);
        assert!(!cleaned.to_lowercase().contains("accept all cookies"));
        assert!(cleaned.contains("privacy practices"));
    }

    #[test]
    fn clean_normalizes_unicode_punct() {
        let cleaned = clean_policy_text("\u{201c}Smart\u{201d} devices \u{2014} and you\u{2019}re covered");
        assert_eq!(cleaned, "\"Smart\" devices - and you're covered");
    }

    #[test]
    fn clean_is_idempotent() {
        let samples = [
            "already clean text\nwith two lines",
            "dup\ndup\ndup\nunique line stays",
            "  spaced   out \u{2013} text \n\n\n\nmore",
            "",
        ];
        for s in samples {
            let once = clean_policy_text(s);
            let twice = clean_policy_text(&once);
            assert_eq!(once, twice, "input {s:?}");
        }
    }

    #[test]
    fn clean_empty_is_empty() {
        assert_eq!(clean_policy_text(""), "");
    }
}
