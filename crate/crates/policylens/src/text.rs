//! Shared text utilities: tokenization, stopwords, sentence splitting, and
//! longest-match phrase matching.
//!
//! Every analysis module tokenizes through these helpers so that metrics
//! computed in different places agree on what a "word" is.

use std::collections::{HashMap, HashSet};

/// Built-in English stopword list, one word per line.
pub const ENGLISH_STOPWORDS: &str = include_str!("../assets/stopwords/en.txt");

/// Built-in sentence-splitter abbreviation list, one entry per line.
pub const ABBREVIATIONS: &str = include_str!("../assets/abbreviations.txt");

/// Lowercased word tokens. A token is a maximal run of alphanumeric
/// characters plus internal hyphens and apostrophes; surrounding
/// punctuation is stripped. Numeric tokens are kept.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '-' || ch == '\'' || ch == '\u{2019}' {
            for lc in ch.to_lowercase() {
                current.push(if lc == '\u{2019}' { '\'' } else { lc });
            }
        } else if !current.is_empty() {
            push_token(&mut out, &mut current);
        }
    }
    if !current.is_empty() {
        push_token(&mut out, &mut current);
    }
    out
}

fn push_token(out: &mut Vec<String>, current: &mut String) {
    let trimmed = current.trim_matches(|c| c == '-' || c == '\'');
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
    current.clear();
}

/// True when the token contains at least one alphabetic character.
pub fn is_wordlike(token: &str) -> bool {
    token.chars().any(|c| c.is_alphabetic())
}

/// Strip a plural "-s": drop the final 's' from tokens of length >= 4 that
/// do not end in "ss". This is the only lemma folding the crate performs.
pub fn fold_plural(token: &str) -> String {
    let n = token.chars().count();
    if n >= 4 && token.ends_with('s') && !token.ends_with("ss") {
        token[..token.len() - 1].to_string()
    } else {
        token.to_string()
    }
}

/// Stopword set parsed from a plain-text word list (one word per line,
/// `#` comments allowed).
#[derive(Debug, Clone)]
pub struct Stopwords {
    set: HashSet<String>,
}

impl Stopwords {
    pub fn english() -> Self {
        Self::from_word_list(ENGLISH_STOPWORDS)
    }

    pub fn from_word_list(list: &str) -> Self {
        let set = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Self { set }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.set.contains(token)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Tokens cleaned for vocabulary work: lowercased, punctuation split,
/// numeric tokens and stopwords removed.
pub fn clean_tokens(text: &str, stopwords: &Stopwords) -> Vec<String> {
    words(text)
        .into_iter()
        .filter(|t| is_wordlike(t) && !stopwords.contains(t))
        .collect()
}

/// Sentence splitter: breaks on `.`, `!`, `?` with a configurable
/// abbreviation guard, and on blank lines. Decimal points and dots inside
/// known abbreviations do not split.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::from_abbreviation_list(ABBREVIATIONS)
    }
}

impl SentenceSplitter {
    pub fn from_abbreviation_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        Self { abbreviations }
    }

    pub fn split(&self, text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        let mut sentences = Vec::new();
        let mut current = String::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            if ch == '\n' {
                // A blank line is a hard boundary even without punctuation.
                let mut j = i + 1;
                let mut newlines = 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    if chars[j] == '\n' {
                        newlines += 1;
                    }
                    j += 1;
                }
                if newlines >= 2 {
                    flush(&mut sentences, &mut current);
                    i = j;
                    continue;
                }
                current.push(' ');
                i += 1;
                continue;
            }
            current.push(ch);
            if ch == '.' || ch == '!' || ch == '?' {
                if ch == '.' && self.is_guarded_dot(&chars, i) {
                    i += 1;
                    continue;
                }
                // Absorb closing quotes and brackets after the terminator.
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], '"' | '\'' | ')' | ']' | '\u{201d}') {
                    current.push(chars[j]);
                    j += 1;
                }
                flush(&mut sentences, &mut current);
                i = j;
                continue;
            }
            i += 1;
        }
        flush(&mut sentences, &mut current);
        sentences
    }

    /// A dot does not terminate a sentence when it sits inside a decimal
    /// number or ends a listed abbreviation.
    fn is_guarded_dot(&self, chars: &[char], i: usize) -> bool {
        let prev_digit = i > 0 && chars[i - 1].is_ascii_digit();
        let next_digit = i + 1 < chars.len() && chars[i + 1].is_ascii_digit();
        if prev_digit && next_digit {
            return true;
        }
        // Token since the last whitespace, dots included ("e.g.", "U.S.").
        let mut start = i;
        while start > 0 && !chars[start - 1].is_whitespace() {
            start -= 1;
        }
        let token: String = chars[start..=i].iter().collect();
        self.abbreviations.contains(&token.to_lowercase())
    }
}

fn flush(sentences: &mut Vec<String>, current: &mut String) {
    let s = normalize_space(current);
    if !s.is_empty() {
        sentences.push(s);
    }
    current.clear();
}

/// Collapse runs of whitespace to single spaces and trim.
pub fn normalize_space(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Longest-match-first phrase matcher over a token stream.
///
/// Phrases are stored as token sequences. At each position the longest
/// phrase starting there wins and consumes all of its tokens, so no token
/// is counted twice.
#[derive(Debug, Clone)]
pub struct PhraseMatcher {
    // first token -> phrases starting with it, longest first
    by_head: HashMap<String, Vec<Vec<String>>>,
}

impl PhraseMatcher {
    /// Build from phrase strings; each phrase is tokenized with [`words`].
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut by_head: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for phrase in phrases {
            let tokens = words(phrase.as_ref());
            if tokens.is_empty() {
                continue;
            }
            let entry = by_head.entry(tokens[0].clone()).or_default();
            if !entry.contains(&tokens) {
                entry.push(tokens);
            }
        }
        for list in by_head.values_mut() {
            list.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        }
        Self { by_head }
    }

    /// Number of matches in the token stream.
    pub fn count(&self, tokens: &[String]) -> usize {
        self.find(tokens).len()
    }

    /// Matches as (start index, matched phrase length).
    pub fn find(&self, tokens: &[String]) -> Vec<(usize, usize)> {
        let mut hits = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_at(tokens, i) {
                Some(len) => {
                    hits.push((i, len));
                    i += len;
                }
                None => i += 1,
            }
        }
        hits
    }

    fn longest_at(&self, tokens: &[String], i: usize) -> Option<usize> {
        let candidates = self.by_head.get(&tokens[i])?;
        for phrase in candidates {
            if phrase.len() <= tokens.len() - i && tokens[i..i + phrase.len()] == phrase[..] {
                return Some(phrase.len());
            }
        }
        None
    }

    /// True when at least one phrase occurs in the text.
    pub fn matches_text(&self, text: &str) -> bool {
        !self.find(&words(text)).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_strip_punctuation_and_lowercase() {
        assert_eq!(words("Hello, World!"), vec!["hello", "world"]);
        assert_eq!(words("voice-controlled hub"), vec!["voice-controlled", "hub"]);
        assert_eq!(words("don't"), vec!["don't"]);
        assert_eq!(words("(2018)"), vec!["2018"]);
        assert!(words("...---...").is_empty());
    }

    #[test]
    fn fold_plural_rules() {
        assert_eq!(fold_plural("cameras"), "camera");
        assert_eq!(fold_plural("address"), "address");
        assert_eq!(fold_plural("data"), "data");
        assert_eq!(fold_plural("gps"), "gps");
        assert_eq!(fold_plural("cookies"), "cookie");
    }

    #[test]
    fn stopwords_cover_function_words() {
        let sw = Stopwords::english();
        for w in ["the", "of", "and", "to", "we", "our", "your", "with"] {
            assert!(sw.contains(w), "expected stopword: {w}");
        }
        assert!(!sw.contains("privacy"));
    }

    #[test]
    fn clean_tokens_drop_stopwords_and_numbers() {
        let sw = Stopwords::english();
        assert_eq!(
            clean_tokens("The 42 smart cameras!", &sw),
            vec!["smart", "cameras"]
        );
        assert!(clean_tokens("the of and", &sw).is_empty());
    }

    #[test]
    fn sentences_split_on_terminators() {
        let sp = SentenceSplitter::default();
        let got = sp.split("The cat sat. The dog ran! Did it?");
        assert_eq!(got, vec!["The cat sat.", "The dog ran!", "Did it?"]);
    }

    #[test]
    fn sentences_guard_abbreviations_and_decimals() {
        let sp = SentenceSplitter::default();
        let got = sp.split("We use SSL, e.g. for payments. Version 2.5 is out.");
        assert_eq!(
            got,
            vec!["We use SSL, e.g. for payments.", "Version 2.5 is out."]
        );
        let got = sp.split("Acme Inc. collects data. See above.");
        assert_eq!(got, vec!["Acme Inc. collects data.", "See above."]);
    }

    #[test]
    fn sentences_break_on_blank_lines() {
        let sp = SentenceSplitter::default();
        let got = sp.split("Data Collection\n\nWe collect your name.");
        assert_eq!(got, vec!["Data Collection", "We collect your name."]);
    }

    #[test]
    fn phrase_matcher_prefers_longest() {
        let m = PhraseMatcher::new(["may", "including but not limited to", "limited"]);
        let tokens = words("We may share data, including but not limited to your name.");
        let hits = m.find(&tokens);
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[1].1, 5);
    }

    #[test]
    fn phrase_matcher_never_double_counts() {
        let m = PhraseMatcher::new(["track", "track request"]);
        let tokens = words("do not track request");
        // "track request" consumes both tokens; bare "track" cannot re-match.
        assert_eq!(m.count(&tokens), 1);
    }
}
