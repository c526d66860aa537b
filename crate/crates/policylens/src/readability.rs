//! The eight readability features of a policy text.
//!
//! All metrics are pure functions of the input text; byte-identical inputs
//! produce identical reports.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{self, PhraseMatcher, SentenceSplitter, Stopwords};
use crate::topics::{self, TopicModel};

/// Built-in imprecise/connective word taxonomies.
pub const LEXICONS_JSON: &str = include_str!("../assets/lexicons.json");

/// Categorized word/phrase lists for one lexicon (imprecise or connective).
pub type Lexicon = BTreeMap<String, Vec<String>>;

/// The imprecise and connective taxonomies used by the frequency metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LexiconSet {
    pub imprecise: Lexicon,
    pub connective: Lexicon,
}

impl Default for LexiconSet {
    fn default() -> Self {
        serde_json::from_str(LEXICONS_JSON).expect("built-in lexicons are valid")
    }
}

impl LexiconSet {
    pub fn from_json(json: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(json)?;
        for (name, entries) in set.imprecise.iter().chain(set.connective.iter()) {
            for e in entries {
                if e != &e.to_lowercase() {
                    return Err(Error::Invariant(format!(
                        "lexicon {name:?} entry not lowercase: {e:?}"
                    )));
                }
            }
        }
        Ok(set)
    }

    fn phrases(lexicon: &Lexicon) -> impl Iterator<Item = &str> {
        lexicon.values().flatten().map(String::as_str)
    }
}

/// The eight readability metrics for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityReport {
    pub entropy_bits_per_word: f64,
    pub reading_time_minutes: u64,
    pub unique_word_count: usize,
    pub unique_word_ratio: f64,
    pub coherence: f64,
    pub imprecise_freq: f64,
    pub connective_freq: f64,
    pub grammar_error_rate: f64,
    pub fkgl: f64,
    /// degenerate-input markers, e.g. "empty-text"
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Words per minute of a typical reader; documents are timed against this.
pub const DEFAULT_WPM: u64 = 238;

/// Shannon entropy over the word distribution, in bits per word.
/// Empty text scores 0.
pub fn shannon_entropy(text_input: &str) -> f64 {
    let tokens = text::words(text_input);
    if tokens.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &tokens {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let total = tokens.len() as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Estimated reading time in whole minutes: `ceil(words / wpm)`, with a
/// floor of one minute for non-empty text and 0 for empty text.
pub fn reading_time(text_input: &str, wpm: u64) -> u64 {
    let words = text_input.split_whitespace().count() as u64;
    if words == 0 {
        return 0;
    }
    words.div_ceil(wpm).max(1)
}

/// Distinct-vocabulary size and lexical diversity after cleaning
/// (lowercase, punctuation/numbers/stopwords removed).
pub fn unique_words(text_input: &str) -> (usize, f64) {
    let stopwords = Stopwords::english();
    let tokens = text::clean_tokens(text_input, &stopwords);
    if tokens.is_empty() {
        return (0, 0.0);
    }
    let mut distinct: Vec<&str> = tokens.iter().map(String::as_str).collect();
    distinct.sort_unstable();
    distinct.dedup();
    (distinct.len(), distinct.len() as f64 / tokens.len() as f64)
}

/// Which lexicon of a [`LexiconSet`] to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconKind {
    Imprecise,
    Connective,
}

/// Fraction of tokens consumed by lexicon hits. Phrases match longest
/// first over the raw token stream, so a five-token phrase counts as one
/// hit and no token is counted twice.
pub fn lexicon_frequency(text_input: &str, lexicons: &LexiconSet, kind: LexiconKind) -> f64 {
    let lexicon = match kind {
        LexiconKind::Imprecise => &lexicons.imprecise,
        LexiconKind::Connective => &lexicons.connective,
    };
    let matcher = PhraseMatcher::new(LexiconSet::phrases(lexicon));
    let tokens = text::words(text_input);
    if tokens.is_empty() {
        return 0.0;
    }
    matcher.count(&tokens) as f64 / tokens.len() as f64
}

/// Fraction of sentences with at least one mistake under the four-rule
/// heuristic:
///
/// 1. first alphabetic character is lowercase;
/// 2. immediately duplicated word;
/// 3. "a" before a vowel-initial word or "an" before a consonant-initial word;
/// 4. unbalanced brackets or double quotes.
pub fn grammar_error_rate(text_input: &str) -> f64 {
    let splitter = SentenceSplitter::default();
    let sentences = splitter.split(text_input);
    if sentences.is_empty() {
        return 0.0;
    }
    let flagged = sentences.iter().filter(|s| sentence_has_error(s)).count();
    flagged as f64 / sentences.len() as f64
}

fn sentence_has_error(sentence: &str) -> bool {
    // r1: lowercase opening
    if let Some(first) = sentence.chars().find(|c| c.is_alphabetic()) {
        if first.is_lowercase() {
            return true;
        }
    }
    let tokens = text::words(sentence);
    for pair in tokens.windows(2) {
        // r2: immediate duplicate
        if text::is_wordlike(&pair[0]) && pair[0] == pair[1] {
            return true;
        }
        // r3: article agreement
        let starts_with_vowel =
            pair[1].chars().next().map(|c| "aeiou".contains(c)).unwrap_or(false);
        if pair[0] == "a" && text::is_wordlike(&pair[1]) && starts_with_vowel {
            return true;
        }
        if pair[0] == "an" && text::is_wordlike(&pair[1]) && !starts_with_vowel {
            return true;
        }
    }
    // r4: unbalanced brackets/quotes
    let mut round = 0i64;
    let mut square = 0i64;
    let mut curly = 0i64;
    let mut quotes = 0i64;
    for c in sentence.chars() {
        match c {
            '(' => round += 1,
            ')' => round -= 1,
            '[' => square += 1,
            ']' => square -= 1,
            '{' => curly += 1,
            '}' => curly -= 1,
            '"' => quotes += 1,
            _ => {}
        }
        if round < 0 || square < 0 || curly < 0 {
            return true;
        }
    }
    round != 0 || square != 0 || curly != 0 || quotes % 2 != 0
}

/// Flesch-Kincaid Grade Level:
/// `0.39 * (words/sentences) + 11.8 * (syllables/words) - 15.59`.
///
/// Words are whitespace tokens; syllables are counted per word as vowel
/// groups (aeiouy) minus a trailing silent 'e', minimum one per word with
/// any letters.
pub fn fkgl(text_input: &str) -> Result<f64> {
    let words: Vec<&str> = text_input.split_whitespace().collect();
    let sentences = SentenceSplitter::default().split(text_input);
    if words.is_empty() || sentences.is_empty() {
        return Err(Error::InvalidInput("fkgl needs at least one word and one sentence".into()));
    }
    let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
    Ok(0.39 * (words.len() as f64 / sentences.len() as f64)
        + 11.8 * (syllables as f64 / words.len() as f64)
        - 15.59)
}

/// Vowel-group syllable counter with silent-e subtraction.
pub fn count_syllables(word: &str) -> usize {
    let letters: String = word.chars().filter(|c| c.is_alphabetic()).collect::<String>().to_lowercase();
    if letters.is_empty() {
        return 0;
    }
    let is_vowel = |c: char| "aeiouy".contains(c);
    let mut groups = 0;
    let mut in_group = false;
    for c in letters.chars() {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
                in_group = true;
            }
        } else {
            in_group = false;
        }
    }
    if letters.ends_with('e') && !letters.ends_with("le") && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Compute every readability metric for one document. Coherence comes from
/// the supplied topic model scored against this document's sentences.
/// Empty input produces an all-zero report flagged "empty-text".
pub fn full_report(
    text_input: &str,
    lexicons: &LexiconSet,
    topic_model: &TopicModel,
) -> ReadabilityReport {
    let mut flags = Vec::new();
    if text_input.trim().is_empty() {
        return ReadabilityReport {
            entropy_bits_per_word: 0.0,
            reading_time_minutes: 0,
            unique_word_count: 0,
            unique_word_ratio: 0.0,
            coherence: 0.0,
            imprecise_freq: 0.0,
            connective_freq: 0.0,
            grammar_error_rate: 0.0,
            fkgl: 0.0,
            flags: vec!["empty-text".into()],
        };
    }
    let (unique_word_count, unique_word_ratio) = unique_words(text_input);
    let fkgl_value = match fkgl(text_input) {
        Ok(v) => v,
        Err(_) => {
            flags.push("no-sentences".into());
            0.0
        }
    };
    let coherence = {
        let stopwords = Stopwords::english();
        let docs: Vec<Vec<String>> = SentenceSplitter::default()
            .split(text_input)
            .iter()
            .map(|s| text::clean_tokens(s, &stopwords))
            .filter(|t| !t.is_empty())
            .collect();
        match topics::coherence(topic_model, &docs, 10, 20) {
            Ok(scores) => scores.mean,
            Err(_) => {
                flags.push("no-coherence".into());
                0.0
            }
        }
    };
    ReadabilityReport {
        entropy_bits_per_word: shannon_entropy(text_input),
        reading_time_minutes: reading_time(text_input, DEFAULT_WPM),
        unique_word_count,
        unique_word_ratio,
        coherence,
        imprecise_freq: lexicon_frequency(text_input, lexicons, LexiconKind::Imprecise),
        connective_freq: lexicon_frequency(text_input, lexicons, LexiconKind::Connective),
        grammar_error_rate: grammar_error_rate(text_input),
        fkgl: fkgl_value,
        flags,
    }
}
