//! Language identification: three in-house detectors (character n-gram
//! profiles, stopword fractions, byte-bigram Bayes), each instantiable
//! with independent training sets, combined by majority vote. The default
//! ensemble instantiates every detector twice — six voters in total.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{self, Stopwords};

/// Minimum training-corpus size for a profile.
pub const MIN_PROFILE_CORPUS: usize = 1000;

/// Profile size cap: the top-ranked n-grams kept per language.
pub const PROFILE_SIZE: usize = 300;

/// Ranked character n-gram profile (n = 1..=3). Rank equals position in
/// the list: unique and consecutive from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub lang: String,
    pub top_ngrams: Vec<(String, usize)>,
}

impl LanguageProfile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let profile: Self = serde_json::from_str(json)?;
        for (rank, (_, r)) in profile.top_ngrams.iter().enumerate() {
            if *r != rank {
                return Err(Error::Invariant(format!(
                    "profile rank {r} at position {rank} is not consecutive"
                )));
            }
        }
        Ok(profile)
    }
}

/// One detector's opinion. `low_confidence` marks degenerate input (for
/// instance text shorter than one trigram).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorVote {
    pub lang: String,
    pub confidence: f64,
    pub low_confidence: bool,
}

/// Ensemble verdict. `lang` is the majority-vote winner; `per_detector`
/// records each voter's (language, confidence), with abstentions stored
/// as ("unknown", 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub lang: String,
    pub per_detector: BTreeMap<String, (String, f64)>,
}

/// A pluggable language detector.
pub trait Detector: Send + Sync {
    fn name(&self) -> &str;
    /// `None` means the detector abstains.
    fn detect(&self, text: &str) -> Option<DetectorVote>;
}

// ---------------------------------------------------------------------------
// N-gram detector
// ---------------------------------------------------------------------------

/// Train a ranked n-gram profile from a corpus of at least
/// [`MIN_PROFILE_CORPUS`] characters. N-grams are ranked by descending
/// frequency, ties lexicographically, truncated to [`PROFILE_SIZE`].
pub fn train_profile(corpus: &str, lang: &str) -> Result<LanguageProfile> {
    let size = corpus.chars().count();
    if size < MIN_PROFILE_CORPUS {
        return Err(Error::CorpusTooSmall { got: size, min: MIN_PROFILE_CORPUS });
    }
    let top_ngrams = ranked_ngrams(corpus, PROFILE_SIZE);
    Ok(LanguageProfile { lang: lang.to_string(), top_ngrams })
}

fn ranked_ngrams(input: &str, limit: usize) -> Vec<(String, usize)> {
    let normalized = normalize_chars(input);
    let mut counts: HashMap<String, usize> = HashMap::new();
    for n in 1..=3usize {
        if normalized.len() < n {
            continue;
        }
        for window in normalized.windows(n) {
            *counts.entry(window.iter().collect()).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(limit);
    ranked.into_iter().enumerate().map(|(rank, (g, _))| (g, rank)).collect()
}

fn normalize_chars(input: &str) -> Vec<char> {
    let mut out = Vec::new();
    let mut last_space = true;
    for ch in input.chars() {
        if ch.is_whitespace() {
            if !last_space {
                out.push(' ');
                last_space = true;
            }
        } else {
            out.extend(ch.to_lowercase());
            last_space = false;
        }
    }
    if out.last() == Some(&' ') {
        out.pop();
    }
    out
}

/// Classify text by out-of-place distance to each profile: for every
/// n-gram of the document profile, the rank difference in the language
/// profile (or the profile size when absent), summed. Winner is the
/// minimum distance; confidence is `1 - d_win/d_max` over the candidate
/// profiles.
pub fn detect_ngram(input: &str, profiles: &[LanguageProfile]) -> Option<DetectorVote> {
    if profiles.is_empty() {
        return None;
    }
    let low_confidence = input.chars().count() < 3;
    let doc = ranked_ngrams(input, PROFILE_SIZE);
    if doc.is_empty() {
        return None;
    }
    let mut distances: Vec<(u64, &str)> = profiles
        .iter()
        .map(|p| (out_of_place(&doc, p), p.lang.as_str()))
        .collect();
    distances.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let d_win = distances[0].0;
    let d_max = distances.iter().map(|d| d.0).max().unwrap_or(0);
    let confidence = if d_max == 0 { 0.0 } else { 1.0 - d_win as f64 / d_max as f64 };
    Some(DetectorVote { lang: distances[0].1.to_string(), confidence, low_confidence })
}

fn out_of_place(doc: &[(String, usize)], profile: &LanguageProfile) -> u64 {
    let ranks: HashMap<&str, usize> =
        profile.top_ngrams.iter().map(|(g, r)| (g.as_str(), *r)).collect();
    let miss = profile.top_ngrams.len().max(1) as u64;
    doc.iter()
        .map(|(g, doc_rank)| match ranks.get(g.as_str()) {
            Some(&r) => (r as i64 - *doc_rank as i64).unsigned_abs(),
            None => miss,
        })
        .sum()
}

/// N-gram detector bound to a set of profiles.
pub struct NgramDetector {
    name: String,
    profiles: Vec<LanguageProfile>,
}

impl NgramDetector {
    pub fn new(name: impl Into<String>, profiles: Vec<LanguageProfile>) -> Self {
        Self { name: name.into(), profiles }
    }
}

impl Detector for NgramDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn detect(&self, input: &str) -> Option<DetectorVote> {
        detect_ngram(input, &self.profiles)
    }
}

// ---------------------------------------------------------------------------
// Stopword detector
// ---------------------------------------------------------------------------

/// Stopword table for one language.
#[derive(Debug, Clone)]
pub struct StopwordTable {
    pub lang: String,
    pub words: Stopwords,
}

/// Classify by the fraction of tokens found in each language's stopword
/// table; the winner's fraction is the confidence. Abstains on empty
/// text or when no table matches a single token.
pub fn detect_stopword(input: &str, tables: &[StopwordTable]) -> Option<DetectorVote> {
    let tokens = text::words(input);
    if tokens.is_empty() || tables.is_empty() {
        return None;
    }
    let mut scored: Vec<(f64, &str)> = tables
        .iter()
        .map(|t| {
            let hits = tokens.iter().filter(|tok| t.words.contains(tok)).count();
            (hits as f64 / tokens.len() as f64, t.lang.as_str())
        })
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.1.cmp(b.1))
    });
    if scored[0].0 == 0.0 {
        return None;
    }
    Some(DetectorVote {
        lang: scored[0].1.to_string(),
        confidence: scored[0].0,
        low_confidence: false,
    })
}

pub struct StopwordDetector {
    name: String,
    tables: Vec<StopwordTable>,
}

impl StopwordDetector {
    pub fn new(name: impl Into<String>, tables: Vec<StopwordTable>) -> Self {
        Self { name: name.into(), tables }
    }
}

impl Detector for StopwordDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn detect(&self, input: &str) -> Option<DetectorVote> {
        detect_stopword(input, &self.tables)
    }
}

// ---------------------------------------------------------------------------
// Byte-bigram Bayes detector
// ---------------------------------------------------------------------------

/// Multinomial naive Bayes over byte bigrams with add-one smoothing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BayesModel {
    classes: Vec<BayesClass>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BayesClass {
    lang: String,
    counts: HashMap<u16, u64>,
    total: u64,
}

const BIGRAM_ALPHABET: f64 = 65536.0;

impl BayesModel {
    /// Train one class per (language, corpus) pair.
    pub fn train(corpora: &[(&str, &str)]) -> Self {
        let classes = corpora
            .iter()
            .map(|(lang, corpus)| {
                let mut counts: HashMap<u16, u64> = HashMap::new();
                let mut total = 0;
                for bigram in byte_bigrams(corpus) {
                    *counts.entry(bigram).or_insert(0) += 1;
                    total += 1;
                }
                BayesClass { lang: lang.to_string(), counts, total }
            })
            .collect();
        Self { classes }
    }

    /// Log-likelihood of the text under one class (uniform priors).
    pub fn log_likelihood(&self, class: usize, input: &str) -> f64 {
        let c = &self.classes[class];
        byte_bigrams(input)
            .map(|b| {
                let count = c.counts.get(&b).copied().unwrap_or(0);
                ((count + 1) as f64 / (c.total as f64 + BIGRAM_ALPHABET)).ln()
            })
            .sum()
    }
}

fn byte_bigrams(input: &str) -> impl Iterator<Item = u16> + '_ {
    input.as_bytes().windows(2).map(|w| u16::from_le_bytes([w[0], w[1]]))
}

/// Argmax posterior with softmax-normalized confidence. Abstains when the
/// text has no byte bigram.
pub fn detect_bayes(input: &str, model: &BayesModel) -> Option<DetectorVote> {
    if input.len() < 2 || model.classes.is_empty() {
        return None;
    }
    let scores: Vec<f64> =
        (0..model.classes.len()).map(|c| model.log_likelihood(c, input)).collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best]
            || (s == scores[best] && model.classes[i].lang < model.classes[best].lang)
        {
            best = i;
        }
    }
    Some(DetectorVote {
        lang: model.classes[best].lang.clone(),
        confidence: exps[best] / sum,
        low_confidence: false,
    })
}

pub struct BayesDetector {
    name: String,
    model: BayesModel,
}

impl BayesDetector {
    pub fn new(name: impl Into<String>, model: BayesModel) -> Self {
        Self { name: name.into(), model }
    }
}

impl Detector for BayesDetector {
    fn name(&self) -> &str {
        &self.name
    }

    fn detect(&self, input: &str) -> Option<DetectorVote> {
        detect_bayes(input, &self.model)
    }
}

// ---------------------------------------------------------------------------
// Majority vote
// ---------------------------------------------------------------------------

/// Combine detector votes: plurality wins; ties break by the higher
/// summed confidence, then by lexicographic language code. Abstentions do
/// not vote and never change a winner. All-abstain yields "unknown".
pub fn detect_majority(input: &str, detectors: &[Box<dyn Detector>]) -> Verdict {
    let mut per_detector = BTreeMap::new();
    let mut tally: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for d in detectors {
        match d.detect(input) {
            Some(vote) => {
                per_detector.insert(d.name().to_string(), (vote.lang.clone(), vote.confidence));
                let entry = tally.entry(vote.lang).or_insert((0, 0.0));
                entry.0 += 1;
                entry.1 += vote.confidence;
            }
            None => {
                per_detector.insert(d.name().to_string(), ("unknown".to_string(), 0.0));
            }
        }
    }
    let lang = tally
        .iter()
        .max_by(|a, b| {
            a.1 .0
                .cmp(&b.1 .0)
                .then_with(|| a.1 .1.partial_cmp(&b.1 .1).unwrap_or(std::cmp::Ordering::Equal))
                .then_with(|| b.0.cmp(a.0)) // lexicographically smaller code wins ties
        })
        .map(|(lang, _)| lang.clone())
        .unwrap_or_else(|| "unknown".to_string());
    Verdict { lang, per_detector }
}

// ---------------------------------------------------------------------------
// Built-in six-voter ensemble
// ---------------------------------------------------------------------------

/// The six built-in languages.
pub const BUILTIN_LANGS: [&str; 6] = ["de", "en", "es", "fr", "it", "pt"];

macro_rules! corpus_pair {
    ($lang:literal) => {
        (
            $lang,
            include_str!(concat!("../assets/langid/", $lang, "_a.txt")),
            include_str!(concat!("../assets/langid/", $lang, "_b.txt")),
        )
    };
}

fn builtin_corpora() -> [(&'static str, &'static str, &'static str); 6] {
    [
        corpus_pair!("de"),
        corpus_pair!("en"),
        corpus_pair!("es"),
        corpus_pair!("fr"),
        corpus_pair!("it"),
        corpus_pair!("pt"),
    ]
}

fn builtin_stopword_list(lang: &str) -> &'static str {
    match lang {
        "de" => include_str!("../assets/stopwords/de.txt"),
        "en" => include_str!("../assets/stopwords/en.txt"),
        "es" => include_str!("../assets/stopwords/es.txt"),
        "fr" => include_str!("../assets/stopwords/fr.txt"),
        "it" => include_str!("../assets/stopwords/it.txt"),
        "pt" => include_str!("../assets/stopwords/pt.txt"),
        _ => "",
    }
}

/// Build the default six-voter ensemble: the n-gram, stopword, and Bayes
/// detectors, each instantiated twice with independent training material
/// (corpus halves A/B for n-gram and Bayes, alternating stopword-list
/// halves for the stopword voters).
pub fn default_ensemble() -> Vec<Box<dyn Detector>> {
    let corpora = builtin_corpora();

    let profiles = |which: usize| -> Vec<LanguageProfile> {
        corpora
            .iter()
            .map(|(lang, a, b)| {
                let corpus = if which == 0 { a } else { b };
                train_profile(corpus, lang).expect("built-in corpora exceed the minimum size")
            })
            .collect()
    };

    let tables = |which: usize| -> Vec<StopwordTable> {
        BUILTIN_LANGS
            .iter()
            .map(|lang| {
                let list: Vec<&str> = builtin_stopword_list(lang)
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .collect();
                let half: Vec<&str> = list
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % 2 == which)
                    .map(|(_, w)| *w)
                    .collect();
                StopwordTable {
                    lang: lang.to_string(),
                    words: Stopwords::from_word_list(&half.join("\n")),
                }
            })
            .collect()
    };

    let bayes = |which: usize| -> BayesModel {
        let pairs: Vec<(&str, &str)> = corpora
            .iter()
            .map(|(lang, a, b)| (*lang, if which == 0 { *a } else { *b }))
            .collect();
        BayesModel::train(&pairs)
    };

    vec![
        Box::new(NgramDetector::new("ngram-a", profiles(0))),
        Box::new(NgramDetector::new("ngram-b", profiles(1))),
        Box::new(StopwordDetector::new("stopword-a", tables(0))),
        Box::new(StopwordDetector::new("stopword-b", tables(1))),
        Box::new(BayesDetector::new("bayes-a", bayes(0))),
        Box::new(BayesDetector::new("bayes-b", bayes(1))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    struct FixedVote(&'static str, Option<(&'static str, f64)>);

    impl Detector for FixedVote {
        fn name(&self) -> &str {
            self.0
        }
        fn detect(&self, _: &str) -> Option<DetectorVote> {
            self.1.map(|(lang, confidence)| DetectorVote {
                lang: lang.to_string(),
                confidence,
                low_confidence: false,
            })
        }
    }

    #[test]
    fn profile_single_symbol() {
        let corpus = "a".repeat(1200);
        let profile = train_profile(&corpus, "xx").unwrap();
        assert_eq!(profile.top_ngrams[0], ("a".to_string(), 0));
    }

    #[test]
    fn profile_deterministic() {
        let corpus = include_str!("../assets/langid/en_a.txt");
        assert_eq!(train_profile(corpus, "en").unwrap(), train_profile(corpus, "en").unwrap());
    }

    #[test]
    fn profile_rejects_small_corpus() {
        assert!(matches!(train_profile("too small", "xx"), Err(Error::CorpusTooSmall { .. })));
    }

    #[test]
    fn english_profile_contains_space_th() {
        let corpus = include_str!("../assets/langid/en_a.txt");
        let profile = train_profile(corpus, "en").unwrap();
        let rank = profile.top_ngrams.iter().find(|(g, _)| g == " th").map(|(_, r)| *r);
        assert!(rank.is_some_and(|r| r < 20), "' th' must rank in the top 20: {rank:?}");
    }

    #[test]
    fn ngram_self_match_full_confidence() {
        let corpora = builtin_corpora();
        let profiles: Vec<LanguageProfile> =
            corpora.iter().map(|(l, a, _)| train_profile(a, l).unwrap()).collect();
        let vote = detect_ngram(corpora[1].1, &profiles).unwrap();
        assert_eq!(vote.lang, "en");
        assert_eq!(vote.confidence, 1.0);
    }

    #[test]
    fn ngram_short_text_flagged() {
        let corpora = builtin_corpora();
        let profiles: Vec<LanguageProfile> =
            corpora.iter().map(|(l, a, _)| train_profile(a, l).unwrap()).collect();
        let vote = detect_ngram("ab", &profiles).unwrap();
        assert!(vote.low_confidence);
    }

    #[test]
    fn ngram_classifies_english_paragraph() {
        let corpora = builtin_corpora();
        let profiles: Vec<LanguageProfile> = corpora
            .iter()
            .filter(|(l, _, _)| matches!(*l, "en" | "de" | "fr"))
            .map(|(l, a, _)| train_profile(a, l).unwrap())
            .collect();
        let vote = detect_ngram(
            "This paragraph describes how the service handles personal information and the choices available to you.",
            &profiles,
        )
        .unwrap();
        assert_eq!(vote.lang, "en");
    }

    #[test]
    fn stopword_detection() {
        let tables: Vec<StopwordTable> = ["en", "de"]
            .iter()
            .map(|l| StopwordTable {
                lang: l.to_string(),
                words: Stopwords::from_word_list(builtin_stopword_list(l)),
            })
            .collect();
        let vote = detect_stopword("the of and to", &tables).unwrap();
        assert_eq!(vote.lang, "en");
        assert_eq!(vote.confidence, 1.0);

        let vote = detect_stopword("der und die das", &tables).unwrap();
        assert_eq!(vote.lang, "de");

        assert!(detect_stopword("", &tables).is_none());
        assert!(detect_stopword("zzzqqq xxx", &tables).is_none());
    }

    #[test]
    fn bayes_self_classification() {
        let model =
            BayesModel::train(&[("en", "the data we collect"), ("de", "die daten die wir erheben")]);
        let vote = detect_bayes("the data we collect", &model).unwrap();
        assert_eq!(vote.lang, "en");
    }

    #[test]
    fn bayes_uniform_model_ties_lexicographically() {
        let model = BayesModel::train(&[("zz", "same text"), ("aa", "same text")]);
        let vote = detect_bayes("same", &model).unwrap();
        assert_eq!(vote.lang, "aa");
    }

    #[test]
    fn bayes_hand_posterior_two_class() {
        // Class A trained on "aaaa" (3 'aa' bigrams), class B on "bbbb".
        let model = BayesModel::train(&[("A", "aaaa"), ("B", "bbbb")]);
        // Text "aab" has bigrams "aa" and "ab".
        // log L_A = ln(4/(3+65536)) + ln(1/(3+65536))
        // log L_B = ln(1/(3+65536)) + ln(1/(3+65536))
        let denom: f64 = 3.0 + 65536.0;
        let la = (4.0 / denom).ln() + (1.0 / denom).ln();
        let lb = (1.0 / denom).ln() * 2.0;
        assert!((model.log_likelihood(0, "aab") - la).abs() < 1e-12);
        assert!((model.log_likelihood(1, "aab") - lb).abs() < 1e-12);
        let vote = detect_bayes("aab", &model).unwrap();
        assert_eq!(vote.lang, "A");
        let expected_conf = 1.0 / (1.0 + (lb - la).exp());
        assert!((vote.confidence - expected_conf).abs() < 1e-12);
    }

    #[test]
    fn majority_strict_vote() {
        let detectors: Vec<Box<dyn Detector>> = vec![
            Box::new(FixedVote("d1", Some(("en", 0.5)))),
            Box::new(FixedVote("d2", Some(("en", 0.6)))),
            Box::new(FixedVote("d3", Some(("fr", 0.9)))),
        ];
        assert_eq!(detect_majority("x", &detectors).lang, "en");
    }

    #[test]
    fn majority_tie_breaks_on_confidence() {
        let detectors: Vec<Box<dyn Detector>> = vec![
            Box::new(FixedVote("d1", Some(("en", 0.9)))),
            Box::new(FixedVote("d2", Some(("fr", 0.4)))),
        ];
        assert_eq!(detect_majority("x", &detectors).lang, "en");
    }

    #[test]
    fn majority_tie_breaks_lexicographically() {
        let detectors: Vec<Box<dyn Detector>> = vec![
            Box::new(FixedVote("d1", Some(("fr", 0.5)))),
            Box::new(FixedVote("d2", Some(("en", 0.5)))),
        ];
        assert_eq!(detect_majority("x", &detectors).lang, "en");
    }

    #[test]
    fn abstaining_detector_never_changes_winner() {
        let base: Vec<Box<dyn Detector>> = vec![
            Box::new(FixedVote("d1", Some(("en", 0.5)))),
            Box::new(FixedVote("d2", Some(("fr", 0.4)))),
        ];
        let with_abstain: Vec<Box<dyn Detector>> = vec![
            Box::new(FixedVote("d1", Some(("en", 0.5)))),
            Box::new(FixedVote("d2", Some(("fr", 0.4)))),
            Box::new(FixedVote("d3", None)),
        ];
        let a = detect_majority("x", &base);
        let b = detect_majority("x", &with_abstain);
        assert_eq!(a.lang, b.lang);
        assert_eq!(b.per_detector["d3"], ("unknown".to_string(), 0.0));
    }

    #[test]
    fn all_abstain_is_unknown() {
        let detectors: Vec<Box<dyn Detector>> = vec![Box::new(FixedVote("d1", None))];
        assert_eq!(detect_majority("x", &detectors).lang, "unknown");
    }

    #[test]
    fn majority_permutation_invariant() {
        let votes: Vec<(&str, Option<(&str, f64)>)> = vec![
            ("a", Some(("en", 0.2))),
            ("b", Some(("fr", 0.8))),
            ("c", Some(("en", 0.3))),
            ("d", Some(("de", 0.9))),
            ("e", None),
        ];
        let orders: Vec<Vec<usize>> =
            vec![vec![0, 1, 2, 3, 4], vec![4, 3, 2, 1, 0], vec![2, 0, 4, 1, 3]];
        let mut winners = Vec::new();
        for order in orders {
            let detectors: Vec<Box<dyn Detector>> = order
                .iter()
                .map(|&i| Box::new(FixedVote(votes[i].0, votes[i].1)) as Box<dyn Detector>)
                .collect();
            winners.push(detect_majority("x", &detectors).lang);
        }
        assert!(winners.windows(2).all(|w| w[0] == w[1]), "{winners:?}");
    }

    #[test]
    fn ensemble_detects_all_six_languages() {
        let ensemble = default_ensemble();
        let samples = [
            ("en", "We explain in this notice which information our devices record and how you can object to processing."),
            ("de", "In dieser Erklärung beschreiben wir, welche Daten unsere Geräte erfassen und wie Sie der Verarbeitung widersprechen können."),
            ("fr", "Dans cette déclaration, nous expliquons quelles données nos appareils collectent et comment vous pouvez vous opposer au traitement."),
            ("es", "En esta declaración explicamos qué datos recogen nuestros dispositivos y cómo puede oponerse al tratamiento."),
            ("it", "In questa informativa spieghiamo quali dati raccolgono i nostri dispositivi e come potete opporvi al trattamento."),
            ("pt", "Nesta declaração explicamos quais dados os nossos dispositivos recolhem e como pode opor-se ao tratamento."),
        ];
        for (lang, sample) in samples {
            let verdict = detect_majority(sample, &ensemble);
            assert_eq!(verdict.lang, lang, "sample: {sample}");
            assert_eq!(verdict.per_detector.len(), 6);
        }
    }
}
