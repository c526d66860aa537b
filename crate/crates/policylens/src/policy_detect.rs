//! Is this page a privacy/cookie policy? Keyphrase features, ANOVA-F
//! selection, and a soft-voting ensemble of linear SVM, random forest,
//! and logistic regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{
    forest_train, linear_svm_train, logreg_train, Dataset, ForestParams, LogisticModel,
    LogregParams, RandomForest, SvmModel, SvmParams,
};
use crate::text::{self, Stopwords};

/// Keyphrase extraction settings. Candidates are stopword-delimited token
/// runs of one to `max_phrase_len` tokens; a phrase is kept when
/// `count * sum(deg(w)/freq(w))` reaches `score_threshold`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KeyphraseConfig {
    pub score_threshold: f64,
    pub max_phrase_len: usize,
}

impl Default for KeyphraseConfig {
    fn default() -> Self {
        Self { score_threshold: 1.0, max_phrase_len: 3 }
    }
}

/// Extract scored keyphrases.
///
/// Tokens are lowercased and plural-folded. Candidate phrases are maximal
/// runs between stopwords/punctuation, capped at `max_phrase_len` tokens
/// (longer runs are not candidates). Word scores use the RAKE
/// degree-to-frequency ratio; a phrase's score is its occurrence count
/// times the sum of its word scores. Output is ordered by descending
/// score, ties by first occurrence.
pub fn extract_keyphrases(input: &str, cfg: &KeyphraseConfig) -> Vec<String> {
    let runs = candidate_runs(input, cfg.max_phrase_len);
    if runs.is_empty() {
        return Vec::new();
    }

    use std::collections::HashMap;
    let mut freq: HashMap<&str, f64> = HashMap::new();
    let mut deg: HashMap<&str, f64> = HashMap::new();
    for run in &runs {
        for token in run {
            *freq.entry(token).or_insert(0.0) += 1.0;
            *deg.entry(token).or_insert(0.0) += run.len() as f64;
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for run in &runs {
        let phrase = run.join(" ");
        let c = counts.entry(phrase.clone()).or_insert(0);
        if *c == 0 {
            order.push(phrase);
        }
        *c += 1;
    }

    let mut scored: Vec<(f64, usize, String)> = order
        .into_iter()
        .enumerate()
        .map(|(first_seen, phrase)| {
            let word_sum: f64 =
                phrase.split(' ').map(|w| deg[w] / freq[w]).sum();
            let score = counts[&phrase] as f64 * word_sum;
            (score, first_seen, phrase)
        })
        .filter(|(score, _, _)| *score >= cfg.score_threshold)
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1))
    });
    scored.into_iter().map(|(_, _, p)| p).collect()
}

/// Stopword-delimited runs of folded tokens, length 1..=max.
fn candidate_runs(input: &str, max_len: usize) -> Vec<Vec<String>> {
    let stopwords = Stopwords::english();
    let mut runs = Vec::new();
    let mut current: Vec<String> = Vec::new();
    // Punctuation splits runs too, so work sentence-fragment-wise.
    for fragment in input.split(|c: char| ".,;:!?()[]{}\"\u{201c}\u{201d}".contains(c)) {
        for token in text::words(fragment) {
            if stopwords.contains(&token) || !text::is_wordlike(&token) {
                if !current.is_empty() {
                    push_run(&mut runs, &mut current, max_len);
                }
            } else {
                current.push(text::fold_plural(&token));
            }
        }
        if !current.is_empty() {
            push_run(&mut runs, &mut current, max_len);
        }
    }
    runs
}

fn push_run(runs: &mut Vec<Vec<String>>, current: &mut Vec<String>, max_len: usize) {
    let run = std::mem::take(current);
    if (1..=max_len).contains(&run.len()) {
        runs.push(run);
    }
}

/// Ordered keyphrase vocabulary with the ANOVA-selected subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeyphraseFeatureSpace {
    pub phrases: Vec<String>,
    pub selected_indices: Vec<usize>,
}

impl KeyphraseFeatureSpace {
    pub fn validate(&self) -> Result<()> {
        let mut sorted = self.phrases.clone();
        sorted.sort();
        let n = sorted.len();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::Invariant("duplicate phrases in feature space".into()));
        }
        if self.selected_indices.iter().any(|&i| i >= self.phrases.len()) {
            return Err(Error::Invariant("selected index outside phrase range".into()));
        }
        Ok(())
    }
}

/// Presence/absence matrix: cell (d, p) is 1 iff phrase p occurs in doc d
/// (independent substring search over folded tokens, not greedy
/// consumption).
pub fn binary_feature_matrix<S: AsRef<str>>(docs: &[S], space: &KeyphraseFeatureSpace) -> Vec<Vec<u8>> {
    let phrase_tokens: Vec<Vec<String>> =
        space.phrases.iter().map(|p| p.split(' ').map(str::to_string).collect()).collect();
    docs.iter()
        .map(|doc| {
            let tokens: Vec<String> =
                text::words(doc.as_ref()).iter().map(|t| text::fold_plural(t)).collect();
            phrase_tokens
                .iter()
                .map(|p| u8::from(contains_run(&tokens, p)))
                .collect()
        })
        .collect()
}

fn contains_run(tokens: &[String], phrase: &[String]) -> bool {
    if phrase.is_empty() || phrase.len() > tokens.len() {
        return false;
    }
    tokens.windows(phrase.len()).any(|w| w == phrase)
}

/// Rank features by one-way ANOVA F-value and keep the top k indices.
///
/// Features with zero within-group variance and nonzero between-group
/// variance (perfect separators) rank above every finite-F feature.
/// Constant features score F = 0. Ties keep the lower index.
pub fn anova_f_select(matrix: &[Vec<u8>], labels: &[bool], k: usize) -> Result<Vec<usize>> {
    let n = matrix.len();
    if n == 0 || labels.len() != n {
        return Err(Error::InvalidInput("matrix/label size mismatch".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::SingleClass);
    }
    let n_features = matrix[0].len();
    if k > n_features {
        return Err(Error::TooManyFeatures { k, features: n_features });
    }

    #[derive(PartialEq)]
    struct Ranked {
        infinite: bool,
        f: f64,
        index: usize,
    }

    let mut ranked: Vec<Ranked> = (0..n_features)
        .map(|j| {
            let column: Vec<f64> = matrix.iter().map(|row| row[j] as f64).collect();
            let (between, within) = anova_components(&column, labels);
            if within == 0.0 && between > 0.0 {
                Ranked { infinite: true, f: f64::INFINITY, index: j }
            } else if within == 0.0 {
                Ranked { infinite: false, f: 0.0, index: j }
            } else {
                let df_within = (n - 2) as f64;
                Ranked { infinite: false, f: between / (within / df_within), index: j }
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.infinite
            .cmp(&a.infinite)
            .then_with(|| b.f.partial_cmp(&a.f).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.index.cmp(&b.index))
    });
    Ok(ranked.into_iter().take(k).map(|r| r.index).collect())
}

/// (between-group sum of squares / df(=1), within-group sum of squares).
fn anova_components(column: &[f64], labels: &[bool]) -> (f64, f64) {
    let n = column.len() as f64;
    let grand = column.iter().sum::<f64>() / n;
    let mut between = 0.0;
    let mut within = 0.0;
    for &class in &[true, false] {
        let members: Vec<f64> = column
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == class)
            .map(|(&x, _)| x)
            .collect();
        let m = members.len() as f64;
        let mean = members.iter().sum::<f64>() / m;
        between += m * (mean - grand) * (mean - grand);
        within += members.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>();
    }
    (between, within)
}

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

/// One ensemble member. `Fixed` emits a constant probability and exists
/// so tests can pin the soft-vote arithmetic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Member {
    Logistic(LogisticModel),
    Svm(SvmModel),
    Forest(RandomForest),
    Fixed { probability: f64 },
}

impl Member {
    /// Probability that the sample is a policy (class 1).
    fn policy_probability(&self, x: &[f64]) -> f64 {
        match self {
            Member::Logistic(m) => m.predict_proba(x)[1],
            Member::Svm(m) => m.predict_proba(x)[1],
            Member::Forest(m) => m.predict_proba(x)[1],
            Member::Fixed { probability } => *probability,
        }
    }
}

/// Serialized format version for [`EnsembleModel`].
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Soft-voting policy detector: the ensemble probability is the
/// arithmetic mean of the member probabilities; decision threshold 0.5.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub version: u32,
    pub space: KeyphraseFeatureSpace,
    pub members: Vec<Member>,
}

impl EnsembleModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(json)?;
        model.space.validate()?;
        if model.members.is_empty() {
            return Err(Error::ModelNotTrained);
        }
        Ok(model)
    }

    fn features(&self, input: &str) -> Vec<f64> {
        let row = &binary_feature_matrix(&[input], &self.space)[0];
        self.space.selected_indices.iter().map(|&i| row[i] as f64).collect()
    }
}

/// Training knobs for the detector.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DetectorParams {
    pub keyphrase: KeyphraseConfig,
    /// features kept by ANOVA selection (clamped to the vocabulary size)
    pub select_k: usize,
    pub seed: u64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self { keyphrase: KeyphraseConfig::default(), select_k: 100, seed: 0 }
    }
}

/// Train the soft-voting ensemble on labeled documents
/// (`labels[d]` = true for policies).
pub fn train_policy_detector<S: AsRef<str>>(
    docs: &[S],
    labels: &[bool],
    params: &DetectorParams,
) -> Result<EnsembleModel> {
    if docs.len() != labels.len() {
        return Err(Error::InvalidInput("doc/label count mismatch".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos < 2 || n_neg < 2 {
        return Err(Error::TooFewPerClass { min: 2, got: n_pos.min(n_neg) });
    }

    // Vocabulary: union of per-document keyphrases in first-seen order.
    let mut phrases: Vec<String> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for doc in docs {
        for phrase in extract_keyphrases(doc.as_ref(), &params.keyphrase) {
            if seen.insert(phrase.clone()) {
                phrases.push(phrase);
            }
        }
    }
    if phrases.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut space = KeyphraseFeatureSpace { phrases, selected_indices: Vec::new() };
    let matrix = binary_feature_matrix(docs, &space);
    let k = params.select_k.min(space.phrases.len());
    space.selected_indices = anova_f_select(&matrix, labels, k)?;

    let features: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| space.selected_indices.iter().map(|&i| row[i] as f64).collect())
        .collect();
    let dataset = Dataset::new(
        features,
        labels.iter().map(|&l| usize::from(l)).collect(),
        space.selected_indices.iter().map(|&i| space.phrases[i].clone()).collect(),
        vec!["other".into(), "policy".into()],
    )?;

    let members = vec![
        Member::Svm(linear_svm_train(&dataset, &SvmParams::default())?),
        Member::Forest(forest_train(
            &dataset,
            &ForestParams { seed: params.seed, ..ForestParams::default() },
        )?),
        Member::Logistic(logreg_train(&dataset, &LogregParams::default())?),
    ];
    Ok(EnsembleModel { version: MODEL_FORMAT_VERSION, space, members })
}

/// Mean member probability that the text is a policy.
pub fn predict_is_policy(model: &EnsembleModel, input: &str) -> Result<f64> {
    if model.members.is_empty() {
        return Err(Error::ModelNotTrained);
    }
    let x = model.features(input);
    let total: f64 = model.members.iter().map(|m| m.policy_probability(&x)).sum();
    Ok(total / model.members.len() as f64)
}
