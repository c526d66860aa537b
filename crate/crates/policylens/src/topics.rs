//! LDA topic modeling with collapsed Gibbs sampling, NPMI-based topic
//! coherence, and taxonomy keyword counting.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::text::{self, PhraseMatcher};

/// Built-in privacy-attribute taxonomy.
pub const TAXONOMY_JSON: &str = include_str!("../assets/taxonomy.json");

/// A fitted topic model. `phi` is K×V (topic-word), `theta` is D×K
/// (document-topic); every row sums to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicModel {
    pub k: usize,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub vocab: Vec<String>,
}

impl TopicModel {
    /// Top `n` vocabulary indices of a topic by descending probability,
    /// ties by index.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.vocab.len()).collect();
        order.sort_by(|&a, &b| {
            self.phi[topic][b]
                .partial_cmp(&self.phi[topic][a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order.truncate(n);
        order
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Default document-topic smoothing: 50/K.
pub fn default_alpha(k: usize) -> f64 {
    50.0 / k as f64
}

/// Default topic-word smoothing.
pub const DEFAULT_BETA: f64 = 0.01;

/// Default Gibbs sweeps.
pub const DEFAULT_ITERATIONS: usize = 1000;

/// Fit a topic model by collapsed Gibbs sampling.
///
/// `docs` are pre-tokenized. `alpha = None` selects 50/K. Runs are
/// deterministic for a fixed seed and invariant to document order: the
/// sampler visits documents in content-hash order and every document draws
/// from its own seed stream keyed by that hash.
pub fn lda_fit(
    docs: &[Vec<String>],
    k: usize,
    alpha: Option<f64>,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<TopicModel> {
    if k == 0 {
        return Err(Error::InvalidInput("topic count must be at least 1".into()));
    }
    let alpha = alpha.unwrap_or_else(|| default_alpha(k));

    let mut vocab: Vec<String> = docs.iter().flatten().cloned().collect();
    vocab.sort();
    vocab.dedup();
    if docs.is_empty() || vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let index: HashMap<&str, usize> =
        vocab.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    let v = vocab.len();

    // Canonical scan order: by content hash, then original position.
    let hashes: Vec<u64> = docs.iter().map(|d| doc_hash(d)).collect();
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by_key(|&d| (hashes[d], d));

    let token_ids: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.iter().map(|t| index[t.as_str()]).collect())
        .collect();
    let mut assignments: Vec<Vec<usize>> = token_ids.iter().map(|d| vec![0; d.len()]).collect();

    let mut n_dk = vec![vec![0usize; k]; docs.len()];
    let mut n_kv = vec![vec![0usize; v]; k];
    let mut n_k = vec![0usize; k];

    let mut rngs: Vec<ChaCha8Rng> = Vec::with_capacity(docs.len());
    for &d in &order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ hashes[d]);
        for (pos, &w) in token_ids[d].iter().enumerate() {
            let topic = rng.gen_range(0..k);
            assignments[d][pos] = topic;
            n_dk[d][topic] += 1;
            n_kv[topic][w] += 1;
            n_k[topic] += 1;
        }
        rngs.push(rng);
    }

    let v_beta = v as f64 * beta;
    let mut weights = vec![0.0f64; k];
    for _ in 0..iterations {
        for (slot, &d) in order.iter().enumerate() {
            let rng = &mut rngs[slot];
            for pos in 0..token_ids[d].len() {
                let w = token_ids[d][pos];
                let old = assignments[d][pos];
                n_dk[d][old] -= 1;
                n_kv[old][w] -= 1;
                n_k[old] -= 1;

                let mut total = 0.0;
                for (t, wt) in weights.iter_mut().enumerate() {
                    *wt = (n_dk[d][t] as f64 + alpha) * (n_kv[t][w] as f64 + beta)
                        / (n_k[t] as f64 + v_beta);
                    total += *wt;
                }
                let mut target = rng.gen_range(0.0..total);
                let mut new = k - 1;
                for (t, &wt) in weights.iter().enumerate() {
                    if target < wt {
                        new = t;
                        break;
                    }
                    target -= wt;
                }

                assignments[d][pos] = new;
                n_dk[d][new] += 1;
                n_kv[new][w] += 1;
                n_k[new] += 1;
            }
        }
    }

    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            let denom = n_k[t] as f64 + v_beta;
            (0..v).map(|w| (n_kv[t][w] as f64 + beta) / denom).collect()
        })
        .collect();
    let theta: Vec<Vec<f64>> = (0..docs.len())
        .map(|d| {
            let len = token_ids[d].len() as f64;
            let denom = len + k as f64 * alpha;
            (0..k).map(|t| (n_dk[d][t] as f64 + alpha) / denom).collect()
        })
        .collect();

    Ok(TopicModel { k, phi, theta, alpha, beta, seed, vocab })
}

fn doc_hash(tokens: &[String]) -> u64 {
    let mut hasher = Sha256::new();
    for t in tokens {
        hasher.update(t.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

// ---------------------------------------------------------------------------
// Coherence
// ---------------------------------------------------------------------------

/// Per-topic coherence scores and their mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceScores {
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

/// Topic coherence from windowed co-occurrence.
///
/// For each topic's `top_n` words, pairwise NPMI is estimated from
/// sliding windows of `window` tokens (stride one, whole document when
/// shorter) with add-one smoothing. Each word gets an NPMI context vector
/// over the topic's top words; the pair score is the cosine of the two
/// vectors, and the topic's coherence is the mean over unordered pairs.
pub fn coherence(
    model: &TopicModel,
    docs: &[Vec<String>],
    top_n: usize,
    window: usize,
) -> Result<CoherenceScores> {
    if top_n > model.vocab.len() {
        return Err(Error::TopNExceedsVocab { top_n, vocab: model.vocab.len() });
    }
    let mut per_topic = Vec::with_capacity(model.k);
    for t in 0..model.k {
        let word_ids = model.top_words(t, top_n);
        let words: Vec<String> = word_ids.iter().map(|&i| model.vocab[i].clone()).collect();
        let npmi = pairwise_npmi(docs, &words, window);
        let n = words.len();
        if n < 2 {
            per_topic.push(0.0);
            continue;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                total += cosine_dense(&npmi[i], &npmi[j]);
                pairs += 1;
            }
        }
        per_topic.push(total / pairs as f64);
    }
    let mean = if per_topic.is_empty() {
        0.0
    } else {
        per_topic.iter().sum::<f64>() / per_topic.len() as f64
    };
    Ok(CoherenceScores { per_topic, mean })
}

/// NPMI matrix for a word list from sliding-window co-occurrence counts.
///
/// Probabilities use add-one smoothing over `W` windows:
/// `p(x) = (c(x)+1)/(W+2)`, and
/// `npmi(x,y) = ln(p(xy) / (p(x) p(y))) / -ln p(xy)`.
/// A pair that occurs in every window scores exactly 1; `npmi(x,x) = 1`.
pub fn pairwise_npmi(docs: &[Vec<String>], words: &[String], window: usize) -> Vec<Vec<f64>> {
    let n = words.len();
    let word_pos: HashMap<&str, usize> =
        words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let mut single = vec![0usize; n];
    let mut joint = vec![vec![0usize; n]; n];
    let mut total_windows = 0usize;

    for doc in docs {
        if doc.is_empty() {
            continue;
        }
        let w = window.max(1).min(doc.len());
        for start in 0..=doc.len() - w {
            total_windows += 1;
            let mut present = vec![false; n];
            for token in &doc[start..start + w] {
                if let Some(&i) = word_pos.get(token.as_str()) {
                    present[i] = true;
                }
            }
            for i in 0..n {
                if present[i] {
                    single[i] += 1;
                    for j in i + 1..n {
                        if present[j] {
                            joint[i][j] += 1;
                            joint[j][i] += 1;
                        }
                    }
                }
            }
        }
    }

    let denom = (total_windows + 2) as f64;
    let p_single: Vec<f64> = single.iter().map(|&c| (c + 1) as f64 / denom).collect();
    let mut npmi = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                npmi[i][j] = 1.0;
                continue;
            }
            let p_xy = (joint[i][j] + 1) as f64 / denom;
            npmi[i][j] = (p_xy / (p_single[i] * p_single[j])).ln() / -p_xy.ln();
        }
    }
    npmi
}

fn cosine_dense(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

// ---------------------------------------------------------------------------
// Keyword taxonomy
// ---------------------------------------------------------------------------

/// A named privacy attribute with its seed keywords.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaxonomyAttribute {
    pub name: String,
    pub definition: String,
    pub keywords: Vec<String>,
}

/// The privacy-attribute taxonomy (Collection, Sharing, Purpose, ...).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeywordTaxonomy {
    pub attributes: Vec<TaxonomyAttribute>,
}

impl Default for KeywordTaxonomy {
    fn default() -> Self {
        serde_json::from_str(TAXONOMY_JSON).expect("built-in taxonomy is valid")
    }
}

impl KeywordTaxonomy {
    pub fn from_json(json: &str) -> Result<Self> {
        let tax: Self = serde_json::from_str(json)?;
        tax.validate()?;
        Ok(tax)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names: Vec<&str> = self.attributes.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        let before = names.len();
        names.dedup();
        if names.len() != before {
            return Err(Error::Invariant("duplicate attribute names".into()));
        }
        for attr in &self.attributes {
            for k in &attr.keywords {
                if k != &k.to_lowercase() {
                    return Err(Error::Invariant(format!(
                        "keyword not lowercase in {}: {k:?}",
                        attr.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }
}

/// Keyword tally for one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeCount {
    pub count: usize,
    pub normalized_freq: f64,
}

/// Count seed-keyword hits per attribute.
///
/// Each attribute is matched independently with the longest-match phrase
/// matcher, so a keyword listed under two attributes counts for both.
/// `normalized_freq` divides by the total token count of the text.
pub fn keyword_counts(
    text_input: &str,
    taxonomy: &KeywordTaxonomy,
) -> BTreeMap<String, AttributeCount> {
    let tokens = text::words(text_input);
    let total = tokens.len();
    let mut out = BTreeMap::new();
    for attr in &taxonomy.attributes {
        let matcher = PhraseMatcher::new(&attr.keywords);
        let count = if tokens.is_empty() { 0 } else { matcher.count(&tokens) };
        let normalized_freq = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        out.insert(attr.name.clone(), AttributeCount { count, normalized_freq });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn single_topic_theta_is_one() {
        let docs = vec![toks("a b a"), toks("b b c")];
        let model = lda_fit(&docs, 1, None, DEFAULT_BETA, 20, 3).unwrap();
        for row in &model.theta {
            assert!((row[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_model() {
        let docs = vec![toks("a b c a"), toks("c d e"), toks("a e d d")];
        let m1 = lda_fit(&docs, 3, None, DEFAULT_BETA, 50, 42).unwrap();
        let m2 = lda_fit(&docs, 3, None, DEFAULT_BETA, 50, 42).unwrap();
        assert_eq!(m1.phi, m2.phi);
        assert_eq!(m1.theta, m2.theta);
    }

    #[test]
    fn document_order_invariance() {
        let docs = vec![toks("a b c a b"), toks("c d e c"), toks("f a e d")];
        let swapped = vec![docs[2].clone(), docs[0].clone(), docs[1].clone()];
        let m1 = lda_fit(&docs, 2, None, DEFAULT_BETA, 30, 9).unwrap();
        let m2 = lda_fit(&swapped, 2, None, DEFAULT_BETA, 30, 9).unwrap();
        assert_eq!(m1.phi, m2.phi);
        assert_eq!(m1.theta[0], m2.theta[1]);
        assert_eq!(m1.theta[1], m2.theta[2]);
        assert_eq!(m1.theta[2], m2.theta[0]);
    }

    #[test]
    fn rows_sum_to_one() {
        let docs = vec![toks("a b c"), toks("d e f a"), toks("b d f")];
        let model = lda_fit(&docs, 4, None, DEFAULT_BETA, 25, 1).unwrap();
        for row in model.phi.iter().chain(model.theta.iter()) {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row sums to {sum}");
            assert!(row.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn empty_corpus_is_error() {
        assert!(matches!(lda_fit(&[], 2, None, DEFAULT_BETA, 10, 0), Err(Error::EmptyCorpus)));
        let empty_docs = vec![Vec::new(), Vec::new()];
        assert!(matches!(
            lda_fit(&empty_docs, 2, None, DEFAULT_BETA, 10, 0),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn two_topic_synthetic_recovery() {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let half_a: Vec<String> = (0..10).map(|i| format!("alpha{i}")).collect();
        let half_b: Vec<String> = (0..10).map(|i| format!("beta{i}")).collect();
        let mut docs = Vec::new();
        for d in 0..50 {
            let source = if d % 2 == 0 { &half_a } else { &half_b };
            let doc: Vec<String> =
                (0..40).map(|_| source.choose(&mut rng).unwrap().clone()).collect();
            docs.push(doc);
        }
        let model = lda_fit(&docs, 2, Some(0.1), DEFAULT_BETA, 200, 13).unwrap();
        for t in 0..2 {
            let top = model.top_words(t, 10);
            let from_a =
                top.iter().filter(|&&w| model.vocab[w].starts_with("alpha")).count();
            let purity = from_a.max(10 - from_a) as f64 / 10.0;
            assert!(purity >= 0.9, "topic {t} purity {purity}");
        }
    }

    #[test]
    fn npmi_always_cooccurring_is_one() {
        // "x" and "y" appear together in every window that contains either.
        let docs = vec![toks("x y"), toks("x y"), toks("p q r s t u v w")];
        let words = vec!["x".to_string(), "y".to_string()];
        let npmi = pairwise_npmi(&docs, &words, 2);
        assert!((npmi[0][1] - 1.0).abs() < 1e-12, "got {}", npmi[0][1]);
        assert_eq!(npmi[0][0], 1.0);
    }

    #[test]
    fn npmi_disjoint_words_negative() {
        let mut docs = Vec::new();
        for _ in 0..50 {
            docs.push(toks("x a b c"));
            docs.push(toks("y d e f"));
        }
        let words = vec!["x".to_string(), "y".to_string()];
        let npmi = pairwise_npmi(&docs, &words, 4);
        assert!(npmi[0][1] < -0.5, "got {}", npmi[0][1]);
    }

    #[test]
    fn npmi_matches_hand_probabilities() {
        // Corpus of 3-token docs, window 3 -> one window per doc, W = 4:
        //   [x y z], [x y q], [x q z], [q q q]
        // c(x)=3, c(y)=2, c(z)=2, c(xy)=2, c(xz)=2, c(yz)=1.
        // With smoothing denominator W+2 = 6:
        //   p(x)=4/6, p(y)=3/6, p(z)=3/6, p(xy)=3/6, p(xz)=3/6, p(yz)=2/6.
        let docs = vec![toks("x y z"), toks("x y q"), toks("x q z"), toks("q q q")];
        let words = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let npmi = pairwise_npmi(&docs, &words, 3);
        let hand = |pxy: f64, px: f64, py: f64| (pxy / (px * py)).ln() / -pxy.ln();
        let p = |c: usize| (c + 1) as f64 / 6.0;
        assert!((npmi[0][1] - hand(p(2), p(3), p(2))).abs() < 1e-12);
        assert!((npmi[0][2] - hand(p(2), p(3), p(2))).abs() < 1e-12);
        assert!((npmi[1][2] - hand(p(1), p(2), p(2))).abs() < 1e-12);
    }

    #[test]
    fn coherence_rejects_top_n_over_vocab() {
        let docs = vec![toks("a b")];
        let model = lda_fit(&docs, 1, None, DEFAULT_BETA, 5, 0).unwrap();
        assert!(matches!(
            coherence(&model, &docs, 10, 20),
            Err(Error::TopNExceedsVocab { .. })
        ));
    }

    #[test]
    fn taxonomy_validates_and_counts() {
        let tax = KeywordTaxonomy::default();
        tax.validate().unwrap();
        assert_eq!(tax.attributes.len(), 11);

        let counts = keyword_counts("we collect your email address", &tax);
        assert!(counts["Collection"].count >= 2, "collect + email + address");
        assert_eq!(counts["Legislation"].count, 0);
    }

    #[test]
    fn keyword_counts_empty_text() {
        let tax = KeywordTaxonomy::default();
        for (_, c) in keyword_counts("", &tax) {
            assert_eq!(c.count, 0);
            assert_eq!(c.normalized_freq, 0.0);
        }
    }

    #[test]
    fn keyword_counts_match_naive_scan() {
        let tax = KeywordTaxonomy::default();
        let text_input = "We retain data in a secure database. Third party analytics \
                          providers receive location data when you consent. GDPR requests \
                          are honored; contact us to delete your account.";
        let counts = keyword_counts(text_input, &tax);

        // Naive oracle: greedy longest-match scan re-implemented inline.
        let tokens = text::words(text_input);
        for attr in &tax.attributes {
            let mut phrases: Vec<Vec<String>> =
                attr.keywords.iter().map(|k| text::words(k)).collect();
            phrases.sort_by(|a, b| b.len().cmp(&a.len()));
            let mut i = 0;
            let mut hits = 0;
            while i < tokens.len() {
                let mut matched = 0;
                for p in &phrases {
                    if !p.is_empty()
                        && i + p.len() <= tokens.len()
                        && tokens[i..i + p.len()] == p[..]
                    {
                        matched = p.len();
                        break;
                    }
                }
                if matched > 0 {
                    hits += 1;
                    i += matched;
                } else {
                    i += 1;
                }
            }
            assert_eq!(counts[&attr.name].count, hits, "attribute {}", attr.name);
        }
    }

    #[test]
    fn keyword_counts_additive_over_concatenation() {
        let tax = KeywordTaxonomy::default();
        let a = "we collect your email.";
        let b = "we share data with partners.";
        let ca = keyword_counts(a, &tax);
        let cb = keyword_counts(b, &tax);
        let cab = keyword_counts(&format!("{a} {b}"), &tax);
        for name in tax.attribute_names() {
            assert_eq!(cab[&name].count, ca[&name].count + cb[&name].count, "{name}");
        }
    }

    #[test]
    fn shared_keyword_counts_for_both_attributes() {
        let tax = KeywordTaxonomy::default();
        // "disable" appears under both Do Not Track and Choice.
        let counts = keyword_counts("you can disable tracking", &tax);
        assert_eq!(counts["Do Not Track"].count >= 1, counts["Choice"].count >= 1);
        assert!(counts["Do Not Track"].count >= 1);
        assert!(counts["Choice"].count >= 1);
    }
}
