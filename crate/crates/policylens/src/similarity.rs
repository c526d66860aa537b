//! TF-IDF vectorization, cosine similarity, sentence-level policy diffs,
//! PCA projection, and DBSCAN clustering.
//!
//! Vectors use the smoothed formula `idf(t) = ln((1+N)/(1+df(t))) + 1` and
//! are L2-normalized on emission, so scores are bit-reproducible for a
//! fixed corpus.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{self, SentenceSplitter, Stopwords};

/// Sparse vector: (term index, weight) sorted by index.
pub type SparseVector = Vec<(usize, f64)>;

/// Fitted TF-IDF vocabulary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfIdfSpace {
    pub vocab: Vec<String>,
    pub df: Vec<usize>,
    pub idf: Vec<f64>,
    pub n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl TfIdfSpace {
    pub fn term_index(&self, term: &str) -> Option<usize> {
        if self.index.is_empty() && !self.vocab.is_empty() {
            // deserialized without the side table; fall back to scan
            return self.vocab.iter().position(|t| t == term);
        }
        self.index.get(term).copied()
    }

    pub fn dimensions(&self) -> usize {
        self.vocab.len()
    }
}

/// Fit a TF-IDF space over cleaned unigrams of the corpus.
pub fn tfidf_fit<S: AsRef<str>>(corpus: &[S]) -> Result<TfIdfSpace> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let stopwords = Stopwords::english();
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in corpus {
        let mut seen: Vec<String> = text::clean_tokens(doc.as_ref(), &stopwords);
        seen.sort();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let n_docs = corpus.len();
    let vocab: Vec<String> = df.keys().cloned().collect();
    let dfs: Vec<usize> = df.values().copied().collect();
    let idf: Vec<f64> = dfs
        .iter()
        .map(|&d| ((1 + n_docs) as f64 / (1 + d) as f64).ln() + 1.0)
        .collect();
    let index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(TfIdfSpace { vocab, df: dfs, idf, n_docs, index })
}

/// Transform text into an L2-normalized tf·idf vector. Out-of-vocabulary
/// terms are dropped; empty text maps to the zero vector.
pub fn tfidf_transform(space: &TfIdfSpace, doc: &str) -> SparseVector {
    let stopwords = Stopwords::english();
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in text::clean_tokens(doc, &stopwords) {
        if let Some(i) = space.term_index(&token) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let mut vector: SparseVector =
        counts.into_iter().map(|(i, tf)| (i, tf * space.idf[i])).collect();
    let norm = vector.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, w) in &mut vector {
            *w /= norm;
        }
    }
    vector
}

/// Cosine similarity; zero vectors are defined to score 0.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let dot = sparse_dot(a, b);
    let na = a.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    let nb = b.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn sparse_dot(a: &SparseVector, b: &SparseVector) -> f64 {
    let mut dot = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot
}

/// Pairwise cosine matrix, computed once per unordered pair so the result
/// is exactly symmetric.
pub fn similarity_matrix(vectors: &[SparseVector]) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = if vectors[i].is_empty() { 0.0 } else { 1.0 };
        for j in i + 1..n {
            let s = cosine(&vectors[i], &vectors[j]);
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    m
}

// ---------------------------------------------------------------------------
// Sentence-level diffs
// ---------------------------------------------------------------------------

/// A sentence pair that changed without being rewritten outright.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalPair {
    pub old_sentence: String,
    pub new_sentence: String,
    pub similarity: f64,
}

/// Sentence-level change sets between two versions of a policy.
///
/// Every old-version sentence lands in exactly one of `deletions`,
/// `unchanged`, or an incremental pair; every new-version sentence in
/// exactly one of `additions`, `unchanged`, or an incremental pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyDiff {
    pub additions: Vec<String>,
    pub deletions: Vec<String>,
    pub unchanged: Vec<String>,
    pub incremental: Vec<IncrementalPair>,
}

/// Diff two policy texts at sentence granularity.
///
/// Whitespace-normalized identical sentences pair up as unchanged. The
/// remainder are matched greedily by descending token-level cosine; pairs
/// at or above `incremental_threshold` are incremental, the rest become
/// deletions and additions.
pub fn sentence_diff(old_text: &str, new_text: &str, incremental_threshold: f64) -> PolicyDiff {
    let splitter = SentenceSplitter::default();
    let old: Vec<String> = splitter.split(old_text);
    let new: Vec<String> = splitter.split(new_text);

    let mut old_used = vec![false; old.len()];
    let mut new_used = vec![false; new.len()];
    let mut diff = PolicyDiff::default();

    // Exact matches first (multiset pairing in document order).
    let mut pool: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, s) in old.iter().enumerate() {
        pool.entry(s.as_str()).or_default().push(i);
    }
    for slots in pool.values_mut() {
        slots.reverse(); // pop() yields lowest index first
    }
    for (j, s) in new.iter().enumerate() {
        if let Some(slots) = pool.get_mut(s.as_str()) {
            if let Some(i) = slots.pop() {
                old_used[i] = true;
                new_used[j] = true;
                diff.unchanged.push(s.clone());
            }
        }
    }

    // Token-count vectors for the leftovers.
    let vecs = |s: &str| -> HashMap<String, f64> {
        let mut m = HashMap::new();
        for t in text::words(s) {
            *m.entry(t).or_insert(0.0) += 1.0;
        }
        m
    };
    let old_vecs: Vec<_> = old.iter().map(|s| vecs(s)).collect();
    let new_vecs: Vec<_> = new.iter().map(|s| vecs(s)).collect();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, ov) in old_vecs.iter().enumerate() {
        if old_used[i] {
            continue;
        }
        for (j, nv) in new_vecs.iter().enumerate() {
            if new_used[j] {
                continue;
            }
            let s = token_cosine(ov, nv);
            if s >= incremental_threshold {
                candidates.push((s, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });
    for (s, i, j) in candidates {
        if old_used[i] || new_used[j] {
            continue;
        }
        old_used[i] = true;
        new_used[j] = true;
        diff.incremental.push(IncrementalPair {
            old_sentence: old[i].clone(),
            new_sentence: new[j].clone(),
            similarity: s,
        });
    }

    for (i, s) in old.iter().enumerate() {
        if !old_used[i] {
            diff.deletions.push(s.clone());
        }
    }
    for (j, s) in new.iter().enumerate() {
        if !new_used[j] {
            diff.additions.push(s.clone());
        }
    }
    diff
}

fn token_cosine(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(t, &wa)| b.get(t).map(|&wb| wa * wb))
        .sum();
    let na: f64 = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|w| w * w).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Similarity of a policy before and after a regulation event: cosine of
/// the two documents in a space fit on exactly those two documents.
pub fn regulation_impact(pre_doc: &str, post_doc: &str) -> Result<f64> {
    let space = tfidf_fit(&[pre_doc, post_doc])?;
    let a = tfidf_transform(&space, pre_doc);
    let b = tfidf_transform(&space, post_doc);
    Ok(cosine(&a, &b))
}

// ---------------------------------------------------------------------------
// PCA projection
// ---------------------------------------------------------------------------

/// Project points onto their top `dims` principal components.
///
/// Components come from seeded power iteration with deflation on the
/// mean-centered data; the sign convention makes the largest-magnitude
/// loading positive, so output is deterministic.
pub fn pca_project(points: &[Vec<f64>], dims: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let f = points[0].len();
    let dims = dims.min(f).max(1);

    let mut mean = vec![0.0; f];
    for p in points {
        for (m, &x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut centered: Vec<Vec<f64>> =
        points.iter().map(|p| p.iter().zip(&mean).map(|(&x, &m)| x - m).collect()).collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<Vec<f64>> = Vec::new();
    for _ in 0..dims {
        let mut v: Vec<f64> = (0..f).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut v);
        for _ in 0..1000 {
            // w = Xᵗ (X v)
            let mut w = vec![0.0; f];
            for row in &centered {
                let dot: f64 = row.iter().zip(&v).map(|(&a, &b)| a * b).sum();
                for (wi, &ri) in w.iter_mut().zip(row) {
                    *wi += dot * ri;
                }
            }
            let norm = normalize(&mut w);
            if norm == 0.0 {
                break;
            }
            let delta: f64 = w.iter().zip(&v).map(|(&a, &b)| (a - b).abs()).sum();
            v = w;
            if delta < 1e-12 {
                break;
            }
        }
        // Fix sign: largest-magnitude loading positive.
        if let Some(max) = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal))
        {
            if max < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
        }
        // Deflate: remove the component from every row.
        for row in &mut centered {
            let dot: f64 = row.iter().zip(&v).map(|(&a, &b)| a * b).sum();
            for (ri, &vi) in row.iter_mut().zip(&v) {
                *ri -= dot * vi;
            }
        }
        components.push(v);
    }

    points
        .iter()
        .map(|p| {
            let centered_p: Vec<f64> = p.iter().zip(&mean).map(|(&x, &m)| x - m).collect();
            components
                .iter()
                .map(|c| centered_p.iter().zip(c).map(|(&a, &b)| a * b).sum())
                .collect()
        })
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

// ---------------------------------------------------------------------------
// DBSCAN
// ---------------------------------------------------------------------------

/// Density-based clustering with Euclidean distance. Returns one label per
/// point: `-1` for noise, otherwise cluster ids numbered by first
/// occurrence in point order.
pub fn dbscan(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<i64> {
    const UNVISITED: i64 = -2;
    const NOISE: i64 = -1;
    let n = points.len();
    let mut labels = vec![UNVISITED; n];
    let mut cluster: i64 = 0;

    for i in 0..n {
        if labels[i] != UNVISITED {
            continue;
        }
        let neighbors = region_query(points, i, eps);
        if neighbors.len() < min_pts {
            labels[i] = NOISE;
            continue;
        }
        labels[i] = cluster;
        let mut queue: std::collections::VecDeque<usize> = neighbors.into();
        while let Some(q) = queue.pop_front() {
            if labels[q] == NOISE {
                labels[q] = cluster; // border point
            }
            if labels[q] != UNVISITED {
                continue;
            }
            labels[q] = cluster;
            let q_neighbors = region_query(points, q, eps);
            if q_neighbors.len() >= min_pts {
                queue.extend(q_neighbors);
            }
        }
        cluster += 1;
    }
    labels
}

fn region_query(points: &[Vec<f64>], center: usize, eps: f64) -> Vec<usize> {
    let c = &points[center];
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| euclidean(c, p) <= eps)
        .map(|(i, _)| i)
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idf_is_one_for_ubiquitous_terms() {
        let space = tfidf_fit(&["privacy data", "privacy rules", "privacy office"]).unwrap();
        let i = space.term_index("privacy").unwrap();
        assert!((space.idf[i] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_empty_is_zero_vector() {
        let space = tfidf_fit(&["alpha beta"]).unwrap();
        assert!(tfidf_transform(&space, "").is_empty());
        assert!(tfidf_transform(&space, "the of and").is_empty());
    }

    #[test]
    fn transform_before_fit_is_error() {
        let err = tfidf_fit::<&str>(&[]).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
    }

    #[test]
    fn toy_corpus_matches_hand_table() {
        // Docs (after stopword cleaning): d0 = [apple, banana],
        // d1 = [apple, cherry], d2 = [banana, banana].
        // df: apple 2, banana 2, cherry 1; N = 3.
        // idf(apple) = ln(4/3)+1, idf(banana) = ln(4/3)+1, idf(cherry) = ln(2)+1.
        let space = tfidf_fit(&["apple banana", "apple cherry", "banana banana"]).unwrap();
        let idf_ab = (4.0f64 / 3.0).ln() + 1.0;
        let idf_c = 2.0f64.ln() + 1.0;
        let a = space.term_index("apple").unwrap();
        let b = space.term_index("banana").unwrap();
        let c = space.term_index("cherry").unwrap();
        assert!((space.idf[a] - idf_ab).abs() < 1e-12);
        assert!((space.idf[c] - idf_c).abs() < 1e-12);

        // d1 raw weights: apple = idf_ab, cherry = idf_c; then L2 norm.
        let v1 = tfidf_transform(&space, "apple cherry");
        let norm = (idf_ab * idf_ab + idf_c * idf_c).sqrt();
        let get = |v: &SparseVector, i: usize| v.iter().find(|(j, _)| *j == i).map(|(_, w)| *w);
        assert!((get(&v1, a).unwrap() - idf_ab / norm).abs() < 1e-9);
        assert!((get(&v1, c).unwrap() - idf_c / norm).abs() < 1e-9);

        // d2: single distinct term -> unit weight after normalization.
        let v2 = tfidf_transform(&space, "banana banana");
        assert!((get(&v2, b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_basics() {
        let a = vec![(0, 1.0), (1, 1.0)];
        let b = vec![(0, 1.0)];
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
        assert!((cosine(&a, &b) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(cosine(&a, &vec![(2, 1.0)]), 0.0);
        assert_eq!(cosine(&a, &Vec::new()), 0.0);
    }

    #[test]
    fn matrix_symmetric_unit_diagonal() {
        let space =
            tfidf_fit(&["one two three", "two three four", "five six seven"]).unwrap();
        let vectors: Vec<_> = ["one two three", "two three four", "one two three", ""]
            .iter()
            .map(|d| tfidf_transform(&space, d))
            .collect();
        let m = similarity_matrix(&vectors);
        for i in 0..m.len() {
            for j in 0..m.len() {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
        assert_eq!(m[0][0], 1.0);
        assert_eq!(m[3][3], 0.0, "zero vector diagonal");
        assert!((m[0][2] - 1.0).abs() < 1e-12, "duplicated doc");
    }

    #[test]
    fn diff_identity_is_all_unchanged() {
        let x = "We collect data. We share data with partners. You may opt out.";
        let d = sentence_diff(x, x, 0.6);
        assert_eq!(d.unchanged.len(), 3);
        assert!(d.additions.is_empty() && d.deletions.is_empty() && d.incremental.is_empty());
    }

    #[test]
    fn diff_disjoint_texts() {
        let d = sentence_diff("Alpha beta gamma delta.", "Omega psi chi phi.", 0.6);
        assert_eq!(d.deletions.len(), 1);
        assert_eq!(d.additions.len(), 1);
        assert!(d.unchanged.is_empty() && d.incremental.is_empty());
    }

    #[test]
    fn diff_single_word_replacement_is_incremental() {
        let old = "We collect your name email and phone number for support purposes.";
        let new = "We collect your name email and postal number for support purposes.";
        let d = sentence_diff(old, new, 0.6);
        assert_eq!(d.incremental.len(), 1);
        // 10 of 11 tokens shared: cosine = 10/11.
        assert!((d.incremental[0].similarity - 10.0 / 11.0).abs() < 1e-9);
        assert!(d.additions.is_empty() && d.deletions.is_empty());
    }

    #[test]
    fn diff_partition_invariant_random() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vocab = ["data", "collect", "share", "user", "account", "device", "email", "policy"];
        for _ in 0..50 {
            let n_old = rng.gen_range(0..8);
            let old_sents: Vec<String> = (0..n_old)
                .map(|_| {
                    let mut words: Vec<&str> =
                        (0..rng.gen_range(3..9)).map(|_| *vocab.choose(&mut rng).unwrap()).collect();
                    words.shuffle(&mut rng);
                    format!("{}.", words.join(" "))
                })
                .collect();
            // New text: shuffle, drop some, mutate some, add some.
            let mut new_sents: Vec<String> = Vec::new();
            for s in &old_sents {
                if !rng.gen_bool(0.7) {
                    continue;
                }
                if rng.gen_bool(0.4) {
                    new_sents.push(s.replace("data", "information"));
                } else {
                    new_sents.push(s.clone());
                }
            }
            for _ in 0..rng.gen_range(0..3) {
                new_sents.push(format!("{} extra.", vocab.choose(&mut rng).unwrap()));
            }
            new_sents.shuffle(&mut rng);

            let old_text = old_sents.join(" ");
            let new_text = new_sents.join(" ");
            let d = sentence_diff(&old_text, &new_text, 0.6);

            let splitter = SentenceSplitter::default();
            let n_old_actual = splitter.split(&old_text).len();
            let n_new_actual = splitter.split(&new_text).len();
            assert_eq!(
                d.deletions.len() + d.unchanged.len() + d.incremental.len(),
                n_old_actual
            );
            assert_eq!(
                d.additions.len() + d.unchanged.len() + d.incremental.len(),
                n_new_actual
            );
            assert!(d.unchanged.len() + d.incremental.len() <= n_old_actual.min(n_new_actual));
        }
    }

    #[test]
    fn regulation_impact_identity_and_disjoint() {
        let text = "We process personal data under applicable law.";
        assert!((regulation_impact(text, text).unwrap() - 1.0).abs() < 1e-12);
        let s = regulation_impact("alpha beta gamma", "delta epsilon zeta").unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn pca_preserves_order_on_a_line() {
        // Points on a 2-D line: 1-D projection preserves pairwise order.
        let points: Vec<Vec<f64>> =
            (0..6).map(|i| vec![i as f64 * 2.0, i as f64 * -1.0 + 3.0]).collect();
        let proj = pca_project(&points, 1, 42);
        let mut diffs = Vec::new();
        for w in proj.windows(2) {
            diffs.push(w[1][0] - w[0][0]);
        }
        assert!(diffs.iter().all(|&d| d > 0.0) || diffs.iter().all(|&d| d < 0.0));
    }

    #[test]
    fn pca_duplicate_points_identical_coordinates() {
        let points = vec![vec![1.0, 2.0, 3.0], vec![4.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]];
        let proj = pca_project(&points, 2, 7);
        assert_eq!(proj[0], proj[2]);
    }

    #[test]
    fn dbscan_two_blobs() {
        let mut points = Vec::new();
        for i in 0..5 {
            points.push(vec![0.0 + 0.01 * i as f64, 0.0]);
        }
        for i in 0..5 {
            points.push(vec![10.0 + 0.01 * i as f64, 0.0]);
        }
        let labels = dbscan(&points, 0.5, 3);
        assert_eq!(labels[..5], [0, 0, 0, 0, 0]);
        assert_eq!(labels[5..], [1, 1, 1, 1, 1]);
    }

    #[test]
    fn dbscan_isolated_point_is_noise() {
        let points = vec![vec![0.0, 0.0]];
        assert_eq!(dbscan(&points, 0.5, 2), vec![-1]);
    }
}
