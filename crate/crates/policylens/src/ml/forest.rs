//! Random forest of CART trees: Gini splits, bootstrap sampling per tree,
//! and sqrt(F) feature subsampling per split.

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::logreg::argmax;
use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 50, max_depth: 8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode {
    Leaf { probs: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    fn predict(&self, x: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { probs } => return probs,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Bagged CART ensemble. Each tree trains from its own seed derived from
/// the master seed, so the forest is reproducible and trees are
/// independent of training order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub params: ForestParams,
}

impl RandomForest {
    /// Fraction of trees voting for each class.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let k = self.class_names.len();
        let mut votes = vec![0usize; k];
        for tree in &self.trees {
            votes[argmax(tree.predict(x))] += 1;
        }
        votes.iter().map(|&v| v as f64 / self.trees.len() as f64).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Train a forest. Trees are built concurrently; determinism comes from
/// the per-tree seeds, not the scheduling.
pub fn forest_train(dataset: &Dataset, params: &ForestParams) -> Result<RandomForest> {
    if dataset.n_samples() == 0 {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidInput("forest needs at least one tree".into()));
    }
    let mut trees: Vec<Option<DecisionTree>> = vec![None; params.n_trees];
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    let chunk = params.n_trees.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slot_chunk) in trees.chunks_mut(chunk).enumerate() {
            let params = *params;
            scope.spawn(move || {
                for (offset, slot) in slot_chunk.iter_mut().enumerate() {
                    let index = w * chunk + offset;
                    let seed = params.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1));
                    *slot = Some(build_tree(dataset, params.max_depth, seed));
                }
            });
        }
    });
    Ok(RandomForest {
        trees: trees.into_iter().map(|t| t.expect("every slot filled")).collect(),
        class_names: dataset.class_names.clone(),
        feature_names: dataset.feature_names.clone(),
        params: *params,
    })
}

fn build_tree(dataset: &Dataset, max_depth: usize, seed: u64) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dataset.n_samples();
    let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut tree = DecisionTree { nodes: Vec::new() };
    grow(&mut tree, dataset, sample, 0, max_depth, &mut rng);
    tree
}

fn grow(
    tree: &mut DecisionTree,
    dataset: &Dataset,
    indices: Vec<usize>,
    depth: usize,
    max_depth: usize,
    rng: &mut ChaCha8Rng,
) -> usize {
    let k = dataset.n_classes();
    let mut counts = vec![0usize; k];
    for &i in &indices {
        counts[dataset.labels[i]] += 1;
    }
    let total = indices.len();
    let pure = counts.iter().any(|&c| c == total);

    if depth >= max_depth || pure || total < 2 {
        return leaf(tree, &counts, total);
    }

    let f = dataset.n_features();
    let n_try = (f as f64).sqrt().ceil() as usize;
    let mut feature_pool: Vec<usize> = (0..f).collect();
    feature_pool.shuffle(rng);
    feature_pool.truncate(n_try.max(1));
    feature_pool.sort_unstable();

    let parent_gini = gini(&counts, total);
    let mut best: Option<(f64, usize, f64)> = None; // (impurity, feature, threshold)
    for &feature in &feature_pool {
        let mut values: Vec<f64> = indices.iter().map(|&i| dataset.features[i][feature]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let mut left = vec![0usize; k];
            let mut n_left = 0;
            for &i in &indices {
                if dataset.features[i][feature] <= threshold {
                    left[dataset.labels[i]] += 1;
                    n_left += 1;
                }
            }
            let n_right = total - n_left;
            if n_left == 0 || n_right == 0 {
                continue;
            }
            let right: Vec<usize> =
                counts.iter().zip(&left).map(|(&c, &l)| c - l).collect();
            let weighted = (n_left as f64 * gini(&left, n_left)
                + n_right as f64 * gini(&right, n_right))
                / total as f64;
            if best.map_or(true, |(b, _, _)| weighted < b) {
                best = Some((weighted, feature, threshold));
            }
        }
    }

    match best {
        Some((impurity, feature, threshold)) if impurity < parent_gini => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                indices.iter().partition(|&&i| dataset.features[i][feature] <= threshold);
            let at = tree.nodes.len();
            tree.nodes.push(TreeNode::Split { feature, threshold, left: 0, right: 0 });
            let left = grow(tree, dataset, left_idx, depth + 1, max_depth, rng);
            let right = grow(tree, dataset, right_idx, depth + 1, max_depth, rng);
            if let TreeNode::Split { left: l, right: r, .. } = &mut tree.nodes[at] {
                *l = left;
                *r = right;
            }
            at
        }
        _ => leaf(tree, &counts, total),
    }
}

fn leaf(tree: &mut DecisionTree, counts: &[usize], total: usize) -> usize {
    let probs = if total == 0 {
        vec![1.0 / counts.len() as f64; counts.len()]
    } else {
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    };
    tree.nodes.push(TreeNode::Leaf { probs });
    tree.nodes.len() - 1
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}
