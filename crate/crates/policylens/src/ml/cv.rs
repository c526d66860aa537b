//! Stratified cross-validation and grid search.
//!
//! Oversampling happens inside each training fold only, never on the
//! validation fold, so scores are leakage-free.

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{
    classification_metrics, forest_train, linear_svm_train, logreg_train, random_oversample,
    Dataset, ForestParams, LogisticModel, LogregParams, RandomForest, SvmModel, SvmParams,
};

/// One grid point: a model family with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    Logistic(LogregParams),
    LinearSvm(SvmParams),
    Forest(ForestParams),
}

/// A trained member of any supported family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TrainedModel {
    Logistic(LogisticModel),
    Svm(SvmModel),
    Forest(RandomForest),
}

impl ModelSpec {
    pub fn train(&self, dataset: &Dataset) -> Result<TrainedModel> {
        match self {
            ModelSpec::Logistic(p) => Ok(TrainedModel::Logistic(logreg_train(dataset, p)?)),
            ModelSpec::LinearSvm(p) => Ok(TrainedModel::Svm(linear_svm_train(dataset, p)?)),
            ModelSpec::Forest(p) => Ok(TrainedModel::Forest(forest_train(dataset, p)?)),
        }
    }
}

impl TrainedModel {
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        match self {
            TrainedModel::Logistic(m) => m.predict_proba(x),
            TrainedModel::Svm(m) => m.predict_proba(x),
            TrainedModel::Forest(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            TrainedModel::Logistic(m) => m.predict(x),
            TrainedModel::Svm(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
        }
    }
}

/// Stratified fold assignment: per class, indices are shuffled with the
/// seed and dealt round-robin, keeping class ratios within one sample.
/// Returns `folds[f]` = row indices of validation fold `f`.
pub fn stratified_folds(dataset: &Dataset, k_folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let counts = dataset.class_counts();
    let smallest = counts.iter().copied().filter(|&c| c > 0).min().unwrap_or(0);
    if k_folds == 0 || k_folds > smallest {
        return Err(Error::TooManyFolds { k: k_folds, smallest });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k_folds];
    for class in 0..dataset.n_classes() {
        let mut members: Vec<usize> = dataset
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for (pos, index) in members.into_iter().enumerate() {
            folds[pos % k_folds].push(index);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Grid-search outcome: the winning spec plus per-fold weighted F1 for
/// every grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: ModelSpec,
    pub best_index: usize,
    pub mean_scores: Vec<f64>,
    pub fold_scores: Vec<Vec<f64>>,
}

/// Evaluate every grid point with stratified k-fold CV, oversampling each
/// training split. Best point by mean weighted F1; ties keep the earliest
/// grid entry.
pub fn grid_search_cv(
    dataset: &Dataset,
    grid: &[ModelSpec],
    k_folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty hyperparameter grid".into()));
    }
    let folds = stratified_folds(dataset, k_folds, seed)?;
    let mut fold_scores = vec![Vec::with_capacity(k_folds); grid.len()];

    for (g, spec) in grid.iter().enumerate() {
        for fold in &folds {
            let train_idx: Vec<usize> =
                (0..dataset.n_samples()).filter(|i| !fold.contains(i)).collect();
            let train = random_oversample(&dataset.subset(&train_idx), seed);
            let model = spec.train(&train)?;
            let y_true: Vec<usize> = fold.iter().map(|&i| dataset.labels[i]).collect();
            let y_pred: Vec<usize> =
                fold.iter().map(|&i| model.predict(&dataset.features[i])).collect();
            let report = classification_metrics(&y_true, &y_pred, dataset.n_classes());
            fold_scores[g].push(report.weighted_f1);
        }
    }

    let mean_scores: Vec<f64> =
        fold_scores.iter().map(|s| s.iter().sum::<f64>() / s.len() as f64).collect();
    let mut best_index = 0;
    for (i, &score) in mean_scores.iter().enumerate() {
        if score > mean_scores[best_index] {
            best_index = i;
        }
    }
    Ok(GridSearchResult { best: grid[best_index], best_index, mean_scores, fold_scores })
}
