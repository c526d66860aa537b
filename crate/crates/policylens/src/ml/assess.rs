//! The two policy-level assessment models: three-way ambiguity and the
//! binary overall (acceptable/unacceptable) classifier.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::readability::ReadabilityReport;
use crate::topics::AttributeCount;

use super::{
    forest_train, grid_search_cv, logreg_train, random_oversample, Dataset, ForestParams,
    GridSearchResult, LogisticModel, LogregParams, ModelSpec, RandomForest,
};

/// Three-level ambiguity scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbiguityLabel {
    NotAmbiguous,
    SomewhatAmbiguous,
    VeryAmbiguous,
}

impl AmbiguityLabel {
    pub const NAMES: [&'static str; 3] =
        ["not_ambiguous", "somewhat_ambiguous", "very_ambiguous"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "not_ambiguous" => Some(Self::NotAmbiguous),
            "somewhat_ambiguous" => Some(Self::SomewhatAmbiguous),
            "very_ambiguous" => Some(Self::VeryAmbiguous),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::NotAmbiguous => "not_ambiguous",
            Self::SomewhatAmbiguous => "somewhat_ambiguous",
            Self::VeryAmbiguous => "very_ambiguous",
        }
    }
}

/// The ambiguity classifier pair. Both models run on every policy and
/// both labels are kept; disagreement is preserved, never reconciled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmbiguityModels {
    pub forest: RandomForest,
    pub logreg: LogisticModel,
}

/// Labels from both members of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityPrediction {
    pub forest: AmbiguityLabel,
    pub logreg: AmbiguityLabel,
}

/// Train the forest+logreg ambiguity pair on an annotated dataset whose
/// class names are the three ambiguity levels.
pub fn train_ambiguity(dataset: &Dataset, seed: u64) -> Result<AmbiguityModels> {
    for name in &dataset.class_names {
        if AmbiguityLabel::from_name(name).is_none() {
            return Err(Error::InvalidInput(format!(
                "class {name:?} is not an ambiguity level; expected one of {:?}",
                AmbiguityLabel::NAMES
            )));
        }
    }
    if dataset.present_classes() < 2 {
        return Err(Error::SingleClass);
    }
    let balanced = random_oversample(dataset, seed);
    let forest = forest_train(&balanced, &ForestParams { seed, ..ForestParams::default() })?;
    let logreg = logreg_train(&balanced, &LogregParams::default())?;
    Ok(AmbiguityModels { forest, logreg })
}

/// Classify one report's feature vector with both models.
pub fn classify_ambiguity(models: &AmbiguityModels, features: &[f64]) -> AmbiguityPrediction {
    let to_label = |class_id: usize, names: &[String]| {
        AmbiguityLabel::from_name(&names[class_id]).expect("validated at training time")
    };
    AmbiguityPrediction {
        forest: to_label(models.forest.predict(features), &models.forest.class_names),
        logreg: to_label(models.logreg.predict(features), &models.logreg.class_names),
    }
}

// ---------------------------------------------------------------------------
// Overall assessment
// ---------------------------------------------------------------------------

/// The 19-column overall-assessment layout: the eight readability
/// features, the normalized keyword frequencies of the first ten taxonomy
/// attributes, and a last-update-present flag.
pub const OVERALL_FEATURE_NAMES: [&str; 19] = [
    "entropy",
    "reading_time",
    "unique_word_ratio",
    "coherence",
    "imprecise_freq",
    "connective_freq",
    "grammar_error_rate",
    "fkgl",
    "kw_collection",
    "kw_sharing",
    "kw_purpose",
    "kw_access",
    "kw_security",
    "kw_policy_change",
    "kw_do_not_track",
    "kw_legislation",
    "kw_choice",
    "kw_retention",
    "last_update_present",
];

const OVERALL_ATTRIBUTES: [&str; 10] = [
    "Collection",
    "Sharing",
    "Purpose",
    "Access",
    "Security",
    "Policy Change",
    "Do Not Track",
    "Legislation",
    "Choice",
    "Retention",
];

/// Assemble the 19-feature vector for one policy.
pub fn build_overall_features(
    readability: &ReadabilityReport,
    keyword_counts: &BTreeMap<String, AttributeCount>,
    last_update_present: bool,
) -> Vec<f64> {
    let mut features = vec![
        readability.entropy_bits_per_word,
        readability.reading_time_minutes as f64,
        readability.unique_word_ratio,
        readability.coherence,
        readability.imprecise_freq,
        readability.connective_freq,
        readability.grammar_error_rate,
        readability.fkgl,
    ];
    for name in OVERALL_ATTRIBUTES {
        features.push(keyword_counts.get(name).map(|c| c.normalized_freq).unwrap_or(0.0));
    }
    features.push(if last_update_present { 1.0 } else { 0.0 });
    features
}

/// Overall-assessment model: grid-searched logistic regression on
/// standardized features, trained on the oversampled dataset. Feature
/// importances are the signed coefficients toward the second class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverallModel {
    pub model: LogisticModel,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub feature_importances: Vec<f64>,
    pub grid: GridSearchResult,
}

impl OverallModel {
    /// (class id, probabilities) for one raw (unstandardized) sample.
    pub fn predict(&self, x: &[f64]) -> (usize, Vec<f64>) {
        let z = self.standardize(x);
        let probs = self.model.predict_proba(&z);
        let class = if probs[1] > probs[0] { 1 } else { 0 };
        (class, probs)
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&m, &s))| if s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Default hyperparameter grid for the overall model.
pub fn overall_grid() -> Vec<ModelSpec> {
    [1e-4, 1e-3, 1e-2, 1e-1]
        .into_iter()
        .map(|l2| ModelSpec::Logistic(LogregParams { l2, learning_rate: 0.5, epochs: 400 }))
        .collect()
}

/// Train the binary overall-assessment classifier.
pub fn train_overall(dataset: &Dataset, seed: u64) -> Result<OverallModel> {
    if dataset.n_classes() != 2 {
        return Err(Error::InvalidInput(format!(
            "overall assessment is binary; got {} classes",
            dataset.n_classes()
        )));
    }
    if dataset.present_classes() < 2 {
        return Err(Error::SingleClass);
    }
    let (standardized, means, stds) = standardize_dataset(dataset);

    let grid = overall_grid();
    let smallest = standardized.class_counts().into_iter().filter(|&c| c > 0).min().unwrap_or(0);
    let k_folds = 5.min(smallest);
    let grid_result = grid_search_cv(&standardized, &grid, k_folds, seed)?;

    let balanced = random_oversample(&standardized, seed);
    let ModelSpec::Logistic(best_params) = grid_result.best else {
        unreachable!("overall grid only contains logistic specs");
    };
    let model = logreg_train(&balanced, &best_params)?;
    let feature_importances: Vec<f64> = model.weights[1]
        .iter()
        .zip(&model.weights[0])
        .map(|(&w1, &w0)| w1 - w0)
        .collect();
    Ok(OverallModel { model, means, stds, feature_importances, grid: grid_result })
}

fn standardize_dataset(dataset: &Dataset) -> (Dataset, Vec<f64>, Vec<f64>) {
    let n = dataset.n_samples() as f64;
    let f = dataset.n_features();
    let mut means = vec![0.0; f];
    for row in &dataset.features {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    let mut stds = vec![0.0; f];
    for row in &dataset.features {
        for ((s, &m), &v) in stds.iter_mut().zip(&means).zip(row) {
            *s += (v - m) * (v - m) / n;
        }
    }
    for s in &mut stds {
        *s = s.sqrt();
    }
    let features: Vec<Vec<f64>> = dataset
        .features
        .iter()
        .map(|row| {
            row.iter()
                .zip(means.iter().zip(&stds))
                .map(|(&v, (&m, &s))| if s > 0.0 { (v - m) / s } else { 0.0 })
                .collect()
        })
        .collect();
    let standardized = Dataset {
        features,
        labels: dataset.labels.clone(),
        feature_names: dataset.feature_names.clone(),
        class_names: dataset.class_names.clone(),
    };
    (standardized, means, stds)
}
