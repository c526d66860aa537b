//! Linear SVM trained with hinge-loss subgradient descent, one-vs-rest
//! for multi-class data. Margins calibrate to probabilities through a
//! logistic link so the model can sit inside soft-voting ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::logreg::argmax;
use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// slack penalty; the L2 shrink per step is `1/c`
    pub c: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 100.0, learning_rate: 0.1, epochs: 500 }
    }
}

/// One-vs-rest linear SVM. `weights[k]` separates class `k` from the rest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl SvmModel {
    /// Raw margin of each one-vs-rest hyperplane.
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, &b)| b + row.iter().zip(x).map(|(&w, &xi)| w * xi).sum::<f64>())
            .collect()
    }

    /// Margins through a logistic link, normalized across classes.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let raw: Vec<f64> = self.margins(x).iter().map(|&m| logistic(m)).collect();
        let sum: f64 = raw.iter().sum();
        if sum == 0.0 {
            vec![1.0 / raw.len() as f64; raw.len()]
        } else {
            raw.iter().map(|&p| p / sum).collect()
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.margins(x))
    }

    /// Mean hinge loss over the dataset (all one-vs-rest problems).
    pub fn hinge_loss(&self, dataset: &Dataset) -> f64 {
        let n = dataset.n_samples() as f64;
        let mut total = 0.0;
        for (x, &y) in dataset.features.iter().zip(&dataset.labels) {
            for (k, margin) in self.margins(x).iter().enumerate() {
                let target = if k == y { 1.0 } else { -1.0 };
                total += (1.0 - target * margin).max(0.0);
            }
        }
        total / n
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Train one-vs-rest hyperplanes by full-batch subgradient descent on
/// `1/(2c) * ||w||^2 + mean hinge`. Weights start at zero.
pub fn linear_svm_train(dataset: &Dataset, params: &SvmParams) -> Result<SvmModel> {
    if dataset.present_classes() < 2 {
        return Err(Error::SingleClass);
    }
    let k = dataset.n_classes();
    let f = dataset.n_features();
    let n = dataset.n_samples() as f64;
    let lambda = 1.0 / params.c;

    let mut weights = vec![vec![0.0; f]; k];
    let mut bias = vec![0.0; k];

    for _ in 0..params.epochs {
        for class in 0..k {
            let mut grad_w = vec![0.0; f];
            let mut grad_b = 0.0;
            for (x, &y) in dataset.features.iter().zip(&dataset.labels) {
                let target = if y == class { 1.0 } else { -1.0 };
                let margin = bias[class]
                    + weights[class].iter().zip(x).map(|(&w, &xi)| w * xi).sum::<f64>();
                if target * margin < 1.0 {
                    for (g, &xi) in grad_w.iter_mut().zip(x) {
                        *g -= target * xi / n;
                    }
                    grad_b -= target / n;
                }
            }
            for (w, g) in weights[class].iter_mut().zip(&grad_w) {
                *w -= params.learning_rate * (g + lambda * *w);
            }
            bias[class] -= params.learning_rate * grad_b;
        }
    }

    Ok(SvmModel {
        weights,
        bias,
        class_names: dataset.class_names.clone(),
        feature_names: dataset.feature_names.clone(),
    })
}
