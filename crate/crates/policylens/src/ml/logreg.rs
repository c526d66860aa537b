//! Multinomial logistic regression trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogregParams {
    /// L2 penalty on the weights (bias excluded)
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LogregParams {
    fn default() -> Self {
        Self { l2: 0.01, learning_rate: 0.5, epochs: 500 }
    }
}

/// Softmax linear classifier. Weights start at zero, so training is
/// deterministic without a seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    /// K×F weight matrix
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl LogisticModel {
    /// Class probabilities for one sample.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    /// Most probable class id; ties resolve to the lower id.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.predict_proba(x))
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, &b)| b + row.iter().zip(x).map(|(&w, &xi)| w * xi).sum::<f64>())
            .collect()
    }
}

pub(super) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

pub(super) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Train by minimizing mean cross-entropy plus `l2/2 * ||W||^2`.
pub fn logreg_train(dataset: &Dataset, params: &LogregParams) -> Result<LogisticModel> {
    if dataset.present_classes() < 2 {
        return Err(Error::SingleClass);
    }
    let k = dataset.n_classes();
    let f = dataset.n_features();
    let mut weights = vec![vec![0.0; f]; k];
    let mut bias = vec![0.0; k];

    for _ in 0..params.epochs {
        let (grad_w, grad_b) = gradient(dataset, &weights, &bias, params.l2);
        for (w_row, g_row) in weights.iter_mut().zip(&grad_w) {
            for (w, g) in w_row.iter_mut().zip(g_row) {
                *w -= params.learning_rate * g;
            }
        }
        for (b, g) in bias.iter_mut().zip(&grad_b) {
            *b -= params.learning_rate * g;
        }
    }

    Ok(LogisticModel {
        weights,
        bias,
        class_names: dataset.class_names.clone(),
        feature_names: dataset.feature_names.clone(),
    })
}

/// Mean cross-entropy plus the L2 term; the quantity [`gradient`]
/// differentiates.
pub fn loss(dataset: &Dataset, weights: &[Vec<f64>], bias: &[f64], l2: f64) -> f64 {
    let n = dataset.n_samples() as f64;
    let mut total = 0.0;
    for (x, &y) in dataset.features.iter().zip(&dataset.labels) {
        let logits: Vec<f64> = weights
            .iter()
            .zip(bias)
            .map(|(row, &b)| b + row.iter().zip(x).map(|(&w, &xi)| w * xi).sum::<f64>())
            .collect();
        let probs = softmax(&logits);
        total -= probs[y].max(1e-300).ln();
    }
    let penalty: f64 = weights.iter().flatten().map(|&w| w * w).sum();
    total / n + 0.5 * l2 * penalty
}

/// Analytic gradient of [`loss`] with respect to weights and bias.
pub fn gradient(
    dataset: &Dataset,
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let k = weights.len();
    let f = weights[0].len();
    let n = dataset.n_samples() as f64;
    let mut grad_w = vec![vec![0.0; f]; k];
    let mut grad_b = vec![0.0; k];
    for (x, &y) in dataset.features.iter().zip(&dataset.labels) {
        let logits: Vec<f64> = weights
            .iter()
            .zip(bias)
            .map(|(row, &b)| b + row.iter().zip(x).map(|(&w, &xi)| w * xi).sum::<f64>())
            .collect();
        let probs = softmax(&logits);
        for t in 0..k {
            let delta = probs[t] - if t == y { 1.0 } else { 0.0 };
            grad_b[t] += delta / n;
            for (g, &xi) in grad_w[t].iter_mut().zip(x) {
                *g += delta * xi / n;
            }
        }
    }
    for (g_row, w_row) in grad_w.iter_mut().zip(weights) {
        for (g, &w) in g_row.iter_mut().zip(w_row) {
            *g += l2 * w;
        }
    }
    (grad_w, grad_b)
}
