//! Precision, recall, and F1 with weighted averages.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    /// true when a zero denominator forced a metric to 0
    pub zero_division: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub accuracy: f64,
}

/// Standard classification metrics. Zero denominators (a class never
/// predicted, or absent from the truth) yield 0 and set the flag.
pub fn classification_metrics(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> MetricsReport {
    assert_eq!(y_true.len(), y_pred.len(), "prediction count mismatch");
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    let mut correct = 0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t == p {
            tp[t] += 1;
            correct += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }

    let mut per_class = Vec::with_capacity(n_classes);
    for c in 0..n_classes {
        let support = tp[c] + fn_[c];
        let mut zero_division = false;
        let precision = if tp[c] + fp[c] == 0 {
            zero_division = true;
            0.0
        } else {
            tp[c] as f64 / (tp[c] + fp[c]) as f64
        };
        let recall = if support == 0 {
            zero_division = true;
            0.0
        } else {
            tp[c] as f64 / support as f64
        };
        let f1 = if precision + recall == 0.0 {
            zero_division = true;
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics { precision, recall, f1, support, zero_division });
    }

    let total: usize = per_class.iter().map(|m| m.support).sum();
    let weight = |f: fn(&ClassMetrics) -> f64| -> f64 {
        if total == 0 {
            0.0
        } else {
            per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
        }
    };
    MetricsReport {
        weighted_precision: weight(|m| m.precision),
        weighted_recall: weight(|m| m.recall),
        weighted_f1: weight(|m| m.f1),
        accuracy: if y_true.is_empty() { 0.0 } else { correct as f64 / y_true.len() as f64 },
        per_class,
    }
}
