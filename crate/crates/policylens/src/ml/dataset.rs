//! Feature matrix plus categorical labels.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An N×F feature matrix with one categorical label per row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    /// class id per row, indexing into `class_names`
    pub labels: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        for row in &features {
            if row.len() != feature_names.len() {
                return Err(Error::InvalidInput(format!(
                    "row with {} values, expected {}",
                    row.len(),
                    feature_names.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteFeature);
            }
        }
        for &label in &labels {
            if label >= class_names.len() {
                return Err(Error::InvalidInput(format!(
                    "label id {label} outside declared class set"
                )));
            }
        }
        Ok(Self { features, labels, feature_names, class_names })
    }

    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Rows per class, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Number of classes that actually appear in the labels.
    pub fn present_classes(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    /// New dataset from the given row indices (rows may repeat).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Load from CSV whose header is the feature names followed by a final
    /// `label` column. Class names are assigned in order of first
    /// appearance.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 || header.iter().last() != Some("label") {
            return Err(Error::InvalidInput(
                "CSV header must be feature names followed by a final 'label' column".into(),
            ));
        }
        let feature_names: Vec<String> =
            header.iter().take(header.len() - 1).map(str::to_string).collect();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut class_names: Vec<String> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} fields, expected {}",
                    line + 2,
                    record.len(),
                    header.len()
                )));
            }
            let mut row = Vec::with_capacity(feature_names.len());
            for value in record.iter().take(feature_names.len()) {
                let x: f64 = value.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("non-numeric feature value {value:?}"))
                })?;
                row.push(x);
            }
            let class = record.iter().last().unwrap_or_default().trim().to_string();
            let id = match class_names.iter().position(|c| c == &class) {
                Some(id) => id,
                None => {
                    class_names.push(class);
                    class_names.len() - 1
                }
            };
            features.push(row);
            labels.push(id);
        }
        Dataset::new(features, labels, feature_names, class_names)
    }
}
