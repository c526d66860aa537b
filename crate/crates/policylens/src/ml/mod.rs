//! From-scratch classifiers, resampling, cross-validation, and metrics.
//!
//! Everything here is deterministic under a fixed seed: gradient descent
//! starts from zero weights, forests derive one seed per tree from the
//! master seed, and oversampling draws from a seeded generator.

mod assess;
mod cv;
mod dataset;
mod forest;
mod logreg;
mod metrics;
mod resample;
mod svm;

pub use assess::{
    build_overall_features, classify_ambiguity, train_ambiguity, train_overall, AmbiguityLabel,
    AmbiguityModels, AmbiguityPrediction, OverallModel, OVERALL_FEATURE_NAMES,
};
pub use cv::{grid_search_cv, stratified_folds, GridSearchResult, ModelSpec, TrainedModel};
pub use dataset::Dataset;
pub use forest::{forest_train, ForestParams, RandomForest};
pub use logreg::{gradient as logreg_gradient, logreg_train, loss as logreg_loss, LogisticModel, LogregParams};
pub use metrics::{classification_metrics, ClassMetrics, MetricsReport};
pub use resample::random_oversample;
pub use svm::{linear_svm_train, SvmModel, SvmParams};
