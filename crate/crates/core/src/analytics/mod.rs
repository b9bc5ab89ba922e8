//! Classification, clustering, anomaly detection, forecasting, and
//! evaluation metrics over dense numeric rows.
//!
//! Every stochastic routine takes an explicit seed; identical seed means
//! bit-identical results. Per-unit RNG streams (tree index, party index)
//! are derived from `(seed, stream)` so parallel evaluation cannot change
//! the outcome.

mod anomaly;
mod cluster;
mod forecast;
mod logistic;
mod metrics;
mod split;
mod tree;

pub use anomaly::{
    average_path_length, build_isolation_forest, isolation_forest_scores, lof_scores,
    AnomalyMethod, AnomalyReport, IsolationForest, IsolationNode, IsolationTree,
};
pub use cluster::{dbscan, kmeans, ClusterAssignment, NOISE_LABEL};
pub use forecast::{linear_forecast, Forecast};
pub use logistic::{
    logistic_gradient, logistic_loss, sigmoid, train_logistic, LogisticConfig, LogisticModel,
};
pub use metrics::{classification_metrics, roc_auc, silhouette_score, ClassificationMetrics};
pub use split::train_test_split;
pub use tree::{train_decision_tree, DecisionTree, TreeConfig, TreeNode};

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("empty input")]
    EmptyInput,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },
    #[error("k = {k} out of range for {rows} rows")]
    KOutOfRange { k: usize, rows: usize },
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("time axis is degenerate (fewer than two distinct points)")]
    DegenerateTimeAxis,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least two clusters")]
    SingleCluster,
    #[error("test fraction must lie strictly between 0 and 1")]
    FractionOutOfRange,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
}

/// Derive an independent RNG stream from a base seed and a stream index.
pub(crate) fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&stream.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

pub(crate) fn check_finite(rows: &[Vec<f64>]) -> Result<(), AnalyticsError> {
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(AnalyticsError::NonFiniteFeature { row: r, column: c });
            }
        }
    }
    Ok(())
}
