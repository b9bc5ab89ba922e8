use serde::{Deserialize, Serialize};

use super::{FeatureError, FeatureMatrix};
use crate::analytics::{
    train_decision_tree, train_logistic, LogisticConfig, TreeConfig,
};

/// One-way ANOVA F statistic per feature column.
///
/// F = (SSB / df_between) / (SSW / df_within). Zero within-class variance
/// with nonzero between-class variance yields +inf, ranking such features
/// above every finite score; zero between-class variance yields 0.
pub fn anova_f_scores(rows: &[Vec<f64>], labels: &[usize]) -> Result<Vec<f64>, FeatureError> {
    if rows.is_empty() {
        return Err(FeatureError::EmptyInput);
    }
    if rows.len() != labels.len() {
        return Err(FeatureError::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    let classes: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    if classes.len() < 2 {
        return Err(FeatureError::SingleClass);
    }
    let n = rows.len() as f64;
    let k = classes.len() as f64;
    let n_features = rows[0].len();

    let mut scores = Vec::with_capacity(n_features);
    for feature in 0..n_features {
        let grand_mean: f64 = rows.iter().map(|r| r[feature]).sum::<f64>() / n;
        let mut ss_between = 0.0;
        let mut ss_within = 0.0;
        for &class in &classes {
            let members: Vec<f64> = rows
                .iter()
                .zip(labels.iter())
                .filter(|(_, &l)| l == class)
                .map(|(r, _)| r[feature])
                .collect();
            let class_mean = members.iter().sum::<f64>() / members.len() as f64;
            ss_between += members.len() as f64 * (class_mean - grand_mean).powi(2);
            ss_within += members.iter().map(|v| (v - class_mean).powi(2)).sum::<f64>();
        }
        let df_between = k - 1.0;
        let df_within = n - k;
        let msb = ss_between / df_between;
        let score = if msb == 0.0 {
            0.0
        } else if df_within <= 0.0 || ss_within == 0.0 {
            f64::INFINITY
        } else {
            msb / (ss_within / df_within)
        };
        scores.push(score);
    }
    Ok(scores)
}

/// Classifier backing recursive feature elimination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trainer", rename_all = "snake_case")]
pub enum RfeTrainer {
    Logistic(LogisticConfig),
    DecisionTree(TreeConfig),
}

impl RfeTrainer {
    fn importances(
        &self,
        rows: &[Vec<f64>],
        labels: &[usize],
        seed: u64,
    ) -> Result<Vec<f64>, FeatureError> {
        match self {
            RfeTrainer::Logistic(config) => {
                let mut config = config.clone();
                config.seed = seed;
                let model = train_logistic(rows, labels, config)?;
                Ok(model.weights[1..].iter().map(|w| w.abs()).collect())
            }
            RfeTrainer::DecisionTree(config) => {
                let tree = train_decision_tree(rows, labels, config.clone())?;
                Ok(tree.importances)
            }
        }
    }
}

/// Iteratively retrain and drop the feature with the smallest absolute
/// weight or importance until `keep` remain. Ties break toward the
/// lexicographically smallest column name. Returns the surviving column
/// names in their original order.
pub fn recursive_feature_elimination(
    matrix: &FeatureMatrix,
    labels: &[usize],
    keep: usize,
    trainer: &RfeTrainer,
    seed: u64,
) -> Result<Vec<String>, FeatureError> {
    let n_features = matrix.columns.len();
    if keep == 0 || keep > n_features {
        return Err(FeatureError::KeepOutOfRange {
            keep,
            features: n_features,
        });
    }
    if matrix.rows() != labels.len() {
        return Err(FeatureError::LengthMismatch {
            left: matrix.rows(),
            right: labels.len(),
        });
    }
    let mut active: Vec<usize> = (0..n_features).collect();
    while active.len() > keep {
        let sub_rows: Vec<Vec<f64>> = matrix
            .values
            .iter()
            .map(|row| active.iter().map(|&c| row[c]).collect())
            .collect();
        let importances = trainer.importances(&sub_rows, labels, seed)?;
        let weakest = importances
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let drop_position = active
            .iter()
            .enumerate()
            .filter(|(pos, _)| importances[*pos] == weakest)
            .min_by(|(_, a), (_, b)| matrix.columns[**a].cmp(&matrix.columns[**b]))
            .map(|(pos, _)| pos)
            .expect("non-empty active set");
        active.remove(drop_position);
    }
    Ok(active.iter().map(|&c| matrix.columns[c].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(columns: &[&str], values: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            values,
            target: None,
        }
    }

    #[test]
    fn identical_class_means_score_zero() {
        let rows = vec![vec![1.0], vec![2.0], vec![1.0], vec![2.0]];
        let labels = vec![0, 0, 1, 1];
        assert_eq!(anova_f_scores(&rows, &labels).unwrap(), vec![0.0]);
    }

    #[test]
    fn hand_computed_f_statistic() {
        // class 0: {1, 2}, class 1: {3, 4} -> SSB = 4, SSW = 1, F = 8.
        let rows = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let labels = vec![0, 0, 1, 1];
        let f = anova_f_scores(&rows, &labels).unwrap()[0];
        assert!((f - 8.0).abs() < 1e-12);
    }

    #[test]
    fn zero_within_variance_is_infinite() {
        let rows = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]];
        let labels = vec![0, 0, 1, 1];
        assert_eq!(anova_f_scores(&rows, &labels).unwrap()[0], f64::INFINITY);
    }

    #[test]
    fn shift_invariance() {
        let rows = vec![vec![1.0], vec![2.5], vec![3.0], vec![4.5]];
        let labels = vec![0, 0, 1, 1];
        let base = anova_f_scores(&rows, &labels).unwrap()[0];
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] + 1000.0]).collect();
        let moved = anova_f_scores(&shifted, &labels).unwrap()[0];
        assert!((base - moved).abs() <= 1e-9 * base.abs().max(1.0));
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(
            anova_f_scores(&[vec![1.0], vec![2.0]], &[0, 0]),
            Err(FeatureError::SingleClass)
        ));
    }

    #[test]
    fn keep_all_is_identity_selection() {
        let m = matrix(
            &["a", "b"],
            vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]],
        );
        let labels = vec![0, 1, 0, 1];
        let trainer = RfeTrainer::Logistic(LogisticConfig::default());
        let kept = recursive_feature_elimination(&m, &labels, 2, &trainer, 42).unwrap();
        assert_eq!(kept, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn constant_zero_feature_eliminated_first() {
        // Two informative columns and one constant zero; with zero-initialized
        // logistic weights the constant column's weight never moves, so it is
        // the weakest by construction.
        let m = matrix(
            &["x0", "x1", "zero"],
            vec![
                vec![-1.0, -0.5, 0.0],
                vec![-0.8, -1.0, 0.0],
                vec![0.9, 1.0, 0.0],
                vec![1.0, 0.7, 0.0],
            ],
        );
        let labels = vec![0, 0, 1, 1];
        let trainer = RfeTrainer::Logistic(LogisticConfig::default());
        let kept = recursive_feature_elimination(&m, &labels, 2, &trainer, 42).unwrap();
        assert_eq!(kept, vec!["x0".to_string(), "x1".to_string()]);
    }

    #[test]
    fn same_seed_same_selection() {
        let m = matrix(
            &["a", "b", "c"],
            vec![
                vec![0.1, -1.0, 0.4],
                vec![0.2, 1.0, 0.5],
                vec![0.3, -0.9, 0.6],
                vec![0.4, 1.1, 0.7],
            ],
        );
        let labels = vec![0, 1, 0, 1];
        let trainer = RfeTrainer::Logistic(LogisticConfig::default());
        let first = recursive_feature_elimination(&m, &labels, 1, &trainer, 7).unwrap();
        let second = recursive_feature_elimination(&m, &labels, 1, &trainer, 7).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn keep_out_of_range_rejected() {
        let m = matrix(&["a"], vec![vec![0.0], vec![1.0]]);
        let trainer = RfeTrainer::DecisionTree(TreeConfig::default());
        assert!(matches!(
            recursive_feature_elimination(&m, &[0, 1], 2, &trainer, 0),
            Err(FeatureError::KeepOutOfRange { .. })
        ));
    }

    #[test]
    fn tree_trainer_drops_uninformative_feature() {
        let m = matrix(
            &["signal", "noise"],
            vec![
                vec![0.0, 0.3],
                vec![0.1, 0.9],
                vec![1.0, 0.4],
                vec![0.9, 0.8],
            ],
        );
        let labels = vec![0, 0, 1, 1];
        let trainer = RfeTrainer::DecisionTree(TreeConfig::default());
        let kept = recursive_feature_elimination(&m, &labels, 1, &trainer, 0).unwrap();
        assert_eq!(kept, vec!["signal".to_string()]);
    }
}
