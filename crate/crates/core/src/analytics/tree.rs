use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: 10,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        class: usize,
        probability: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

/// CART-style classifier with greedy Gini splits.
///
/// Ties between candidate splits break toward the lowest feature index,
/// then the lowest threshold, so training is fully deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub config: TreeConfig,
    pub n_features: usize,
    /// Total weighted Gini impurity decrease attributed to each feature.
    pub importances: Vec<f64>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }
}

fn gini(labels: &[usize], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let max_class = idx.iter().map(|&i| labels[i]).max().unwrap_or(0);
    let mut counts = vec![0usize; max_class + 1];
    for &i in idx {
        counts[labels[i]] += 1;
    }
    let n = idx.len() as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

fn majority_leaf(labels: &[usize], idx: &[usize]) -> TreeNode {
    let max_class = idx.iter().map(|&i| labels[i]).max().unwrap_or(0);
    let mut counts = vec![0usize; max_class + 1];
    for &i in idx {
        counts[labels[i]] += 1;
    }
    // Ties break toward the smallest class id.
    let (class, count) = counts
        .iter()
        .enumerate()
        .max_by(|(ia, ca), (ib, cb)| ca.cmp(cb).then(ib.cmp(ia)))
        .expect("non-empty node");
    TreeNode::Leaf {
        class,
        probability: *count as f64 / idx.len() as f64,
        samples: idx.len(),
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    weighted_impurity: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn best_split(rows: &[Vec<f64>], labels: &[usize], idx: &[usize]) -> Option<BestSplit> {
    let n_features = rows[idx[0]].len();
    let mut best: Option<BestSplit> = None;
    for feature in 0..n_features {
        let mut values: Vec<f64> = idx.iter().map(|&i| rows[i][feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let threshold = pair[0] + (pair[1] - pair[0]) / 2.0;
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for &i in idx {
                if rows[i][feature] <= threshold {
                    left.push(i);
                } else {
                    right.push(i);
                }
            }
            let n = idx.len() as f64;
            let weighted = gini(labels, &left) * left.len() as f64 / n
                + gini(labels, &right) * right.len() as f64 / n;
            // Strict improvement required to displace the incumbent, so the
            // first-seen (lowest feature, lowest threshold) split wins ties.
            if best.as_ref().is_none_or(|b| weighted < b.weighted_impurity) {
                best = Some(BestSplit {
                    feature,
                    threshold,
                    weighted_impurity: weighted,
                    left,
                    right,
                });
            }
        }
    }
    best
}

fn build(
    rows: &[Vec<f64>],
    labels: &[usize],
    idx: &[usize],
    depth: usize,
    config: &TreeConfig,
    total: f64,
    importances: &mut [f64],
) -> TreeNode {
    let impurity = gini(labels, idx);
    if impurity == 0.0 || depth >= config.max_depth || idx.len() < config.min_samples_split {
        return majority_leaf(labels, idx);
    }
    let Some(split) = best_split(rows, labels, idx) else {
        return majority_leaf(labels, idx);
    };
    importances[split.feature] += (idx.len() as f64 / total) * (impurity - split.weighted_impurity);
    let left = build(rows, labels, &split.left, depth + 1, config, total, importances);
    let right = build(
        rows,
        labels,
        &split.right,
        depth + 1,
        config,
        total,
        importances,
    );
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Grow a classification tree. Splits with zero Gini gain are allowed as
/// long as the node is impure, which is what lets XOR-style interactions
/// resolve at depth two.
pub fn train_decision_tree(
    rows: &[Vec<f64>],
    labels: &[usize],
    config: TreeConfig,
) -> Result<DecisionTree, AnalyticsError> {
    if rows.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    if rows.len() != labels.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    super::check_finite(rows)?;
    let idx: Vec<usize> = (0..rows.len()).collect();
    let n_features = rows[0].len();
    let mut importances = vec![0.0; n_features];
    let root = build(
        rows,
        labels,
        &idx,
        0,
        &config,
        rows.len() as f64,
        &mut importances,
    );
    Ok(DecisionTree {
        root,
        config,
        n_features,
        importances,
    })
}
