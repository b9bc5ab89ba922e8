use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_finite, derived_rng, euclidean, AnalyticsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyMethod {
    IsolationForest,
    Lof,
}

/// Per-row anomaly scores with threshold flags.
///
/// Isolation-forest scores lie in (0, 1); LOF scores are strictly positive
/// with values well above 1 marking outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub scores: Vec<f64>,
    pub flagged: Vec<bool>,
    pub method: AnomalyMethod,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum IsolationNode {
    Internal {
        feature: usize,
        split: f64,
        left: Box<IsolationNode>,
        right: Box<IsolationNode>,
    },
    External {
        size: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationTree {
    pub root: IsolationNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationForest {
    pub trees: Vec<IsolationTree>,
    pub subsample: usize,
}

/// Average unsuccessful-search path length c(n) in a binary search tree,
/// using the exact harmonic number: c(n) = 2·H(n−1) − 2(n−1)/n.
pub fn average_path_length(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let m = (n - 1) as f64;
    let harmonic: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
    2.0 * harmonic - 2.0 * m / n as f64
}

fn build_node(
    rows: &[Vec<f64>],
    idx: &[usize],
    depth: usize,
    limit: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> IsolationNode {
    if depth >= limit || idx.len() <= 1 {
        return IsolationNode::External { size: idx.len() };
    }
    let n_features = rows[idx[0]].len();
    // Only features with spread can split; all-constant data is external.
    let candidates: Vec<usize> = (0..n_features)
        .filter(|&f| {
            let first = rows[idx[0]][f];
            idx.iter().any(|&i| rows[i][f] != first)
        })
        .collect();
    if candidates.is_empty() {
        return IsolationNode::External { size: idx.len() };
    }
    let feature = candidates[rng.random_range(0..candidates.len())];
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &i in idx {
        min = min.min(rows[i][feature]);
        max = max.max(rows[i][feature]);
    }
    let split = rng.random_range(min..max);
    let (left, right): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| rows[i][feature] < split);
    IsolationNode::Internal {
        feature,
        split,
        left: Box::new(build_node(rows, &left, depth + 1, limit, rng)),
        right: Box::new(build_node(rows, &right, depth + 1, limit, rng)),
    }
}

fn path_length(node: &IsolationNode, x: &[f64]) -> f64 {
    let mut depth = 0.0;
    let mut node = node;
    loop {
        match node {
            IsolationNode::External { size } => return depth + average_path_length(*size),
            IsolationNode::Internal {
                feature,
                split,
                left,
                right,
            } => {
                depth += 1.0;
                node = if x[*feature] < *split { left } else { right };
            }
        }
    }
}

impl IsolationForest {
    /// Mean isolation path length of a point across all trees.
    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        let total: f64 = self.trees.iter().map(|t| path_length(&t.root, x)).sum();
        total / self.trees.len() as f64
    }

    /// Anomaly score 2^(−E[path]/c(subsample)) in (0, 1).
    pub fn score(&self, x: &[f64]) -> f64 {
        let normalizer = average_path_length(self.subsample).max(f64::MIN_POSITIVE);
        2f64.powf(-self.mean_path_length(x) / normalizer)
    }
}

/// Build seeded isolation trees on subsamples drawn without replacement.
/// Each tree gets its own RNG stream derived from `(seed, tree_index)`.
pub fn build_isolation_forest(
    rows: &[Vec<f64>],
    n_trees: usize,
    subsample: usize,
    seed: u64,
) -> Result<IsolationForest, AnalyticsError> {
    if rows.len() < 2 {
        return Err(AnalyticsError::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    if n_trees == 0 {
        return Err(AnalyticsError::ParamOutOfRange("need at least one tree".into()));
    }
    check_finite(rows)?;
    let subsample = subsample.clamp(2, rows.len());
    let height_limit = (subsample as f64).log2().ceil() as usize;
    let trees = (0..n_trees)
        .map(|t| {
            let mut rng = derived_rng(seed, t as u64);
            let idx: Vec<usize> = rand::seq::index::sample(&mut rng, rows.len(), subsample).into_vec();
            IsolationTree {
                root: build_node(rows, &idx, 0, height_limit, &mut rng),
            }
        })
        .collect();
    Ok(IsolationForest { trees, subsample })
}

/// Score every row with a freshly built seeded forest; rows scoring above
/// the threshold are flagged.
pub fn isolation_forest_scores(
    rows: &[Vec<f64>],
    n_trees: usize,
    subsample: usize,
    seed: u64,
    threshold: f64,
) -> Result<AnomalyReport, AnalyticsError> {
    let forest = build_isolation_forest(rows, n_trees, subsample, seed)?;
    let scores: Vec<f64> = rows.iter().map(|x| forest.score(x)).collect();
    let flagged = scores.iter().map(|&s| s > threshold).collect();
    Ok(AnomalyReport {
        scores,
        flagged,
        method: AnomalyMethod::IsolationForest,
        threshold,
    })
}

/// Local Outlier Factor per Breunig et al.: k-distance neighborhoods,
/// reachability distances, local reachability density, and the final
/// density ratio. Zero-distance duplicates are kept finite by flooring
/// reachability distances at 1e-12.
pub fn lof_scores(
    rows: &[Vec<f64>],
    k: usize,
    threshold: f64,
) -> Result<AnomalyReport, AnalyticsError> {
    let n = rows.len();
    if k == 0 || n < k + 1 {
        return Err(AnalyticsError::KOutOfRange { k, rows: n });
    }
    check_finite(rows)?;

    let mut distance = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&rows[i], &rows[j]);
            distance[i][j] = d;
            distance[j][i] = d;
        }
    }

    let mut k_distance = vec![0.0f64; n];
    let mut neighborhoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| distance[i][a].total_cmp(&distance[i][b]));
        k_distance[i] = distance[i][others[k - 1]];
        // All points within the k-distance belong to the neighborhood,
        // which can exceed k under distance ties.
        let neighborhood: Vec<usize> = others
            .into_iter()
            .filter(|&j| distance[i][j] <= k_distance[i])
            .collect();
        neighborhoods.push(neighborhood);
    }

    let mut lrd = vec![0.0f64; n];
    for i in 0..n {
        let reach_sum: f64 = neighborhoods[i]
            .iter()
            .map(|&j| k_distance[j].max(distance[i][j]).max(1e-12))
            .sum();
        lrd[i] = neighborhoods[i].len() as f64 / reach_sum;
    }

    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let ratio_sum: f64 = neighborhoods[i].iter().map(|&j| lrd[j]).sum();
            ratio_sum / (neighborhoods[i].len() as f64 * lrd[i])
        })
        .collect();
    let flagged = scores.iter().map(|&s| s > threshold).collect();
    Ok(AnomalyReport {
        scores,
        flagged,
        method: AnomalyMethod::Lof,
        threshold,
    })
}
