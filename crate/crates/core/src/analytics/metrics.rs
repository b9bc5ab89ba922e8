use serde::{Deserialize, Serialize};

use super::{euclidean, AnalyticsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Standard binary metrics with positive class 1. Ratios with a zero
/// denominator are reported as 0 rather than NaN.
pub fn classification_metrics(
    y_true: &[usize],
    y_pred: &[usize],
) -> Result<ClassificationMetrics, AnalyticsError> {
    if y_true.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    if y_true.len() != y_pred.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0f64, 0f64, 0f64, 0f64);
    for (&t, &p) in y_true.iter().zip(y_pred.iter()) {
        match (t, p) {
            (1, 1) => tp += 1.0,
            (0, 1) => fp += 1.0,
            (1, 0) => fn_ += 1.0,
            _ => tn += 1.0,
        }
    }
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok(ClassificationMetrics {
        accuracy: (tp + tn) / y_true.len() as f64,
        precision,
        recall,
        f1: ratio(2.0 * precision * recall, precision + recall),
    })
}

/// Rank-based (Mann-Whitney) ROC AUC; tied scores contribute one half.
pub fn roc_auc(y_true: &[usize], scores: &[f64]) -> Result<f64, AnalyticsError> {
    if y_true.len() != scores.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    let positives = y_true.iter().filter(|&&y| y == 1).count();
    let negatives = y_true.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(AnalyticsError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks across tied scores.
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    let rank_sum: f64 = y_true
        .iter()
        .zip(ranks.iter())
        .filter(|(&y, _)| y == 1)
        .map(|(_, &r)| r)
        .sum();
    let p = positives as f64;
    let n = negatives as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Mean silhouette coefficient (b−a)/max(a,b) over all points; singleton
/// clusters contribute 0.
pub fn silhouette_score(rows: &[Vec<f64>], labels: &[i64]) -> Result<f64, AnalyticsError> {
    if rows.len() != labels.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    let clusters: std::collections::BTreeSet<i64> = labels.iter().copied().collect();
    if clusters.len() < 2 {
        return Err(AnalyticsError::SingleCluster);
    }
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        let own_size = labels.iter().filter(|&&l| l == own).count();
        if own_size == 1 {
            continue; // contributes 0
        }
        let mut a = 0.0;
        for j in 0..n {
            if j != i && labels[j] == own {
                a += euclidean(&rows[i], &rows[j]);
            }
        }
        a /= (own_size - 1) as f64;

        let mut b = f64::INFINITY;
        for &other in clusters.iter().filter(|&&c| c != own) {
            let size = labels.iter().filter(|&&l| l == other).count();
            let sum: f64 = (0..n)
                .filter(|&j| labels[j] == other)
                .map(|j| euclidean(&rows[i], &rows[j]))
                .sum();
            b = b.min(sum / size as f64);
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_counts_match_hand_arithmetic() {
        // TP=2, FP=1, FN=1, TN=6
        let y_true = vec![1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
        let y_pred = vec![1, 1, 0, 1, 0, 0, 0, 0, 0, 0];
        let m = classification_metrics(&y_true, &y_pred).unwrap();
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.accuracy - 0.8).abs() < 1e-12);
    }

    #[test]
    fn all_correct_is_all_ones() {
        let y = vec![1, 0, 1, 0];
        let m = classification_metrics(&y, &y).unwrap();
        assert_eq!(
            (m.accuracy, m.precision, m.recall, m.f1),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn zero_denominators_report_zero() {
        let m = classification_metrics(&[1, 1, 0], &[0, 0, 0]).unwrap();
        assert_eq!(m.precision, 0.0);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn auc_extremes_and_ties() {
        assert_eq!(roc_auc(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0, 0, 1, 1], &[0.9, 0.8, 0.2, 0.1]).unwrap(), 0.0);
        assert_eq!(roc_auc(&[0, 1, 0, 1], &[0.5, 0.5, 0.5, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn auc_single_class_rejected() {
        assert_eq!(
            roc_auc(&[1, 1], &[0.1, 0.2]).unwrap_err(),
            AnalyticsError::SingleClass
        );
    }

    #[test]
    fn tight_separated_clusters_score_near_one() {
        let rows = vec![vec![0.0], vec![0.01], vec![100.0], vec![100.01]];
        let labels = vec![0, 0, 1, 1];
        let score = silhouette_score(&rows, &labels).unwrap();
        assert!(score > 0.99, "score {score}");
    }

    #[test]
    fn singleton_clusters_contribute_zero() {
        let rows = vec![vec![0.0], vec![5.0]];
        let labels = vec![0, 1];
        assert_eq!(silhouette_score(&rows, &labels).unwrap(), 0.0);
    }

    #[test]
    fn single_cluster_is_an_error() {
        let rows = vec![vec![0.0], vec![1.0]];
        assert_eq!(
            silhouette_score(&rows, &[0, 0]).unwrap_err(),
            AnalyticsError::SingleCluster
        );
    }
}
