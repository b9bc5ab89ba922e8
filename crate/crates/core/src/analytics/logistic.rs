use serde::{Deserialize, Serialize};

use super::{check_finite, AnalyticsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            max_iters: 2000,
            l2: 1e-4,
            seed: 0,
        }
    }
}

/// L2-regularized logistic regression trained by batch gradient descent.
///
/// `weights[0]` is the bias; the remaining components align with feature
/// columns. The bias is excluded from regularization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub config: LogisticConfig,
}

impl LogisticModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights[0]
            + self.weights[1..]
                .iter()
                .zip(x.iter())
                .map(|(w, v)| w * v)
                .sum::<f64>()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.predict_proba(x) >= 0.5)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable ln(1 + e^z).
fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else if z < -30.0 {
        z.exp()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean log loss plus L2 penalty at the given weights (bias first).
pub fn logistic_loss(rows: &[Vec<f64>], labels: &[usize], weights: &[f64], l2: f64) -> f64 {
    let n = rows.len() as f64;
    let data_term: f64 = rows
        .iter()
        .zip(labels.iter())
        .map(|(x, &y)| {
            let z = weights[0]
                + weights[1..]
                    .iter()
                    .zip(x.iter())
                    .map(|(w, v)| w * v)
                    .sum::<f64>();
            softplus(z) - y as f64 * z
        })
        .sum::<f64>()
        / n;
    let penalty = 0.5 * l2 * weights[1..].iter().map(|w| w * w).sum::<f64>();
    data_term + penalty
}

/// Analytic gradient of [`logistic_loss`] with respect to the weights.
pub fn logistic_gradient(
    rows: &[Vec<f64>],
    labels: &[usize],
    weights: &[f64],
    l2: f64,
) -> Vec<f64> {
    let n = rows.len() as f64;
    let mut grad = vec![0.0; weights.len()];
    for (x, &y) in rows.iter().zip(labels.iter()) {
        let z = weights[0]
            + weights[1..]
                .iter()
                .zip(x.iter())
                .map(|(w, v)| w * v)
                .sum::<f64>();
        let residual = sigmoid(z) - y as f64;
        grad[0] += residual;
        for (g, v) in grad[1..].iter_mut().zip(x.iter()) {
            *g += residual * v;
        }
    }
    for g in grad.iter_mut() {
        *g /= n;
    }
    for (g, w) in grad[1..].iter_mut().zip(weights[1..].iter()) {
        *g += l2 * w;
    }
    grad
}

/// Train from zero-initialized weights; stops at `max_iters` or when the
/// gradient infinity norm drops below 1e-8. Deterministic given the config.
pub fn train_logistic(
    rows: &[Vec<f64>],
    labels: &[usize],
    config: LogisticConfig,
) -> Result<LogisticModel, AnalyticsError> {
    if rows.len() < 2 {
        return Err(AnalyticsError::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    if rows.len() != labels.len() {
        return Err(AnalyticsError::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    check_finite(rows)?;
    if labels.iter().any(|&y| y > 1) {
        return Err(AnalyticsError::ParamOutOfRange(
            "logistic labels must be 0 or 1".into(),
        ));
    }
    if labels.iter().all(|&y| y == 0) || labels.iter().all(|&y| y == 1) {
        return Err(AnalyticsError::SingleClass);
    }
    let dim = rows[0].len() + 1;
    let mut weights = vec![0.0; dim];
    for _ in 0..config.max_iters {
        let grad = logistic_gradient(rows, labels, &weights, config.l2);
        let grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm < 1e-8 {
            break;
        }
        for (w, g) in weights.iter_mut().zip(grad.iter()) {
            *w -= config.learning_rate * g;
        }
    }
    Ok(LogisticModel { weights, config })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_pair_reaches_perfect_training_accuracy() {
        let rows = vec![vec![-1.0], vec![1.0]];
        let labels = vec![0, 1];
        let model = train_logistic(&rows, &labels, LogisticConfig::default()).unwrap();
        assert_eq!(model.predict(&rows[0]), 0);
        assert_eq!(model.predict(&rows[1]), 1);
    }

    #[test]
    fn zero_weights_on_balanced_data_have_zero_bias_gradient() {
        let rows = vec![vec![2.0], vec![-3.0], vec![0.5], vec![1.5]];
        let labels = vec![0, 1, 1, 0];
        let grad = logistic_gradient(&rows, &labels, &[0.0, 0.0], 0.0);
        assert!(grad[0].abs() < 1e-15, "bias gradient {} not 0", grad[0]);
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        use rand::Rng;
        let mut rng = crate::analytics::derived_rng(7, 0);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..5).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let labels: Vec<usize> = (0..30).map(|_| usize::from(rng.random_range(0..2) == 1)).collect();
        let weights: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l2 = 0.01;
        let analytic = logistic_gradient(&rows, &labels, &weights, l2);
        let h = 1e-5;
        for i in 0..weights.len() {
            let mut plus = weights.clone();
            plus[i] += h;
            let mut minus = weights.clone();
            minus[i] -= h;
            let numeric = (logistic_loss(&rows, &labels, &plus, l2)
                - logistic_loss(&rows, &labels, &minus, l2))
                / (2.0 * h);
            let rel = (analytic[i] - numeric).abs() / numeric.abs().max(1e-8);
            assert!(rel <= 1e-5, "component {i}: rel error {rel}");
        }
    }

    #[test]
    fn loss_non_increasing_under_small_steps() {
        use rand::Rng;
        let mut rng = crate::analytics::derived_rng(11, 0);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let offset = if i < 20 { -2.0 } else { 2.0 };
                vec![offset + rng.random_range(-0.5..0.5)]
            })
            .collect();
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let mut weights = vec![0.0, 0.0];
        let mut last = logistic_loss(&rows, &labels, &weights, 0.0);
        for _ in 0..200 {
            let grad = logistic_gradient(&rows, &labels, &weights, 0.0);
            for (w, g) in weights.iter_mut().zip(grad.iter()) {
                *w -= 0.01 * g;
            }
            let loss = logistic_loss(&rows, &labels, &weights, 0.0);
            assert!(loss <= last + 1e-12, "loss increased: {last} -> {loss}");
            last = loss;
        }
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![vec![0.0], vec![1.0]];
        assert_eq!(
            train_logistic(&rows, &[1, 1], LogisticConfig::default()).unwrap_err(),
            AnalyticsError::SingleClass
        );
    }

    #[test]
    fn non_finite_feature_rejected() {
        let rows = vec![vec![f64::NAN], vec![1.0]];
        assert!(matches!(
            train_logistic(&rows, &[0, 1], LogisticConfig::default()).unwrap_err(),
            AnalyticsError::NonFiniteFeature { .. }
        ));
    }
}
