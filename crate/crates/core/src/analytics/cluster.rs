use serde::{Deserialize, Serialize};

use super::{check_finite, derived_rng, squared_distance, AnalyticsError};

/// Label assigned to density-clustering noise points.
pub const NOISE_LABEL: i64 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Per-row cluster label; `-1` marks noise for density clustering.
    pub labels: Vec<i64>,
    /// Final centroids (K-means only; empty for DBSCAN).
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared Euclidean distances to the assigned centroid.
    pub inertia: f64,
    /// Inertia after each Lloyd assignment phase, for monotonicity checks.
    pub inertia_history: Vec<f64>,
}

fn assign(rows: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(rows.len());
    let mut inertia = 0.0;
    for row in rows {
        let mut best = 0usize;
        let mut best_d = squared_distance(row, &centroids[0]);
        for (j, c) in centroids.iter().enumerate().skip(1) {
            let d = squared_distance(row, c);
            // Strict comparison: assignment ties go to the lowest centroid index.
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        labels.push(best);
        inertia += best_d;
    }
    (labels, inertia)
}

/// Lloyd's algorithm with seeded initialization from k distinct rows.
///
/// Empty clusters are reseeded to the point farthest from its assigned
/// centroid, which keeps inertia non-increasing across iterations.
pub fn kmeans(
    rows: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment, AnalyticsError> {
    if k == 0 || k > rows.len() {
        return Err(AnalyticsError::KOutOfRange { k, rows: rows.len() });
    }
    check_finite(rows)?;
    let mut rng = derived_rng(seed, 0);
    let mut centroids: Vec<Vec<f64>> = rand::seq::index::sample(&mut rng, rows.len(), k)
        .into_iter()
        .map(|i| rows[i].clone())
        .collect();

    let mut labels: Vec<usize> = vec![usize::MAX; rows.len()];
    let mut history = Vec::new();
    for _ in 0..max_iter.max(1) {
        let (new_labels, inertia) = assign(rows, &centroids);
        history.push(inertia);
        if new_labels == labels {
            break;
        }
        labels = new_labels;

        let dim = rows[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (row, &label) in rows.iter().zip(labels.iter()) {
            counts[label] += 1;
            for (s, v) in sums[label].iter_mut().zip(row.iter()) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for s in sums[j].iter_mut() {
                    *s /= counts[j] as f64;
                }
                centroids[j] = sums[j].clone();
            }
        }
        // Reseed each empty cluster to the currently worst-fit point.
        let mut taken: Vec<usize> = Vec::new();
        for j in 0..k {
            if counts[j] > 0 {
                continue;
            }
            let farthest = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken.contains(i))
                .map(|(i, row)| (i, squared_distance(row, &centroids[labels[i]])))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match farthest {
                Some((i, d)) if d > 0.0 => {
                    centroids[j] = rows[i].clone();
                    taken.push(i);
                }
                _ => break,
            }
        }
    }

    let inertia = *history.last().expect("at least one iteration");
    Ok(ClusterAssignment {
        labels: labels.into_iter().map(|l| l as i64).collect(),
        centroids,
        inertia,
        inertia_history: history,
    })
}

/// Classic DBSCAN with Euclidean distance and self-inclusive neighborhood
/// counts. Border points join the first core cluster that reaches them in
/// row-scan order; unreachable points keep the noise label.
pub fn dbscan(
    rows: &[Vec<f64>],
    eps: f64,
    min_pts: usize,
) -> Result<ClusterAssignment, AnalyticsError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(AnalyticsError::ParamOutOfRange("eps must be > 0".into()));
    }
    if min_pts == 0 {
        return Err(AnalyticsError::ParamOutOfRange("min_pts must be >= 1".into()));
    }
    check_finite(rows)?;
    let n = rows.len();
    let eps_sq = eps * eps;
    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| squared_distance(&rows[i], &rows[j]) <= eps_sq)
            .collect()
    };

    let mut labels = vec![NOISE_LABEL; n];
    let mut visited = vec![false; n];
    let mut cluster = 0i64;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let start_neighbors = neighbors(start);
        if start_neighbors.len() < min_pts {
            continue; // noise unless a later core point reaches it
        }
        labels[start] = cluster;
        let mut queue: std::collections::VecDeque<usize> = start_neighbors.into();
        while let Some(p) = queue.pop_front() {
            if labels[p] == NOISE_LABEL {
                labels[p] = cluster;
            }
            if visited[p] {
                continue;
            }
            visited[p] = true;
            let p_neighbors = neighbors(p);
            if p_neighbors.len() >= min_pts {
                queue.extend(p_neighbors);
            }
        }
        cluster += 1;
    }
    Ok(ClusterAssignment {
        labels,
        centroids: Vec::new(),
        inertia: 0.0,
        inertia_history: Vec::new(),
    })
}
