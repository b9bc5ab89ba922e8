use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::FeatureError;

/// Category slot used when an optional field is absent.
pub const MISSING_CATEGORY: &str = "__missing__";

/// One-hot encode over a sorted category list, with a trailing unknown
/// flag: vectors always have length `categories.len() + 1` and exactly one
/// component set to 1.
pub fn encode_one_hot(value: &str, categories: &[String]) -> Vec<f64> {
    let mut out = vec![0.0; categories.len() + 1];
    match categories.binary_search_by(|c| c.as_str().cmp(value)) {
        Ok(index) => out[index] = 1.0,
        Err(_) => *out.last_mut().expect("non-empty") = 1.0,
    }
    out
}

/// Signed whole days between two timestamps: floor((t - reference) / 86400s).
pub fn encode_time_delta(t: DateTime<Utc>, reference: DateTime<Utc>) -> i64 {
    (t - reference).num_seconds().div_euclid(86_400)
}

/// Lowercased tokens split on non-alphanumeric boundaries.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Fit a sorted vocabulary with smoothed idf weights over a corpus:
/// idf = ln((1 + N) / (1 + df)) + 1.
pub fn fit_idf(documents: &[&str]) -> (Vec<String>, Vec<f64>) {
    use std::collections::{BTreeMap, BTreeSet};
    let mut document_frequency: BTreeMap<String, usize> = BTreeMap::new();
    for doc in documents {
        let unique: BTreeSet<String> = tokenize(doc).into_iter().collect();
        for token in unique {
            *document_frequency.entry(token).or_insert(0) += 1;
        }
    }
    let n = documents.len() as f64;
    let mut vocabulary = Vec::with_capacity(document_frequency.len());
    let mut idf = Vec::with_capacity(document_frequency.len());
    for (token, df) in document_frequency {
        vocabulary.push(token);
        idf.push(((1.0 + n) / (1.0 + df as f64)).ln() + 1.0);
    }
    (vocabulary, idf)
}

/// TF-IDF weights for one document over a fitted vocabulary, L2-normalized.
/// Out-of-vocabulary tokens are ignored; empty or fully-OOV documents
/// yield the zero vector.
pub fn encode_text_tfidf(doc: &str, vocabulary: &[String], idf: &[f64]) -> Vec<f64> {
    let mut weights = vec![0.0; vocabulary.len()];
    for token in tokenize(doc) {
        if let Ok(index) = vocabulary.binary_search(&token) {
            weights[index] += idf[index];
        }
    }
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for w in weights.iter_mut() {
            *w /= norm;
        }
    }
    weights
}

/// Scale into [0, 1] using fitted bounds: constant columns map to 0 and
/// out-of-range values clamp.
pub fn normalize_minmax(values: &[f64], min: f64, max: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            if max > min {
                ((v - min) / (max - min)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Fit min/max/mean over the present values of a possibly-sparse column.
pub fn fit_numeric_stats(column: &[Option<f64>]) -> Result<NumericStats, FeatureError> {
    let present: Vec<f64> = column.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(FeatureError::AllMissingNumericColumn);
    }
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    Ok(NumericStats { min, max, mean })
}

/// Replace missing numeric entries with the fitted mean.
pub fn impute_numeric(column: &[Option<f64>], mean: f64) -> Vec<f64> {
    column.iter().map(|v| v.unwrap_or(mean)).collect()
}
