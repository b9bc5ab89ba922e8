//! Feature encoding pipeline: turning ledger records into numeric matrices
//! with a strict fit/transform split.
//!
//! All statistics (categories, vocabularies, min/max/mean, reference
//! timestamps) are fixed when a [`FeatureSchema`] is fitted; transforming
//! never updates them, so encoders are reproducible across runs and there
//! is no train/test leakage. Unseen categories land in a dedicated
//! unknown-flag column instead of failing.

mod encode;
mod schema;
mod select;

pub use encode::{
    encode_one_hot, encode_text_tfidf, encode_time_delta, fit_idf, fit_numeric_stats,
    impute_numeric, normalize_minmax, tokenize, NumericStats, MISSING_CATEGORY,
};
pub use schema::{
    fit_schema, transform, ColumnKind, ColumnSpec, FeatureField, FeatureMatrix, FeatureSchema,
    PipelineConfig, TargetSpec,
};
pub use select::{anova_f_scores, recursive_feature_elimination, RfeTrainer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty input")]
    EmptyInput,
    #[error("numeric column has no present values to fit a mean")]
    AllMissingNumericColumn,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("keep = {keep} out of range for {features} features")]
    KeepOutOfRange { keep: usize, features: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error(transparent)]
    Analytics(#[from] crate::analytics::AnalyticsError),
}
