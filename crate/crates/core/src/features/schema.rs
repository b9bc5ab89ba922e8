use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use super::encode::{
    encode_one_hot, encode_text_tfidf, encode_time_delta, fit_idf, normalize_minmax,
    MISSING_CATEGORY,
};
use super::FeatureError;
use crate::ledger::{timestamp, TripleEntryRecord};

/// Record fields the pipeline can turn into features. Identifier fields
/// (reference key, account names, hashes) are deliberately not encodable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureField {
    Amount,
    Currency,
    PartyFrom,
    PartyTo,
    Location,
    Description,
    DaysSinceReference,
    HourOfDay,
}

impl FeatureField {
    pub const ALL: [FeatureField; 8] = [
        FeatureField::Amount,
        FeatureField::Currency,
        FeatureField::PartyFrom,
        FeatureField::PartyTo,
        FeatureField::Location,
        FeatureField::DaysSinceReference,
        FeatureField::HourOfDay,
        FeatureField::Description,
    ];

    fn name(&self) -> &'static str {
        match self {
            FeatureField::Amount => "amount",
            FeatureField::Currency => "currency",
            FeatureField::PartyFrom => "party_from",
            FeatureField::PartyTo => "party_to",
            FeatureField::Location => "location",
            FeatureField::Description => "description",
            FeatureField::DaysSinceReference => "days_since_reference",
            FeatureField::HourOfDay => "hour_of_day",
        }
    }

    fn categorical_value(self, record: &TripleEntryRecord) -> Option<String> {
        let meta = &record.third.metadata;
        match self {
            FeatureField::Currency => record.currency().map(str::to_string),
            FeatureField::PartyFrom => Some(meta.party_from.clone()),
            FeatureField::PartyTo => Some(meta.party_to.clone()),
            FeatureField::Location => meta.location.clone(),
            _ => None,
        }
    }

    fn numeric_value(self, record: &TripleEntryRecord) -> f64 {
        match self {
            FeatureField::Amount => record.total_debits() as f64,
            FeatureField::HourOfDay => record.third.metadata.occurred_at.hour() as f64,
            _ => unreachable!("not a numeric field"),
        }
    }
}

/// Per-column encoder specification with all fitted statistics inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    OneHot {
        categories: Vec<String>,
    },
    TimeDelta {
        #[serde(with = "timestamp")]
        reference: DateTime<Utc>,
    },
    Tfidf {
        vocabulary: Vec<String>,
        idf: Vec<f64>,
    },
    Numeric {
        min: f64,
        max: f64,
        mean: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub field: FeatureField,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl ColumnSpec {
    /// Number of matrix columns this spec expands to.
    pub fn width(&self) -> usize {
        match &self.kind {
            ColumnKind::OneHot { categories } => categories.len() + 1,
            ColumnKind::Tfidf { vocabulary, .. } => vocabulary.len(),
            ColumnKind::TimeDelta { .. } | ColumnKind::Numeric { .. } => 1,
        }
    }

    fn expanded_names(&self) -> Vec<String> {
        match &self.kind {
            ColumnKind::OneHot { categories } => categories
                .iter()
                .map(|c| format!("{}={c}", self.name))
                .chain(std::iter::once(format!("{}=__unknown__", self.name)))
                .collect(),
            ColumnKind::Tfidf { vocabulary, .. } => vocabulary
                .iter()
                .map(|t| format!("{}:{t}", self.name))
                .collect(),
            _ => vec![self.name.clone()],
        }
    }
}

/// Which record field supplies the training label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum TargetSpec {
    /// Binary label: 1 when the tag is present on the record.
    TagPresent { tag: String },
    /// Raw total debit amount in minor units.
    Amount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub fields: Vec<FeatureField>,
    pub target: Option<TargetSpec>,
    /// Reference for day deltas; defaults to the earliest record timestamp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<DateTime<Utc>>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fields: FeatureField::ALL.to_vec(),
            target: None,
            reference: None,
        }
    }
}

/// Fitted encoder set: everything needed to reproduce a transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<ColumnSpec>,
    pub target: Option<TargetSpec>,
}

impl FeatureSchema {
    /// Total expanded matrix width.
    pub fn width(&self) -> usize {
        self.columns.iter().map(ColumnSpec::width).sum()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|c| c.expanded_names())
            .collect()
    }
}

/// Dense numeric matrix with expanded column names and an optional aligned
/// target vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn rows(&self) -> usize {
        self.values.len()
    }

    /// Binary labels derived from the target vector (values >= 0.5 are 1).
    pub fn binary_labels(&self) -> Option<Vec<usize>> {
        self.target
            .as_ref()
            .map(|t| t.iter().map(|&v| usize::from(v >= 0.5)).collect())
    }
}

/// Compute vocabularies, categories, and statistics from the input records
/// only. Constant categorical columns are dropped; identifier fields never
/// enter the schema.
pub fn fit_schema(
    records: &[TripleEntryRecord],
    config: &PipelineConfig,
) -> Result<FeatureSchema, FeatureError> {
    if records.is_empty() {
        return Err(FeatureError::EmptyInput);
    }
    let mut columns = Vec::new();
    for &field in &config.fields {
        match field {
            FeatureField::Amount | FeatureField::HourOfDay => {
                let values: Vec<f64> = records.iter().map(|r| field.numeric_value(r)).collect();
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                columns.push(ColumnSpec {
                    name: field.name().into(),
                    field,
                    kind: ColumnKind::Numeric { min, max, mean },
                });
            }
            FeatureField::Currency
            | FeatureField::PartyFrom
            | FeatureField::PartyTo
            | FeatureField::Location => {
                let mut categories: Vec<String> = records
                    .iter()
                    .map(|r| {
                        field
                            .categorical_value(r)
                            .unwrap_or_else(|| MISSING_CATEGORY.into())
                    })
                    .collect();
                categories.sort_unstable();
                categories.dedup();
                // A single-valued column carries no signal.
                if categories.len() > 1 {
                    columns.push(ColumnSpec {
                        name: field.name().into(),
                        field,
                        kind: ColumnKind::OneHot { categories },
                    });
                }
            }
            FeatureField::DaysSinceReference => {
                let reference = config.reference.unwrap_or_else(|| {
                    records
                        .iter()
                        .map(|r| r.third.metadata.occurred_at)
                        .min()
                        .expect("non-empty")
                });
                columns.push(ColumnSpec {
                    name: field.name().into(),
                    field,
                    kind: ColumnKind::TimeDelta { reference },
                });
            }
            FeatureField::Description => {
                let documents: Vec<&str> = records
                    .iter()
                    .map(|r| r.third.metadata.item_description.as_deref().unwrap_or(""))
                    .collect();
                let (vocabulary, idf) = fit_idf(&documents);
                if !vocabulary.is_empty() {
                    columns.push(ColumnSpec {
                        name: field.name().into(),
                        field,
                        kind: ColumnKind::Tfidf { vocabulary, idf },
                    });
                }
            }
        }
    }
    Ok(FeatureSchema {
        columns,
        target: config.target.clone(),
    })
}

/// Encode records against a fitted schema. Output contains no NaN and has
/// exactly the schema-predicted width.
pub fn transform(
    records: &[TripleEntryRecord],
    schema: &FeatureSchema,
) -> Result<FeatureMatrix, FeatureError> {
    let width = schema.width();
    let mut values = Vec::with_capacity(records.len());
    for record in records {
        let mut row = Vec::with_capacity(width);
        for column in &schema.columns {
            match &column.kind {
                ColumnKind::Numeric { min, max, mean: _ } => {
                    let v = column.field.numeric_value(record);
                    row.extend(normalize_minmax(&[v], *min, *max));
                }
                ColumnKind::OneHot { categories } => {
                    let value = column
                        .field
                        .categorical_value(record)
                        .unwrap_or_else(|| MISSING_CATEGORY.into());
                    row.extend(encode_one_hot(&value, categories));
                }
                ColumnKind::TimeDelta { reference } => {
                    row.push(encode_time_delta(record.third.metadata.occurred_at, *reference)
                        as f64);
                }
                ColumnKind::Tfidf { vocabulary, idf } => {
                    let doc = record.third.metadata.item_description.as_deref().unwrap_or("");
                    row.extend(encode_text_tfidf(doc, vocabulary, idf));
                }
            }
        }
        debug_assert_eq!(row.len(), width);
        values.push(row);
    }
    let target = schema.target.as_ref().map(|spec| {
        records
            .iter()
            .map(|r| match spec {
                TargetSpec::TagPresent { tag } => {
                    f64::from(u8::from(r.third.metadata.tags.contains(tag)))
                }
                TargetSpec::Amount => r.total_debits() as f64,
            })
            .collect()
    });
    Ok(FeatureMatrix {
        columns: schema.column_names(),
        values,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{ContextMetadata, EntryLeg};
    use chrono::TimeZone;

    fn record(key: &str, amount: i64, location: Option<&str>, hour: u32) -> TripleEntryRecord {
        let mut meta = ContextMetadata::new(
            "alice",
            "bob",
            Utc.with_ymd_and_hms(2024, 1, 1, hour, 0, 0).unwrap(),
        );
        meta.location = location.map(str::to_string);
        meta.item_description = Some("cash sale".into());
        TripleEntryRecord::draft(
            key,
            vec![EntryLeg::new("cash", amount, "USD")],
            vec![EntryLeg::new("revenue", amount, "USD")],
            meta,
        )
    }

    fn batch() -> Vec<TripleEntryRecord> {
        vec![
            record("T1", 1000, Some("NY"), 9),
            record("T2", 500, Some("LA"), 14),
            record("T3", 1500, Some("NY"), 17),
        ]
    }

    #[test]
    fn categories_sorted_and_deduplicated() {
        let schema = fit_schema(&batch(), &PipelineConfig::default()).unwrap();
        let location = schema
            .columns
            .iter()
            .find(|c| c.field == FeatureField::Location)
            .unwrap();
        match &location.kind {
            ColumnKind::OneHot { categories } => {
                assert_eq!(categories, &vec!["LA".to_string(), "NY".to_string()]);
            }
            _ => panic!("expected one-hot"),
        }
    }

    #[test]
    fn constant_currency_column_dropped() {
        let schema = fit_schema(&batch(), &PipelineConfig::default()).unwrap();
        assert!(!schema
            .columns
            .iter()
            .any(|c| c.field == FeatureField::Currency));
    }

    #[test]
    fn numeric_stats_fitted_from_input() {
        let records = vec![
            record("T1", 0, Some("NY"), 9),
            record("T2", 5, Some("LA"), 9),
            record("T3", 10, Some("NY"), 9),
        ];
        let schema = fit_schema(&records, &PipelineConfig::default()).unwrap();
        let amount = schema
            .columns
            .iter()
            .find(|c| c.field == FeatureField::Amount)
            .unwrap();
        match amount.kind {
            ColumnKind::Numeric { min, max, mean } => {
                assert_eq!((min, max, mean), (0.0, 10.0, 5.0));
            }
            _ => panic!("expected numeric"),
        }
    }

    #[test]
    fn transform_width_matches_schema_and_has_no_nan() {
        let schema = fit_schema(&batch(), &PipelineConfig::default()).unwrap();
        let matrix = transform(&batch(), &schema).unwrap();
        assert_eq!(matrix.columns.len(), schema.width());
        for row in &matrix.values {
            assert_eq!(row.len(), schema.width());
            assert!(row.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn unseen_category_raises_unknown_flag() {
        let schema = fit_schema(&batch(), &PipelineConfig::default()).unwrap();
        let unseen = vec![record("T9", 800, Some("CHI"), 9)];
        let matrix = transform(&unseen, &schema).unwrap();
        let flag_index = matrix
            .columns
            .iter()
            .position(|c| c == "location=__unknown__")
            .unwrap();
        assert_eq!(matrix.values[0][flag_index], 1.0);
    }

    #[test]
    fn tag_target_yields_binary_vector() {
        let mut records = batch();
        records[1].third.metadata.tags.insert("anomaly".into());
        let config = PipelineConfig {
            target: Some(TargetSpec::TagPresent { tag: "anomaly".into() }),
            ..PipelineConfig::default()
        };
        let schema = fit_schema(&records, &config).unwrap();
        let matrix = transform(&records, &schema).unwrap();
        assert_eq!(matrix.target, Some(vec![0.0, 1.0, 0.0]));
        assert_eq!(matrix.binary_labels(), Some(vec![0, 1, 0]));
    }

    #[test]
    fn schema_json_roundtrip_reproduces_transform() {
        let schema = fit_schema(&batch(), &PipelineConfig::default()).unwrap();
        let json = serde_json::to_string(&schema).unwrap();
        let restored: FeatureSchema = serde_json::from_str(&json).unwrap();
        assert_eq!(restored, schema);
        assert_eq!(
            transform(&batch(), &restored).unwrap(),
            transform(&batch(), &schema).unwrap()
        );
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            fit_schema(&[], &PipelineConfig::default()),
            Err(FeatureError::EmptyInput)
        ));
    }
}
