use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::ReconcileError;
use crate::ledger::{
    parse_decimal_amount, parse_occurred_at, ContextMetadata, EntryLeg, TripleEntryRecord,
};

/// Column-to-field mapping for tabular ingestion.
///
/// Required columns: reference key, both parties, amount, and timestamp.
/// The rest fall back to fixed defaults when their column is absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMapping {
    pub reference_key: String,
    pub party_from: String,
    pub party_to: String,
    pub amount: String,
    pub occurred_at: String,
    pub currency: String,
    pub debit_account: String,
    pub credit_account: String,
    pub location: String,
    pub item_description: String,
    pub tags: String,
    pub rationale: String,
    /// Used when the currency column is missing from the header.
    pub default_currency: String,
    /// Used when the account columns are missing from the header.
    pub default_debit_account: String,
    pub default_credit_account: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            reference_key: "reference_key".into(),
            party_from: "party_from".into(),
            party_to: "party_to".into(),
            amount: "amount".into(),
            occurred_at: "occurred_at".into(),
            currency: "currency".into(),
            debit_account: "debit_account".into(),
            credit_account: "credit_account".into(),
            location: "location".into(),
            item_description: "item_description".into(),
            tags: "tags".into(),
            rationale: "rationale".into(),
            default_currency: "USD".into(),
            default_debit_account: "cash".into(),
            default_credit_account: "counterparty".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: usize,
    pub reason: String,
}

/// Per-ingestion accounting: every input row is either accepted or rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: Vec<RejectedRow>,
}

pub enum IngestSource<'a> {
    Csv {
        data: &'a str,
        delimiter: u8,
        mapping: &'a ColumnMapping,
    },
    JsonLines {
        data: &'a str,
    },
}

/// Turn external rows into balanced draft records, never aborting on a bad
/// row: malformed rows are rejected with line-level reasons.
pub fn ingest_records(
    source: IngestSource,
) -> Result<(Vec<TripleEntryRecord>, IngestReport), ReconcileError> {
    match source {
        IngestSource::Csv {
            data,
            delimiter,
            mapping,
        } => ingest_csv(data, delimiter, mapping),
        IngestSource::JsonLines { data } => ingest_jsonl(data),
    }
}

struct ColumnIndex {
    required: HashMap<&'static str, usize>,
    optional: HashMap<&'static str, usize>,
}

impl ColumnIndex {
    fn build(header: &csv::StringRecord, mapping: &ColumnMapping) -> Result<Self, ReconcileError> {
        let position = |name: &str| header.iter().position(|h| h.trim() == name);
        let mut required = HashMap::new();
        for (field, column) in [
            ("reference_key", &mapping.reference_key),
            ("party_from", &mapping.party_from),
            ("party_to", &mapping.party_to),
            ("amount", &mapping.amount),
            ("occurred_at", &mapping.occurred_at),
        ] {
            let idx = position(column)
                .ok_or_else(|| ReconcileError::MappingIncomplete(column.clone()))?;
            required.insert(field, idx);
        }
        let mut optional = HashMap::new();
        for (field, column) in [
            ("currency", &mapping.currency),
            ("debit_account", &mapping.debit_account),
            ("credit_account", &mapping.credit_account),
            ("location", &mapping.location),
            ("item_description", &mapping.item_description),
            ("tags", &mapping.tags),
            ("rationale", &mapping.rationale),
        ] {
            if let Some(idx) = position(column) {
                optional.insert(field, idx);
            }
        }
        Ok(Self { required, optional })
    }

    fn required<'r>(&self, row: &'r csv::StringRecord, field: &str) -> Result<&'r str, String> {
        let value = row
            .get(self.required[field])
            .map(str::trim)
            .unwrap_or_default();
        if value.is_empty() {
            Err(format!("missing value for {field}"))
        } else {
            Ok(value)
        }
    }

    fn optional<'r>(&self, row: &'r csv::StringRecord, field: &str) -> Option<&'r str> {
        self.optional
            .get(field)
            .and_then(|&idx| row.get(idx))
            .map(str::trim)
            .filter(|v| !v.is_empty())
    }
}

fn row_to_record(
    index: &ColumnIndex,
    mapping: &ColumnMapping,
    row: &csv::StringRecord,
) -> Result<TripleEntryRecord, String> {
    let reference_key = index.required(row, "reference_key")?;
    let party_from = index.required(row, "party_from")?;
    let party_to = index.required(row, "party_to")?;
    let raw_amount = index.required(row, "amount")?;
    let raw_occurred = index.required(row, "occurred_at")?;
    let currency = index
        .optional(row, "currency")
        .unwrap_or(&mapping.default_currency);
    let minor_units = parse_decimal_amount(raw_amount, currency)?;
    let occurred_at = parse_occurred_at(raw_occurred).map_err(|e| e.to_string())?;
    let debit_account = index
        .optional(row, "debit_account")
        .unwrap_or(&mapping.default_debit_account);
    let credit_account = index
        .optional(row, "credit_account")
        .unwrap_or(&mapping.default_credit_account);

    let mut metadata = ContextMetadata::new(party_from, party_to, occurred_at);
    metadata.location = index.optional(row, "location").map(str::to_string);
    metadata.item_description = index
        .optional(row, "item_description")
        .map(str::to_string);
    metadata.rationale = index.optional(row, "rationale").map(str::to_string);
    if let Some(tags) = index.optional(row, "tags") {
        metadata.tags = tags
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
    }

    let record = TripleEntryRecord::draft(
        reference_key,
        vec![EntryLeg::new(debit_account, minor_units, currency)],
        vec![EntryLeg::new(credit_account, minor_units, currency)],
        metadata,
    );
    record.validate().map_err(|e| e.to_string())?;
    Ok(record)
}

fn ingest_csv(
    data: &str,
    delimiter: u8,
    mapping: &ColumnMapping,
) -> Result<(Vec<TripleEntryRecord>, IngestReport), ReconcileError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(data.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| ReconcileError::SourceUnreadable(e.to_string()))?
        .clone();
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(ReconcileError::SourceUnreadable("empty header row".into()));
    }
    let index = ColumnIndex::build(&header, mapping)?;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut seen_keys: BTreeSet<String> = BTreeSet::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2; // header occupies line 1
        match row {
            Err(e) => rejected.push(RejectedRow {
                line,
                reason: format!("unreadable row: {e}"),
            }),
            Ok(row) => match row_to_record(&index, mapping, &row) {
                Ok(record) => {
                    if !seen_keys.insert(record.third.reference_key.clone()) {
                        rejected.push(RejectedRow {
                            line,
                            reason: format!(
                                "duplicate reference key: {}",
                                record.third.reference_key
                            ),
                        });
                    } else {
                        records.push(record);
                    }
                }
                Err(reason) => rejected.push(RejectedRow { line, reason }),
            },
        }
    }
    let report = IngestReport {
        accepted: records.len(),
        rejected,
    };
    Ok((records, report))
}

fn ingest_jsonl(data: &str) -> Result<(Vec<TripleEntryRecord>, IngestReport), ReconcileError> {
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    let mut seen_keys: BTreeSet<String> = BTreeSet::new();
    for (i, line) in data.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let line_no = i + 1;
        match serde_json::from_str::<TripleEntryRecord>(line) {
            Err(e) => rejected.push(RejectedRow {
                line: line_no,
                reason: format!("unparseable record: {e}"),
            }),
            Ok(record) => match record.validate() {
                Err(e) => rejected.push(RejectedRow {
                    line: line_no,
                    reason: e.to_string(),
                }),
                Ok(()) => {
                    if !seen_keys.insert(record.third.reference_key.clone()) {
                        rejected.push(RejectedRow {
                            line: line_no,
                            reason: format!(
                                "duplicate reference key: {}",
                                record.third.reference_key
                            ),
                        });
                    } else {
                        records.push(record);
                    }
                }
            },
        }
    }
    let report = IngestReport {
        accepted: records.len(),
        rejected,
    };
    Ok((records, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::LedgerChain;

    const VALID_CSV: &str = "\
reference_key,party_from,party_to,amount,currency,occurred_at,location
T1,alice,bob,12.50,USD,2024-01-01T09:00:00Z,NY
T2,bob,carol,3.99,USD,2024-01-02T10:30:00Z,LA
T3,carol,alice,100.00,USD,2024-01-03T11:00:00Z,
";

    fn mapping() -> ColumnMapping {
        ColumnMapping::default()
    }

    #[test]
    fn clean_csv_fully_accepted() {
        let m = mapping();
        let (records, report) = ingest_records(IngestSource::Csv {
            data: VALID_CSV,
            delimiter: b',',
            mapping: &m,
        })
        .unwrap();
        assert_eq!(report.accepted, 3);
        assert!(report.rejected.is_empty());
        assert_eq!(records[0].total_debits(), 1250);
        assert_eq!(records[2].third.metadata.location, None);
    }

    #[test]
    fn bad_amount_rejected_with_reason() {
        let data = "\
reference_key,party_from,party_to,amount,occurred_at
T1,alice,bob,12.3.4,2024-01-01T09:00:00Z
";
        let m = mapping();
        let (records, report) = ingest_records(IngestSource::Csv {
            data,
            delimiter: b',',
            mapping: &m,
        })
        .unwrap();
        assert!(records.is_empty());
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].line, 2);
        assert!(report.rejected[0].reason.contains("unparseable amount"));
    }

    #[test]
    fn accepted_plus_rejected_covers_all_rows() {
        let data = "\
reference_key,party_from,party_to,amount,occurred_at
T1,alice,bob,12.50,2024-01-01T09:00:00Z
T2,alice,alice,5.00,2024-01-01T09:00:00Z
T3,alice,bob,not-a-number,2024-01-01T09:00:00Z
T1,alice,bob,1.00,2024-01-01T09:00:00Z
";
        let m = mapping();
        let (records, report) = ingest_records(IngestSource::Csv {
            data,
            delimiter: b',',
            mapping: &m,
        })
        .unwrap();
        assert_eq!(report.accepted + report.rejected.len(), 4);
        assert_eq!(records.len(), report.accepted);
    }

    #[test]
    fn missing_required_column_is_mapping_incomplete() {
        let data = "reference_key,party_from,party_to,amount\nT1,a,b,1.00\n";
        let m = mapping();
        let err = ingest_records(IngestSource::Csv {
            data,
            delimiter: b',',
            mapping: &m,
        })
        .unwrap_err();
        assert!(matches!(err, ReconcileError::MappingIncomplete(c) if c == "occurred_at"));
    }

    #[test]
    fn jsonl_export_reingests_field_for_field() {
        let m = mapping();
        let (records, _) = ingest_records(IngestSource::Csv {
            data: VALID_CSV,
            delimiter: b',',
            mapping: &m,
        })
        .unwrap();
        let mut chain = LedgerChain::new("shared");
        for r in records {
            chain.append(r).unwrap();
        }
        let exported = chain.to_jsonl();
        let (reingested, report) = ingest_records(IngestSource::JsonLines { data: &exported }).unwrap();
        assert_eq!(report.accepted, 3);
        assert_eq!(reingested, chain.records().to_vec());
    }
}
