//! Ingestion of external transaction data, cross-ledger reconciliation by
//! shared reference key, and conditional settlement rules.

mod ingest;
mod matching;
mod rules;

pub use ingest::{ingest_records, ColumnMapping, IngestReport, IngestSource, RejectedRow};
pub use matching::{
    match_by_reference_key, reconcile, MatchOutcome, MatchStatus, MatchedPair,
    ReconciliationReport, UnmatchedRecord,
};
pub use rules::{
    evaluate_settlement_rules, AmountExpr, Condition, LegTemplate, MetadataField, SettlementRule,
    SettlementTemplate,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReconcileError {
    #[error("source unreadable: {0}")]
    SourceUnreadable(String),
    #[error("mapping incomplete: missing column {0:?}")]
    MappingIncomplete(String),
    #[error("duplicate reference key {key:?} within chain {owner:?}")]
    DuplicateKeyWithinChain { owner: String, key: String },
    #[error("settlement template of rule {rule_id:?} does not balance")]
    RuleTemplateUnbalanced { rule_id: String },
    #[error("invalid settlement template of rule {rule_id:?}: {reason}")]
    InvalidTemplate { rule_id: String, reason: String },
}
