//! Triple-entry record model, canonical serialization, and hash chaining.
//!
//! A [`TripleEntryRecord`] holds balanced debit/credit legs plus a
//! [`ThirdEntry`] carrying contextual metadata and the hash linkage that
//! anchors the record into a [`LedgerChain`]. Hashes are SHA-256 over a
//! canonical JSON form (sorted keys, compact, UTF-8) so that two parties
//! serializing the same record always derive identical digests.

mod canonical;
mod chain;
mod record;

pub use canonical::{canonical_json_bytes, canonicalize_record, compute_record_hash, sha256_hex};
pub use chain::{LedgerChain, VerificationReport, GENESIS_PREV_HASH};
pub use record::{
    balance_check, minor_unit_exponent, parse_decimal_amount, parse_occurred_at, timestamp,
    BalanceReport, ContextMetadata, EntryLeg, MonetaryAmount, ThirdEntry, TripleEntryRecord,
    MAX_MINOR_UNITS,
};

use thiserror::Error;

/// Errors raised by record validation and chain operations.
#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("unbalanced record: debits minus credits = {imbalance}")]
    UnbalancedRecord { imbalance: i64 },
    #[error("currency mismatch within record")]
    CurrencyMismatch,
    #[error("duplicate reference key: {0}")]
    DuplicateReferenceKey(String),
    #[error("ledger io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed ledger line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
}
