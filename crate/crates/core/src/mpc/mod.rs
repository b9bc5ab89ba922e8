//! Simulated multi-party privacy-preserving audits: additive secret sharing
//! over the Mersenne prime field 2^61 - 1, secure aggregation, compliance
//! predicates over the opened aggregate only, and on-ledger attestation.
//!
//! All parties run in-process. The message sequence mirrors a real additive
//! sharing protocol: each party shares its local sum, receives one share of
//! every other party's sum, adds them componentwise, and only the joint
//! aggregate is ever opened. Transcripts carry opened aggregates and the
//! verdict, never per-party values.

mod audit;
mod field;
mod sharing;

pub use audit::{
    emit_attestation, run_compliance_audit, Attestation, AuditTranscript, CompliancePredicate,
    OpenedValue, Verdict,
};
pub use field::{decode_amount, encode_amount, FieldElement, FIELD_PRIME};
pub use sharing::{reconstruct_secret, secure_sum, share_secret, SecretShare};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpcError {
    #[error("field value {0} outside [0, p)")]
    ValueOutsideField(u64),
    #[error("amount magnitude {0} too large to embed (must be < p/4)")]
    MagnitudeTooLarge(i64),
    #[error("need at least two parties, got {0}")]
    TooFewParties(usize),
    #[error("incomplete share set: expected {expected}, got {got}")]
    IncompleteShareSet { expected: usize, got: usize },
    #[error("shares from mixed sessions: {0} vs {1}")]
    MixedSessions(String, String),
    #[error("unknown predicate: {0}")]
    UnknownPredicate(String),
    #[error("party names must be distinct, duplicate {0:?}")]
    DuplicateParty(String),
    #[error(transparent)]
    Ledger(#[from] crate::ledger::LedgerError),
}
