//! Triple-entry accounting engine with a self-contained audit analytics toolkit.
//!
//! The crate is organized around an append-only, hash-chained ledger whose
//! records carry conventional debit/credit legs plus a third entry of
//! contextual metadata sealed by a SHA-256 chain. On top of the ledger sit:
//!
//! - [`reconcile`]: CSV/JSONL ingestion, cross-ledger matching by shared
//!   reference key, and conditional settlement rules
//! - [`features`]: fit/transform feature encoding (one-hot, time deltas,
//!   TF-IDF, min-max normalization, imputation, ANOVA + RFE selection)
//! - [`analytics`]: logistic regression, decision trees, K-means, DBSCAN,
//!   Isolation Forest, LOF, linear forecasting, and evaluation metrics
//! - [`mining`]: Apriori/ECLAT frequent itemsets and association rules
//! - [`mpc`]: simulated additive secret sharing over a prime field, secure
//!   sums, compliance audits, and on-ledger attestations
//!
//! Every stochastic operation takes an explicit seed and is deterministic
//! given that seed, so audit evidence is reproducible.

pub mod analytics;
pub mod features;
pub mod ledger;
pub mod mining;
pub mod mpc;
pub mod reconcile;

pub use ledger::{
    balance_check, canonicalize_record, compute_record_hash, sha256_hex, BalanceReport,
    ContextMetadata, EntryLeg, LedgerChain, LedgerError, MonetaryAmount, ThirdEntry,
    TripleEntryRecord, VerificationReport, GENESIS_PREV_HASH,
};
