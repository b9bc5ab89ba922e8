use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReconcileError;
use crate::ledger::{LedgerChain, TripleEntryRecord};

/// Records matched across two chains by reference key, plus leftovers
/// labeled with the owner of the chain they were found in.
#[derive(Debug)]
pub struct MatchOutcome<'a> {
    pub pairs: Vec<(&'a TripleEntryRecord, &'a TripleEntryRecord)>,
    pub leftovers: Vec<(&'a TripleEntryRecord, String)>,
}

/// Per-key outcome of a reconciliation pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MatchStatus {
    Consistent,
    /// Signed difference of first-chain total minus second-chain total.
    AmountMismatch { difference: i64 },
    /// Names of metadata fields that disagree between the two records.
    MetadataDivergence { fields: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub reference_key: String,
    #[serde(flatten)]
    pub status: MatchStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedRecord {
    pub reference_key: String,
    pub present_in: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciliationReport {
    pub matched: Vec<MatchedPair>,
    pub unmatched: Vec<UnmatchedRecord>,
}

impl ReconciliationReport {
    pub fn is_clean(&self) -> bool {
        self.unmatched.is_empty()
            && self
                .matched
                .iter()
                .all(|m| m.status == MatchStatus::Consistent)
    }
}

fn index_by_key(
    chain: &LedgerChain,
) -> Result<BTreeMap<&str, &TripleEntryRecord>, ReconcileError> {
    let mut map = BTreeMap::new();
    for record in chain.records() {
        if map
            .insert(record.third.reference_key.as_str(), record)
            .is_some()
        {
            return Err(ReconcileError::DuplicateKeyWithinChain {
                owner: chain.owner.clone(),
                key: record.third.reference_key.clone(),
            });
        }
    }
    Ok(map)
}

/// Join two chains on the shared reference key.
///
/// Output order is deterministic: pairs and leftovers sorted by key, with
/// first-chain leftovers before second-chain ones on key ties.
pub fn match_by_reference_key<'a>(
    a: &'a LedgerChain,
    b: &'a LedgerChain,
) -> Result<MatchOutcome<'a>, ReconcileError> {
    let index_a = index_by_key(a)?;
    let index_b = index_by_key(b)?;
    let mut pairs = Vec::new();
    let mut leftovers = Vec::new();
    for (key, record_a) in &index_a {
        match index_b.get(key) {
            Some(record_b) => pairs.push((*record_a, *record_b)),
            None => leftovers.push((*record_a, a.owner.clone())),
        }
    }
    for (key, record_b) in &index_b {
        if !index_a.contains_key(key) {
            leftovers.push((*record_b, b.owner.clone()));
        }
    }
    leftovers.sort_by(|(r1, _), (r2, _)| r1.third.reference_key.cmp(&r2.third.reference_key));
    Ok(MatchOutcome { pairs, leftovers })
}

/// Compare two records documenting the same economic event.
///
/// Optional fields count as divergent only when present on both sides; a
/// one-sided optional field is not a discrepancy.
fn divergent_fields(a: &TripleEntryRecord, b: &TripleEntryRecord) -> Vec<String> {
    let (ma, mb) = (&a.third.metadata, &b.third.metadata);
    let mut fields = Vec::new();
    if a.currency() != b.currency() {
        fields.push("currency");
    }
    if ma.party_from != mb.party_from {
        fields.push("party_from");
    }
    if ma.party_to != mb.party_to {
        fields.push("party_to");
    }
    if ma.occurred_at != mb.occurred_at {
        fields.push("occurred_at");
    }
    if ma.tags != mb.tags {
        fields.push("tags");
    }
    for (name, va, vb) in [
        ("location", &ma.location, &mb.location),
        ("item_description", &ma.item_description, &mb.item_description),
        ("rationale", &ma.rationale, &mb.rationale),
    ] {
        if let (Some(x), Some(y)) = (va, vb) {
            if x != y {
                fields.push(name);
            }
        }
    }
    fields.sort_unstable();
    fields.into_iter().map(str::to_string).collect()
}

/// Reconcile two party ledgers key by key.
///
/// A matched pair is consistent iff the totals agree and no compared
/// metadata field diverges; an amount mismatch takes precedence over
/// metadata divergence and carries the signed difference (first minus
/// second).
pub fn reconcile(a: &LedgerChain, b: &LedgerChain) -> Result<ReconciliationReport, ReconcileError> {
    let outcome = match_by_reference_key(a, b)?;
    let mut matched = Vec::with_capacity(outcome.pairs.len());
    for (ra, rb) in outcome.pairs {
        let difference = ra.total_debits() - rb.total_debits();
        let status = if difference != 0 {
            MatchStatus::AmountMismatch { difference }
        } else {
            let fields = divergent_fields(ra, rb);
            if fields.is_empty() {
                MatchStatus::Consistent
            } else {
                MatchStatus::MetadataDivergence { fields }
            }
        };
        matched.push(MatchedPair {
            reference_key: ra.third.reference_key.clone(),
            status,
        });
    }
    let unmatched = outcome
        .leftovers
        .into_iter()
        .map(|(record, owner)| UnmatchedRecord {
            reference_key: record.third.reference_key.clone(),
            present_in: owner,
        })
        .collect();
    Ok(ReconciliationReport { matched, unmatched })
}
