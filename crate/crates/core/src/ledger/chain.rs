use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::canonical::{canonical_json_bytes, compute_record_hash};
use super::{LedgerError, TripleEntryRecord};

/// Chain anchor: the previous-hash value of the first record.
pub const GENESIS_PREV_HASH: &str =
    "0000000000000000000000000000000000000000000000000000000000000000";

/// Result of walking a chain and recomputing every hash and link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub failing_index: Option<usize>,
    pub reason: Option<String>,
}

impl VerificationReport {
    fn ok() -> Self {
        Self {
            ok: true,
            failing_index: None,
            reason: None,
        }
    }

    fn fail(index: usize, reason: &str) -> Self {
        Self {
            ok: false,
            failing_index: Some(index),
            reason: Some(reason.to_string()),
        }
    }
}

/// Ordered, append-only sequence of sealed records anchored at genesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerChain {
    pub owner: String,
    records: Vec<TripleEntryRecord>,
}

impl LedgerChain {
    pub fn new(owner: &str) -> Self {
        Self {
            owner: owner.to_string(),
            records: Vec::new(),
        }
    }

    /// Wrap already-sealed records without validating them. Callers are
    /// expected to run [`verify`](Self::verify) before trusting the content;
    /// this is how persisted ledgers (including tampered ones) get loaded.
    pub fn from_records_unchecked(owner: &str, records: Vec<TripleEntryRecord>) -> Self {
        Self {
            owner: owner.to_string(),
            records,
        }
    }

    pub fn records(&self) -> &[TripleEntryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains_key(&self, reference_key: &str) -> bool {
        self.records
            .iter()
            .any(|r| r.third.reference_key == reference_key)
    }

    /// Seal a draft record onto the tail of the chain.
    ///
    /// Sets `prev_record_hash` to the tail's hash (or the genesis constant),
    /// computes and stores `record_hash`, and appends. Earlier records are
    /// never touched.
    pub fn append(&mut self, mut record: TripleEntryRecord) -> Result<&TripleEntryRecord, LedgerError> {
        if self.contains_key(&record.third.reference_key) {
            return Err(LedgerError::DuplicateReferenceKey(
                record.third.reference_key.clone(),
            ));
        }
        record.third.prev_record_hash = match self.records.last() {
            Some(tail) => tail.third.record_hash.clone(),
            None => GENESIS_PREV_HASH.to_string(),
        };
        record.third.record_hash = String::new();
        record.third.record_hash = compute_record_hash(&record)?;
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    /// Recompute every record hash and prev link; report the first failure.
    ///
    /// An empty chain verifies. Failures are reported, never thrown: a
    /// tampered ledger is a finding, not a crash.
    pub fn verify(&self) -> VerificationReport {
        let mut seen_keys: BTreeSet<&str> = BTreeSet::new();
        for (index, record) in self.records.iter().enumerate() {
            let expected_prev = if index == 0 {
                GENESIS_PREV_HASH
            } else {
                self.records[index - 1].third.record_hash.as_str()
            };
            if record.third.prev_record_hash != expected_prev {
                return VerificationReport::fail(index, "prev hash link mismatch");
            }
            match compute_record_hash(record) {
                Ok(hash) => {
                    if hash != record.third.record_hash {
                        return VerificationReport::fail(index, "hash mismatch");
                    }
                }
                Err(e) => {
                    return VerificationReport::fail(index, &format!("invalid record: {e}"));
                }
            }
            if !seen_keys.insert(record.third.reference_key.as_str()) {
                return VerificationReport::fail(index, "duplicate reference key");
            }
        }
        VerificationReport::ok()
    }

    /// Read-only view: the subsequence of records in which the party appears
    /// as `party_from` or `party_to`, in original order.
    pub fn party_view(&self, party: &str) -> Vec<&TripleEntryRecord> {
        self.records
            .iter()
            .filter(|r| {
                r.third.metadata.party_from == party || r.third.metadata.party_to == party
            })
            .collect()
    }

    /// Serialize as JSON Lines: one canonical record object per line, UTF-8,
    /// LF terminators. Replaying the lines through append semantics yields a
    /// verifying chain iff the file is intact.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            let value = serde_json::to_value(record).expect("record serializes");
            out.push_str(
                std::str::from_utf8(&canonical_json_bytes(&value)).expect("canonical is utf-8"),
            );
            out.push('\n');
        }
        out
    }

    pub fn save_jsonl(&self, path: &std::path::Path) -> Result<(), LedgerError> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    /// Parse a JSON Lines ledger without verifying hashes.
    ///
    /// Structural errors (unparseable lines) fail the load; integrity
    /// problems are left for [`verify`](Self::verify) so callers can report
    /// the failing index.
    pub fn from_jsonl(owner: &str, text: &str) -> Result<Self, LedgerError> {
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: TripleEntryRecord =
                serde_json::from_str(line).map_err(|e| LedgerError::MalformedLine {
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            records.push(record);
        }
        Ok(Self::from_records_unchecked(owner, records))
    }

    pub fn load_jsonl(owner: &str, path: &std::path::Path) -> Result<Self, LedgerError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_jsonl(owner, &text)
    }
}
