use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{LedgerError, TripleEntryRecord};

/// SHA-256 of arbitrary bytes as 64 lowercase hex chars.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serialize a JSON value in canonical form: UTF-8, object keys sorted
/// ascending bytewise, no insignificant whitespace.
///
/// serde_json's default map is a BTreeMap, so converting through [`Value`]
/// yields sorted keys; compact output and raw UTF-8 are its defaults.
pub fn canonical_json_bytes(value: &Value) -> Vec<u8> {
    serde_json::to_vec(value).expect("json value serialization cannot fail")
}

/// Canonical byte form of a record with the `record_hash` field blanked.
///
/// This is the exact byte sequence that gets hashed, so any two
/// implementations agreeing on the record content agree on the digest.
pub fn canonicalize_record(record: &TripleEntryRecord) -> Result<Vec<u8>, LedgerError> {
    record.validate()?;
    let mut value = serde_json::to_value(record)
        .map_err(|e| LedgerError::InvalidRecord(format!("serialization failed: {e}")))?;
    value["third"]["record_hash"] = Value::String(String::new());
    Ok(canonical_json_bytes(&value))
}

/// SHA-256 digest of the canonical record bytes, lowercase hex.
pub fn compute_record_hash(record: &TripleEntryRecord) -> Result<String, LedgerError> {
    Ok(sha256_hex(&canonicalize_record(record)?))
}
