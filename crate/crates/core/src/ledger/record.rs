use std::collections::BTreeSet;

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use super::LedgerError;

/// Largest representable magnitude for minor units. Amounts are kept inside
/// the f64-exact integer range so downstream numeric pipelines never lose
/// precision.
pub const MAX_MINOR_UNITS: i64 = 1 << 53;

/// A monetary quantity in a currency's smallest denomination (e.g. cents).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonetaryAmount {
    pub minor_units: i64,
    pub currency: String,
}

impl MonetaryAmount {
    pub fn new(minor_units: i64, currency: &str) -> Self {
        Self {
            minor_units,
            currency: currency.to_string(),
        }
    }
}

/// One side of a double entry: an account plus a strictly positive amount.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryLeg {
    pub account: String,
    pub amount: MonetaryAmount,
}

impl EntryLeg {
    pub fn new(account: &str, minor_units: i64, currency: &str) -> Self {
        Self {
            account: account.to_string(),
            amount: MonetaryAmount::new(minor_units, currency),
        }
    }
}

/// Strict second-precision UTC timestamp serialization (`%Y-%m-%dT%H:%M:%SZ`).
///
/// Deserialization accepts any RFC 3339 offset and normalizes to UTC; values
/// carrying sub-second precision are rejected at validation time so canonical
/// bytes stay injective over distinct records.
pub mod timestamp {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{self, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&raw)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

/// Parse an RFC 3339 timestamp, normalize to UTC, and truncate to seconds.
pub fn parse_occurred_at(raw: &str) -> Result<DateTime<Utc>, LedgerError> {
    let parsed = DateTime::parse_from_rfc3339(raw)
        .map_err(|e| LedgerError::InvalidRecord(format!("unparseable timestamp {raw:?}: {e}")))?;
    let utc = parsed.with_timezone(&Utc);
    Ok(utc.with_nanosecond(0).unwrap_or(utc))
}

/// The contextual third-entry payload: who, what, where, when, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextMetadata {
    pub party_from: String,
    pub party_to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_description: Option<String>,
    pub tags: BTreeSet<String>,
    #[serde(with = "timestamp")]
    pub occurred_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

impl ContextMetadata {
    /// Build metadata with the timestamp truncated to second precision.
    pub fn new(party_from: &str, party_to: &str, occurred_at: DateTime<Utc>) -> Self {
        Self {
            party_from: party_from.to_string(),
            party_to: party_to.to_string(),
            location: None,
            item_description: None,
            tags: BTreeSet::new(),
            occurred_at: occurred_at.with_nanosecond(0).unwrap_or(occurred_at),
            rationale: None,
        }
    }

    pub fn with_location(mut self, location: &str) -> Self {
        self.location = Some(location.to_string());
        self
    }

    pub fn with_description(mut self, description: &str) -> Self {
        self.item_description = Some(description.to_string());
        self
    }

    pub fn with_rationale(mut self, rationale: &str) -> Self {
        self.rationale = Some(rationale.to_string());
        self
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tags.insert(tag.to_string());
        self
    }
}

/// The metadata-plus-linkage entry that seals a record into the chain.
///
/// `prev_record_hash` and `record_hash` are empty on a draft and filled by
/// [`LedgerChain::append`](super::LedgerChain::append).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThirdEntry {
    pub reference_key: String,
    pub metadata: ContextMetadata,
    pub prev_record_hash: String,
    pub record_hash: String,
}

/// One transaction: debit legs, credit legs, and the sealed third entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleEntryRecord {
    pub debits: Vec<EntryLeg>,
    pub credits: Vec<EntryLeg>,
    pub third: ThirdEntry,
}

/// Outcome of a balance check: exact integer imbalance in minor units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub balanced: bool,
    pub imbalance: i64,
}

impl TripleEntryRecord {
    /// Build an unsealed draft; hash linkage is assigned on append.
    pub fn draft(
        reference_key: &str,
        debits: Vec<EntryLeg>,
        credits: Vec<EntryLeg>,
        metadata: ContextMetadata,
    ) -> Self {
        Self {
            debits,
            credits,
            third: ThirdEntry {
                reference_key: reference_key.to_string(),
                metadata,
                prev_record_hash: String::new(),
                record_hash: String::new(),
            },
        }
    }

    /// Total debit amount in minor units.
    pub fn total_debits(&self) -> i64 {
        self.debits.iter().map(|l| l.amount.minor_units).sum()
    }

    /// Total credit amount in minor units.
    pub fn total_credits(&self) -> i64 {
        self.credits.iter().map(|l| l.amount.minor_units).sum()
    }

    /// The single currency shared by all legs, if the record has any legs.
    pub fn currency(&self) -> Option<&str> {
        self.debits
            .first()
            .or_else(|| self.credits.first())
            .map(|l| l.amount.currency.as_str())
    }

    /// Check every type invariant except the hash fields' final values.
    ///
    /// Hash fields must be either empty (draft) or 64 lowercase hex chars
    /// (sealed); whether they match the canonical content is the chain
    /// verifier's job.
    pub fn validate(&self) -> Result<(), LedgerError> {
        if self.third.reference_key.is_empty() {
            return Err(LedgerError::InvalidRecord("empty reference_key".into()));
        }
        if self.debits.is_empty() || self.credits.is_empty() {
            return Err(LedgerError::InvalidRecord(
                "record needs at least one debit and one credit leg".into(),
            ));
        }
        let currency = self.currency().expect("legs present").to_string();
        if !is_valid_currency(&currency) {
            return Err(LedgerError::InvalidRecord(format!(
                "currency {currency:?} is not a 3-letter uppercase code"
            )));
        }
        for leg in self.debits.iter().chain(self.credits.iter()) {
            if leg.account.is_empty() {
                return Err(LedgerError::InvalidRecord("empty account".into()));
            }
            if leg.amount.currency != currency {
                return Err(LedgerError::CurrencyMismatch);
            }
            if leg.amount.minor_units <= 0 {
                return Err(LedgerError::InvalidRecord(format!(
                    "leg amount must be strictly positive, got {}",
                    leg.amount.minor_units
                )));
            }
            if leg.amount.minor_units >= MAX_MINOR_UNITS {
                return Err(LedgerError::InvalidRecord(
                    "leg amount magnitude exceeds 2^53".into(),
                ));
            }
        }
        let report = balance_check(self)?;
        if !report.balanced {
            return Err(LedgerError::UnbalancedRecord {
                imbalance: report.imbalance,
            });
        }
        let meta = &self.third.metadata;
        if meta.party_from.is_empty() || meta.party_to.is_empty() {
            return Err(LedgerError::InvalidRecord("empty party identifier".into()));
        }
        if meta.party_from == meta.party_to {
            return Err(LedgerError::InvalidRecord(
                "party_from must differ from party_to".into(),
            ));
        }
        if meta.occurred_at.nanosecond() != 0 {
            return Err(LedgerError::InvalidRecord(
                "occurred_at must be second-precision UTC".into(),
            ));
        }
        for (name, hash) in [
            ("prev_record_hash", &self.third.prev_record_hash),
            ("record_hash", &self.third.record_hash),
        ] {
            if !hash.is_empty() && !is_valid_hash_hex(hash) {
                return Err(LedgerError::InvalidRecord(format!(
                    "{name} must be empty or 64 lowercase hex chars"
                )));
            }
        }
        Ok(())
    }
}

fn is_valid_currency(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase())
}

fn is_valid_hash_hex(hash: &str) -> bool {
    hash.len() == 64
        && hash
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// Check the double-entry offset inside a single record.
///
/// Passes iff the debit and credit totals agree exactly; the signed
/// imbalance (debits minus credits) is reported either way.
pub fn balance_check(record: &TripleEntryRecord) -> Result<BalanceReport, LedgerError> {
    let currencies: BTreeSet<&str> = record
        .debits
        .iter()
        .chain(record.credits.iter())
        .map(|l| l.amount.currency.as_str())
        .collect();
    if currencies.len() > 1 {
        return Err(LedgerError::CurrencyMismatch);
    }
    let debits: i128 = record
        .debits
        .iter()
        .map(|l| i128::from(l.amount.minor_units))
        .sum();
    let credits: i128 = record
        .credits
        .iter()
        .map(|l| i128::from(l.amount.minor_units))
        .sum();
    let imbalance = i64::try_from(debits - credits)
        .map_err(|_| LedgerError::InvalidRecord("imbalance overflows i64".into()))?;
    Ok(BalanceReport {
        balanced: imbalance == 0,
        imbalance,
    })
}

/// Number of decimal places in a currency's minor unit.
pub fn minor_unit_exponent(currency: &str) -> u32 {
    match currency {
        "JPY" | "KRW" | "VND" | "CLP" | "ISK" => 0,
        "BHD" | "IQD" | "JOD" | "KWD" | "LYD" | "OMR" | "TND" => 3,
        _ => 2,
    }
}

/// Parse a decimal amount string into minor units, requiring exactly the
/// currency's minor-unit precision (e.g. `"12.34"` for USD, `"1200"` for JPY).
pub fn parse_decimal_amount(raw: &str, currency: &str) -> Result<i64, String> {
    let exponent = minor_unit_exponent(currency);
    let raw = raw.trim();
    let (sign, digits) = match raw.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, raw),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty()
        || !whole.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(format!("unparseable amount {raw:?}"));
    }
    if frac.len() != exponent as usize {
        return Err(format!(
            "amount {raw:?} must have exactly {exponent} decimal places for {currency}"
        ));
    }
    let combined = format!("{whole}{frac}");
    combined
        .parse::<i64>()
        .map(|v| sign * v)
        .map_err(|_| format!("amount {raw:?} out of range"))
}
