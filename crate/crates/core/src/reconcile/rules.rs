use serde::{Deserialize, Serialize};

use super::ReconcileError;
use crate::ledger::{
    balance_check, ContextMetadata, EntryLeg, LedgerChain, TripleEntryRecord,
};

/// Metadata fields a settlement condition may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataField {
    PartyFrom,
    PartyTo,
    Location,
    ItemDescription,
    Rationale,
}

/// One clause of a settlement condition; a rule's condition is the
/// conjunction of its clauses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    TagPresent { tag: String },
    FieldEquals { field: MetadataField, value: String },
}

impl Condition {
    fn matches(&self, metadata: &ContextMetadata) -> bool {
        match self {
            Condition::TagPresent { tag } => metadata.tags.contains(tag),
            Condition::FieldEquals { field, value } => match field {
                MetadataField::PartyFrom => metadata.party_from == *value,
                MetadataField::PartyTo => metadata.party_to == *value,
                MetadataField::Location => metadata.location.as_deref() == Some(value),
                MetadataField::ItemDescription => {
                    metadata.item_description.as_deref() == Some(value)
                }
                MetadataField::Rationale => metadata.rationale.as_deref() == Some(value),
            },
        }
    }
}

/// Amount of a templated settlement leg.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmountExpr {
    Fixed { minor_units: i64 },
    /// The trigger record's total debit amount.
    TriggerTotal,
}

impl AmountExpr {
    fn evaluate(&self, trigger_total: i64) -> i64 {
        match self {
            AmountExpr::Fixed { minor_units } => *minor_units,
            AmountExpr::TriggerTotal => trigger_total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegTemplate {
    pub account: String,
    pub amount: AmountExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettlementTemplate {
    pub debits: Vec<LegTemplate>,
    pub credits: Vec<LegTemplate>,
}

/// A conditional settlement: when a ledger record's metadata satisfies every
/// condition clause, a balanced settlement record is generated from the
/// action template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettlementRule {
    pub rule_id: String,
    pub condition: Vec<Condition>,
    pub action: SettlementTemplate,
}

fn marker_tag(rule_id: &str, trigger_key: &str) -> String {
    format!("settles:{rule_id}:{trigger_key}")
}

fn build_settlement(
    rule: &SettlementRule,
    trigger: &TripleEntryRecord,
) -> Result<TripleEntryRecord, ReconcileError> {
    let trigger_total = trigger.total_debits();
    let currency = trigger.currency().unwrap_or("USD");
    let legs = |templates: &[LegTemplate]| -> Vec<EntryLeg> {
        templates
            .iter()
            .map(|t| EntryLeg::new(&t.account, t.amount.evaluate(trigger_total), currency))
            .collect()
    };
    let trigger_key = &trigger.third.reference_key;
    // Settlement flows back against the trigger's party direction: the
    // obligated recipient pays the originator.
    let mut metadata = ContextMetadata::new(
        &trigger.third.metadata.party_to,
        &trigger.third.metadata.party_from,
        trigger.third.metadata.occurred_at,
    );
    metadata.tags.insert("settlement".into());
    metadata.tags.insert(marker_tag(&rule.rule_id, trigger_key));
    metadata.rationale = Some(format!(
        "rule {} triggered by {trigger_key}",
        rule.rule_id
    ));
    let record = TripleEntryRecord::draft(
        &format!("settle:{}:{trigger_key}", rule.rule_id),
        legs(&rule.action.debits),
        legs(&rule.action.credits),
        metadata,
    );
    match balance_check(&record) {
        Ok(report) if !report.balanced => Err(ReconcileError::RuleTemplateUnbalanced {
            rule_id: rule.rule_id.clone(),
        }),
        Ok(_) => record
            .validate()
            .map_err(|e| ReconcileError::InvalidTemplate {
                rule_id: rule.rule_id.clone(),
                reason: e.to_string(),
            })
            .map(|()| record),
        Err(e) => Err(ReconcileError::InvalidTemplate {
            rule_id: rule.rule_id.clone(),
            reason: e.to_string(),
        }),
    }
}

/// Evaluate settlement rules over a chain, emitting one balanced settlement
/// draft per (rule, trigger) pair not yet settled on-chain.
///
/// Idempotence is enforced through a marker tag carrying the rule id and
/// trigger reference key: once the emitted record is appended, re-running
/// the evaluation emits nothing. Settlement records themselves are never
/// treated as triggers.
pub fn evaluate_settlement_rules(
    chain: &LedgerChain,
    rules: &[SettlementRule],
) -> Result<Vec<TripleEntryRecord>, ReconcileError> {
    let settled: std::collections::BTreeSet<&str> = chain
        .records()
        .iter()
        .flat_map(|r| r.third.metadata.tags.iter())
        .filter(|t| t.starts_with("settles:"))
        .map(String::as_str)
        .collect();

    let mut emitted = Vec::new();
    for record in chain.records() {
        if record.third.metadata.tags.contains("settlement") {
            continue;
        }
        for rule in rules {
            if !rule.condition.iter().all(|c| c.matches(&record.third.metadata)) {
                continue;
            }
            let marker = marker_tag(&rule.rule_id, &record.third.reference_key);
            if settled.contains(marker.as_str()) {
                continue;
            }
            emitted.push(build_settlement(rule, record)?);
        }
    }
    Ok(emitted)
}
