//! Frequent-itemset mining (Apriori and ECLAT) and association-rule
//! generation over `field=value` item sets drawn from ledger records.
//!
//! Both miners share one contract: every itemset whose transaction count
//! reaches `ceil(min_support * |db|)` is reported with its exact count.
//! ECLAT computes the same mapping through vertical tid-list intersection,
//! which doubles as a cross-check in tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::{LedgerChain, TripleEntryRecord};

#[derive(Debug, Error, PartialEq)]
pub enum MiningError {
    #[error("min_support must lie in (0, 1], got {0}")]
    SupportOutOfRange(f64),
    #[error("min_confidence must lie in [0, 1], got {0}")]
    ConfidenceOutOfRange(f64),
    #[error("frequent mapping is not downward closed at {0:?}")]
    NotDownwardClosed(String),
}

/// Transactions as sets of categorical items (e.g. `location=NY`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionDb {
    pub transactions: Vec<BTreeSet<String>>,
}

impl TransactionDb {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Canonical `field=value` items for one record's metadata.
    pub fn record_items(record: &TripleEntryRecord) -> BTreeSet<String> {
        let meta = &record.third.metadata;
        let mut items = BTreeSet::new();
        items.insert(format!("party_from={}", meta.party_from));
        items.insert(format!("party_to={}", meta.party_to));
        if let Some(currency) = record.currency() {
            items.insert(format!("currency={currency}"));
        }
        if let Some(location) = &meta.location {
            items.insert(format!("location={location}"));
        }
        for tag in &meta.tags {
            items.insert(format!("tag={tag}"));
        }
        items
    }

    pub fn from_chain(chain: &LedgerChain) -> Self {
        Self {
            transactions: chain.records().iter().map(Self::record_items).collect(),
        }
    }
}

pub type ItemsetCounts = BTreeMap<Vec<String>, usize>;

/// An antecedent → consequent implication with its support, confidence,
/// and lift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

fn min_count(db_size: usize, min_support: f64) -> usize {
    (min_support * db_size as f64).ceil() as usize
}

fn validate_support(min_support: f64) -> Result<(), MiningError> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(MiningError::SupportOutOfRange(min_support));
    }
    Ok(())
}

/// Level-wise Apriori with prefix joins and downward-closure pruning.
pub fn frequent_itemsets_apriori(
    db: &TransactionDb,
    min_support: f64,
) -> Result<ItemsetCounts, MiningError> {
    validate_support(min_support)?;
    let threshold = min_count(db.len(), min_support).max(1);

    let mut frequent = ItemsetCounts::new();
    let mut singles: BTreeMap<&str, usize> = BTreeMap::new();
    for txn in &db.transactions {
        for item in txn {
            *singles.entry(item).or_insert(0) += 1;
        }
    }
    let mut level: Vec<Vec<String>> = Vec::new();
    for (item, count) in singles {
        if count >= threshold {
            frequent.insert(vec![item.to_string()], count);
            level.push(vec![item.to_string()]);
        }
    }

    while !level.is_empty() {
        let mut candidates: Vec<Vec<String>> = Vec::new();
        for i in 0..level.len() {
            for j in (i + 1)..level.len() {
                let (a, b) = (&level[i], &level[j]);
                if a[..a.len() - 1] != b[..b.len() - 1] {
                    continue;
                }
                let mut candidate = a.clone();
                candidate.push(b[b.len() - 1].clone());
                // Prune candidates with any infrequent (k-1)-subset.
                let all_subsets_frequent = (0..candidate.len()).all(|skip| {
                    let subset: Vec<String> = candidate
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| *idx != skip)
                        .map(|(_, item)| item.clone())
                        .collect();
                    frequent.contains_key(&subset)
                });
                if all_subsets_frequent {
                    candidates.push(candidate);
                }
            }
        }
        let mut next_level = Vec::new();
        for candidate in candidates {
            let count = db
                .transactions
                .iter()
                .filter(|txn| candidate.iter().all(|item| txn.contains(item)))
                .count();
            if count >= threshold {
                frequent.insert(candidate.clone(), count);
                next_level.push(candidate);
            }
        }
        level = next_level;
    }
    Ok(frequent)
}

/// ECLAT: depth-first extension of sorted item prefixes with tid-list
/// intersection. Produces the same mapping as Apriori.
pub fn frequent_itemsets_eclat(
    db: &TransactionDb,
    min_support: f64,
) -> Result<ItemsetCounts, MiningError> {
    validate_support(min_support)?;
    let threshold = min_count(db.len(), min_support).max(1);

    let mut tid_lists: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (tid, txn) in db.transactions.iter().enumerate() {
        for item in txn {
            tid_lists.entry(item).or_default().push(tid);
        }
    }
    let items: Vec<(&str, Vec<usize>)> = tid_lists
        .into_iter()
        .filter(|(_, tids)| tids.len() >= threshold)
        .collect();

    let mut frequent = ItemsetCounts::new();
    fn extend(
        prefix: &[String],
        prefix_tids: Option<&[usize]>,
        items: &[(&str, Vec<usize>)],
        start: usize,
        threshold: usize,
        frequent: &mut ItemsetCounts,
    ) {
        for i in start..items.len() {
            let (item, tids) = &items[i];
            let combined: Vec<usize> = match prefix_tids {
                None => tids.clone(),
                Some(prefix_tids) => intersect_sorted(prefix_tids, tids),
            };
            if combined.len() < threshold {
                continue;
            }
            let mut itemset = prefix.to_vec();
            itemset.push(item.to_string());
            frequent.insert(itemset.clone(), combined.len());
            extend(&itemset, Some(&combined), items, i + 1, threshold, frequent);
        }
    }
    extend(&[], None, &items, 0, threshold, &mut frequent);
    Ok(frequent)
}

/// Intersection of two ascending tid-lists.
pub fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Generate rules from a downward-closed frequent mapping: every non-empty
/// proper subset of each itemset of size >= 2 becomes an antecedent.
///
/// Output is deterministically ordered by support descending, then
/// lexicographic antecedent and consequent.
pub fn generate_rules(
    frequent: &ItemsetCounts,
    db_size: usize,
    min_confidence: f64,
) -> Result<Vec<AssociationRule>, MiningError> {
    if !(0.0..=1.0).contains(&min_confidence) {
        return Err(MiningError::ConfidenceOutOfRange(min_confidence));
    }
    // Downward closure check over immediate subsets.
    for (itemset, &count) in frequent {
        if itemset.len() < 2 {
            continue;
        }
        for skip in 0..itemset.len() {
            let subset: Vec<String> = itemset
                .iter()
                .enumerate()
                .filter(|(idx, _)| *idx != skip)
                .map(|(_, item)| item.clone())
                .collect();
            match frequent.get(&subset) {
                Some(&subset_count) if subset_count >= count => {}
                _ => return Err(MiningError::NotDownwardClosed(itemset.join(","))),
            }
        }
    }

    let mut rules = Vec::new();
    for (itemset, &count) in frequent {
        let size = itemset.len();
        if size < 2 {
            continue;
        }
        // Bitmask enumeration of non-empty proper subsets as antecedents.
        for mask in 1..((1usize << size) - 1) {
            let mut antecedent = Vec::new();
            let mut consequent = Vec::new();
            for (bit, item) in itemset.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    antecedent.push(item.clone());
                } else {
                    consequent.push(item.clone());
                }
            }
            let antecedent_count = frequent[&antecedent];
            let consequent_count = frequent[&consequent];
            let confidence = count as f64 / antecedent_count as f64;
            if confidence < min_confidence {
                continue;
            }
            let support = count as f64 / db_size as f64;
            let lift = confidence / (consequent_count as f64 / db_size as f64);
            rules.push(AssociationRule {
                antecedent,
                consequent,
                support,
                confidence,
                lift,
            });
        }
    }
    rules.sort_by(|a, b| {
        b.support
            .total_cmp(&a.support)
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(rules)
}
