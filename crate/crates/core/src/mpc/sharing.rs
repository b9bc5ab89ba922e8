use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{FieldElement, FIELD_PRIME};
use super::MpcError;
use crate::analytics::derived_rng;

/// One party's additive share of a secret within a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretShare {
    pub party_id: usize,
    pub party_count: usize,
    pub session_id: String,
    pub value: FieldElement,
}

pub(crate) fn share_with_rng(
    secret: FieldElement,
    parties: usize,
    session_id: &str,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<SecretShare>, MpcError> {
    if parties < 2 {
        return Err(MpcError::TooFewParties(parties));
    }
    let mut shares = Vec::with_capacity(parties);
    let mut running = FieldElement::ZERO;
    for party_id in 0..parties - 1 {
        let value = FieldElement::from_u64(rng.random_range(0..FIELD_PRIME));
        running = running + value;
        shares.push(SecretShare {
            party_id,
            party_count: parties,
            session_id: session_id.to_string(),
            value,
        });
    }
    shares.push(SecretShare {
        party_id: parties - 1,
        party_count: parties,
        session_id: session_id.to_string(),
        value: secret - running,
    });
    Ok(shares)
}

/// Split a secret into uniformly random summands; only the complete set
/// reconstructs it. Deterministic given the seed.
pub fn share_secret(
    secret: FieldElement,
    parties: usize,
    session_id: &str,
    seed: u64,
) -> Result<Vec<SecretShare>, MpcError> {
    let mut rng = derived_rng(seed, 0);
    share_with_rng(secret, parties, session_id, &mut rng)
}

/// Open a secret from a complete share set of one session.
pub fn reconstruct_secret(shares: &[SecretShare]) -> Result<FieldElement, MpcError> {
    let Some(first) = shares.first() else {
        return Err(MpcError::IncompleteShareSet { expected: 1, got: 0 });
    };
    for share in shares {
        if share.session_id != first.session_id {
            return Err(MpcError::MixedSessions(
                first.session_id.clone(),
                share.session_id.clone(),
            ));
        }
    }
    let expected = first.party_count;
    let mut seen = vec![false; expected];
    for share in shares {
        if share.party_count != expected
            || share.party_id >= expected
            || std::mem::replace(&mut seen[share.party_id], true)
        {
            return Err(MpcError::IncompleteShareSet {
                expected,
                got: shares.len(),
            });
        }
    }
    if shares.len() != expected {
        return Err(MpcError::IncompleteShareSet {
            expected,
            got: shares.len(),
        });
    }
    Ok(shares.iter().map(|s| s.value).sum())
}

/// Securely sum per-party input lists.
///
/// Message sequence (simulated in-process, parties ordered by name):
/// 1. each party locally sums its own inputs;
/// 2. each party splits its local sum into one share per participant,
///    drawing randomness from its own `(seed, party_index)` stream;
/// 3. share `j` of every party is delivered to party `j`, which adds the
///    received shares componentwise;
/// 4. the aggregate shares alone are combined to open the joint sum.
///
/// No per-party local sum is ever opened.
pub fn secure_sum(
    per_party_inputs: &BTreeMap<String, Vec<FieldElement>>,
    session_id: &str,
    seed: u64,
) -> Result<FieldElement, MpcError> {
    let parties = per_party_inputs.len();
    if parties < 2 {
        return Err(MpcError::TooFewParties(parties));
    }
    // Round 1-2: local sums, shared per party.
    let mut outgoing: Vec<Vec<SecretShare>> = Vec::with_capacity(parties);
    for (index, inputs) in per_party_inputs.values().enumerate() {
        let local_sum: FieldElement = inputs.iter().copied().sum();
        let mut rng = derived_rng(seed, index as u64);
        outgoing.push(share_with_rng(local_sum, parties, session_id, &mut rng)?);
    }
    // Round 3: delivery and componentwise addition.
    let aggregate_shares: Vec<SecretShare> = (0..parties)
        .map(|receiver| {
            let value = outgoing
                .iter()
                .map(|shares| shares[receiver].value)
                .sum();
            SecretShare {
                party_id: receiver,
                party_count: parties,
                session_id: session_id.to_string(),
                value,
            }
        })
        .collect();
    // Round 4: open the aggregate only.
    reconstruct_secret(&aggregate_shares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpc::{decode_amount, encode_amount};

    #[test]
    fn forced_first_share_fixes_second() {
        // With x = 42 and the first share being s, the second must be 42 - s.
        let shares = share_secret(FieldElement::new(42).unwrap(), 2, "s", 1).unwrap();
        let expected = FieldElement::new(42).unwrap() - shares[0].value;
        assert_eq!(shares[1].value, expected);
    }

    #[test]
    fn shares_sum_to_secret_for_any_party_count() {
        for n in 2..8 {
            let secret = FieldElement::new(123_456_789).unwrap();
            let shares = share_secret(secret, n, "s", n as u64).unwrap();
            let total: FieldElement = shares.iter().map(|s| s.value).sum();
            assert_eq!(total, secret);
        }
    }

    #[test]
    fn reconstruct_roundtrip_random_secrets() {
        use rand::Rng;
        let mut rng = crate::analytics::derived_rng(99, 0);
        for i in 0..10_000 {
            let secret = FieldElement::from_u64(rng.random());
            let shares = share_secret(secret, 3, "session", i).unwrap();
            assert_eq!(reconstruct_secret(&shares).unwrap(), secret);
        }
    }

    #[test]
    fn shares_of_zero_reconstruct_to_zero() {
        let shares = share_secret(FieldElement::ZERO, 4, "s", 7).unwrap();
        assert_eq!(reconstruct_secret(&shares).unwrap(), FieldElement::ZERO);
    }

    #[test]
    fn missing_share_detected() {
        let shares = share_secret(FieldElement::new(5).unwrap(), 3, "s", 0).unwrap();
        let err = reconstruct_secret(&shares[..2]).unwrap_err();
        assert!(matches!(err, MpcError::IncompleteShareSet { expected: 3, got: 2 }));
    }

    #[test]
    fn mixed_sessions_detected() {
        let mut shares = share_secret(FieldElement::new(5).unwrap(), 2, "a", 0).unwrap();
        shares[1].session_id = "b".into();
        assert!(matches!(
            reconstruct_secret(&shares).unwrap_err(),
            MpcError::MixedSessions(_, _)
        ));
    }

    #[test]
    fn secure_sum_small_example() {
        let mut inputs = BTreeMap::new();
        inputs.insert("alice".to_string(), vec![encode_amount(100).unwrap()]);
        inputs.insert("bob".to_string(), vec![encode_amount(250).unwrap()]);
        let joint = secure_sum(&inputs, "s", 42).unwrap();
        assert_eq!(decode_amount(joint), 350);
    }

    #[test]
    fn secure_sum_matches_plaintext_oracle() {
        use rand::Rng;
        let mut rng = crate::analytics::derived_rng(3, 1);
        for trial in 0..200 {
            let parties = rng.random_range(3..=5);
            let mut inputs = BTreeMap::new();
            let mut plain: i64 = 0;
            for p in 0..parties {
                let values: Vec<i64> = (0..rng.random_range(1..4))
                    .map(|_| rng.random_range(-1_000_000..1_000_000))
                    .collect();
                plain += values.iter().sum::<i64>();
                inputs.insert(
                    format!("party{p}"),
                    values.iter().map(|&v| encode_amount(v).unwrap()).collect(),
                );
            }
            let joint = secure_sum(&inputs, "s", trial).unwrap();
            assert_eq!(decode_amount(joint), plain);
        }
    }

    #[test]
    fn empty_party_set_rejected() {
        let inputs: BTreeMap<String, Vec<FieldElement>> = BTreeMap::new();
        assert!(matches!(
            secure_sum(&inputs, "s", 0).unwrap_err(),
            MpcError::TooFewParties(0)
        ));
    }

    #[test]
    fn nonfinal_share_low_bits_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        // 10^5 sharings of a fixed secret; each non-final share's low 16
        // bits, binned into 1024 cells, must pass chi-square at alpha 0.001.
        let secret = FieldElement::new(987_654_321).unwrap();
        let bins = 1024usize;
        let samples = 100_000usize;
        let critical = ChiSquared::new((bins - 1) as f64)
            .unwrap()
            .inverse_cdf(0.999);
        for share_index in 0..2 {
            let mut counts = vec![0u64; bins];
            for i in 0..samples {
                let shares = share_secret(secret, 3, "u", i as u64).unwrap();
                let low16 = (shares[share_index].value.value() & 0xFFFF) as usize;
                counts[low16 >> 6] += 1;
            }
            let expected = samples as f64 / bins as f64;
            let statistic: f64 = counts
                .iter()
                .map(|&c| {
                    let d = c as f64 - expected;
                    d * d / expected
                })
                .sum();
            assert!(
                statistic < critical,
                "share {share_index}: chi2 {statistic} >= {critical}"
            );
        }
    }
}
