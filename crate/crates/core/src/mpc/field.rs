use serde::{Deserialize, Serialize};

use super::MpcError;

/// The Mersenne prime 2^61 - 1: fast reduction, ample headroom for ledger
/// sums.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

/// An element of GF(2^61 - 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn new(value: u64) -> Result<Self, MpcError> {
        if value >= FIELD_PRIME {
            return Err(MpcError::ValueOutsideField(value));
        }
        Ok(Self(value))
    }

    /// Reduce an arbitrary u64 into the field.
    pub fn from_u64(value: u64) -> Self {
        Self(value % FIELD_PRIME)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::ops::Add for FieldElement {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self((u128::from(self.0) + u128::from(other.0)).rem_euclid(u128::from(FIELD_PRIME)) as u64)
    }
}

impl std::ops::Sub for FieldElement {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self(
            (u128::from(self.0) + u128::from(FIELD_PRIME) - u128::from(other.0))
                .rem_euclid(u128::from(FIELD_PRIME)) as u64,
        )
    }
}

impl std::ops::Neg for FieldElement {
    type Output = Self;

    fn neg(self) -> Self {
        Self::ZERO - self
    }
}

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// Embed a signed minor-unit amount into the field: nonnegative values map
/// to themselves, negative values to p - |x|. Magnitudes must stay below
/// p/4 so sums of embedded values decode unambiguously.
pub fn encode_amount(minor_units: i64) -> Result<FieldElement, MpcError> {
    let magnitude = minor_units.unsigned_abs();
    if magnitude >= FIELD_PRIME / 4 {
        return Err(MpcError::MagnitudeTooLarge(minor_units));
    }
    if minor_units >= 0 {
        Ok(FieldElement(magnitude))
    } else {
        Ok(FieldElement(FIELD_PRIME - magnitude))
    }
}

/// Inverse of [`encode_amount`]: values above p/2 map back to negatives.
pub fn decode_amount(element: FieldElement) -> i64 {
    if element.0 > FIELD_PRIME / 2 {
        -((FIELD_PRIME - element.0) as i64)
    } else {
        element.0 as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_positive_embeds_identically() {
        assert_eq!(encode_amount(42).unwrap().value(), 42);
    }

    #[test]
    fn negative_one_is_p_minus_one() {
        assert_eq!(encode_amount(-1).unwrap().value(), FIELD_PRIME - 1);
    }

    #[test]
    fn roundtrip_over_random_range() {
        use rand::Rng;
        let mut rng = crate::analytics::derived_rng(5, 0);
        for _ in 0..10_000 {
            let x: i64 = rng.random_range(-(1 << 40)..(1 << 40));
            assert_eq!(decode_amount(encode_amount(x).unwrap()), x);
        }
    }

    #[test]
    fn magnitude_bound_enforced() {
        let too_big = (FIELD_PRIME / 4) as i64;
        assert!(matches!(
            encode_amount(too_big),
            Err(MpcError::MagnitudeTooLarge(_))
        ));
        assert!(encode_amount(too_big - 1).is_ok());
    }

    #[test]
    fn field_arithmetic_wraps() {
        let a = FieldElement::new(FIELD_PRIME - 1).unwrap();
        let b = FieldElement::new(5).unwrap();
        assert_eq!((a + b).value(), 4);
        assert_eq!((b - a).value(), 6);
        assert_eq!(FieldElement::new(FIELD_PRIME).unwrap_err().to_string(),
            format!("field value {FIELD_PRIME} outside [0, p)"));
    }
}
