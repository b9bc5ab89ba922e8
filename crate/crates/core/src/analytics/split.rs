use rand::seq::SliceRandom;

use super::{derived_rng, AnalyticsError};

/// Seeded shuffle-then-split returning `(train_indices, test_indices)`.
///
/// The two index sets partition `0..n` exactly: no row is lost or
/// duplicated. Test size is `round(n * test_fraction)`.
pub fn train_test_split(
    n: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), AnalyticsError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(AnalyticsError::FractionOutOfRange);
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = derived_rng(seed, 0);
    indices.shuffle(&mut rng);
    let test_n = (n as f64 * test_fraction).round() as usize;
    let test = indices[..test_n].to_vec();
    let train = indices[test_n..].to_vec();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_rows_at_point_three_gives_seven_three() {
        let (train, test) = train_test_split(10, 0.3, 1).unwrap();
        assert_eq!(train.len(), 7);
        assert_eq!(test.len(), 3);
    }

    #[test]
    fn same_seed_same_partition() {
        assert_eq!(
            train_test_split(50, 0.25, 9).unwrap(),
            train_test_split(50, 0.25, 9).unwrap()
        );
    }

    #[test]
    fn union_is_exact_partition() {
        let (train, test) = train_test_split(23, 0.4, 3).unwrap();
        let mut all: Vec<usize> = train.into_iter().chain(test).collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn fraction_bounds_enforced() {
        assert_eq!(
            train_test_split(10, 0.0, 0).unwrap_err(),
            AnalyticsError::FractionOutOfRange
        );
        assert_eq!(
            train_test_split(10, 1.0, 0).unwrap_err(),
            AnalyticsError::FractionOutOfRange
        );
    }
}
