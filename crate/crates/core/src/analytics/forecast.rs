use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub slope: f64,
    pub intercept: f64,
    pub prediction: f64,
    pub horizon: f64,
}

/// Closed-form least squares over (t, value) pairs, extrapolated to the
/// requested horizon.
pub fn linear_forecast(series: &[(f64, f64)], horizon: f64) -> Result<Forecast, AnalyticsError> {
    let distinct_t = {
        let mut ts: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts.len()
    };
    if distinct_t < 2 {
        return Err(AnalyticsError::DegenerateTimeAxis);
    }
    let n = series.len() as f64;
    let mean_t = series.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_v = series.iter().map(|(_, v)| v).sum::<f64>() / n;
    let covariance: f64 = series
        .iter()
        .map(|(t, v)| (t - mean_t) * (v - mean_v))
        .sum();
    let variance: f64 = series.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
    let slope = covariance / variance;
    let intercept = mean_v - slope * mean_t;
    Ok(Forecast {
        slope,
        intercept,
        prediction: slope * horizon + intercept,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let series: Vec<(f64, f64)> = (0..5).map(|t| (t as f64, 2.0 * t as f64 + 1.0)).collect();
        let f = linear_forecast(&series, 10.0).unwrap();
        assert_eq!(f.slope, 2.0);
        assert_eq!(f.intercept, 1.0);
        assert_eq!(f.prediction, 21.0);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let series = vec![(0.0, 7.0), (1.0, 7.0), (2.0, 7.0)];
        let f = linear_forecast(&series, 100.0).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.prediction, 7.0);
    }

    #[test]
    fn degenerate_time_axis_rejected() {
        let series = vec![(1.0, 2.0), (1.0, 3.0)];
        assert_eq!(
            linear_forecast(&series, 2.0).unwrap_err(),
            AnalyticsError::DegenerateTimeAxis
        );
    }
}
