use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::UsageSeries;

/// Additive decomposition `Y = T + S + E`.
///
/// `None` marks the ends of the series where the centred moving average is
/// undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompResult {
    pub trend_cycle: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<Option<f64>>,
    /// Seasonally adjusted series `Y - S`.
    pub adjusted: Vec<f64>,
    /// One seasonal index per phase; `seasonal[t] = indices[t % s]`.
    pub seasonal_indices: Vec<f64>,
}

/// Centred moving average of window `s`; even windows use the 2 x s average
/// (half weights on the two outermost samples).
fn centred_moving_average(y: &[f64], s: usize) -> Vec<Option<f64>> {
    let half = s / 2;
    let mut out = vec![None; y.len()];
    if y.len() < 2 * half + 1 {
        return out;
    }
    for t in half..y.len() - half {
        let v = if s % 2 == 1 {
            y[t - half..=t + half].iter().sum::<f64>()
        } else {
            0.5 * y[t - half] + y[t - half + 1..t + half].iter().sum::<f64>() + 0.5 * y[t + half]
        };
        out[t] = Some(v / s as f64);
    }
    out
}

/// Classical additive decomposition: trend-cycle by centred moving average,
/// seasonal index per phase as the mean of the detrended values of that
/// phase, remainder `Y - T - S`.
pub fn decompose(series: &UsageSeries) -> Result<DecompResult> {
    series.check(2)?;
    let y = &series.values;
    let s = series.season_length;
    let trend_cycle = centred_moving_average(y, s);

    let mut sums = vec![0.0; s];
    let mut counts = vec![0usize; s];
    for (t, trend) in trend_cycle.iter().enumerate() {
        if let Some(tr) = trend {
            sums[t % s] += y[t] - tr;
            counts[t % s] += 1;
        }
    }
    let seasonal_indices: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&sum, &n)| if n == 0 { 0.0 } else { sum / n as f64 })
        .collect();

    let seasonal: Vec<f64> = (0..y.len()).map(|t| seasonal_indices[t % s]).collect();
    let remainder = trend_cycle
        .iter()
        .zip(y)
        .zip(&seasonal)
        .map(|((tr, &v), &sv)| tr.map(|tr| v - tr - sv))
        .collect();
    let adjusted = y.iter().zip(&seasonal).map(|(v, sv)| v - sv).collect();
    Ok(DecompResult {
        trend_cycle,
        seasonal,
        remainder,
        adjusted,
        seasonal_indices,
    })
}
