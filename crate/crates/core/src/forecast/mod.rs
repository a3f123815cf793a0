//! Per-base-station demand forecasting.
//!
//! [`decompose`] splits a usage series into trend-cycle, seasonal and
//! remainder components (additive model). The Holt-Winters smoother in
//! [`holt_winters`] forecasts the next samples with an additive seasonal
//! component; [`predict_counts`] turns those forecasts into user counts.

mod decompose;
pub mod holt_winters;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decompose::{decompose, DecompResult};
pub use holt_winters::{
    fit_params, fit_state, forecast_series, holdout_residuals, hw_forecast, hw_init, hw_step, predict_counts, HwState,
    ParamFit, SmoothingParams,
};

/// Chronological online-user counts of one base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageSeries {
    pub bs_id: u32,
    pub values: Vec<f64>,
    /// Samples per season.
    pub season_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<Vec<i64>>,
}

impl UsageSeries {
    pub fn new(bs_id: u32, values: Vec<f64>, season_length: usize) -> Self {
        UsageSeries {
            bs_id,
            values,
            season_length,
            timestamps: None,
        }
    }

    /// Checks the value invariants and that at least `seasons` full seasons
    /// are present.
    pub(crate) fn check(&self, seasons: usize) -> Result<()> {
        if self.season_length == 0 {
            return Err(Error::param("season_length", "must be >= 1"));
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param("values", format!("counts must be finite and >= 0, got {v}")));
        }
        let needed = seasons * self.season_length;
        if self.values.len() < needed {
            return Err(Error::SeriesTooShort {
                needed,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}
