//! Additive Holt-Winters smoothing.
//!
//! ```text
//! L_t = alpha (Y_t - S_{t-s}) + (1 - alpha)(L_{t-1} + b_{t-1})
//! b_t = beta (L_t - L_{t-1}) + (1 - beta) b_{t-1}
//! S_t = gamma (Y_t - L_t) + (1 - gamma) S_{t-s}
//! F_{t+m} = L_t + m b_t + S_{t-s+m}
//! ```
//!
//! The state is initialised from the first two seasons: the level is the
//! mean of the first season, the trend is the mean per-sample change between
//! the two seasons, and the seasonal indices are the first-season deviations
//! from the level. Seasonal indices are not renormalised.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::UsageSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        SmoothingParams {
            alpha: 0.2,
            beta: 0.1,
            gamma: 0.1,
        }
    }
}

impl SmoothingParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = SmoothingParams { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Smoother state after the most recent observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwState {
    pub level: f64,
    pub trend: f64,
    /// The last `s` seasonal indices, oldest first: `S_{t-s+1} .. S_t`.
    pub seasonals: VecDeque<f64>,
    pub params: SmoothingParams,
}

impl HwState {
    pub fn season_length(&self) -> usize {
        self.seasonals.len()
    }

    /// One-step-ahead forecast `F_{t+1}`.
    pub fn next_forecast(&self) -> f64 {
        self.level + self.trend + self.seasonals[0]
    }

    pub fn step(&mut self, y: f64) {
        let SmoothingParams { alpha, beta, gamma } = self.params;
        let old_seasonal = self
            .seasonals
            .pop_front()
            .expect("seasonal ring holds one value per phase");
        let level = alpha * (y - old_seasonal) + (1.0 - alpha) * (self.level + self.trend);
        let trend = beta * (level - self.level) + (1.0 - beta) * self.trend;
        let seasonal = gamma * (y - level) + (1.0 - gamma) * old_seasonal;
        self.level = level;
        self.trend = trend;
        self.seasonals.push_back(seasonal);
    }

    /// Forecasts for horizons `1..=m`.
    pub fn forecast(&self, m: usize) -> Vec<f64> {
        let s = self.season_length();
        (1..=m)
            .map(|h| self.level + self.trend * h as f64 + self.seasonals[(h - 1) % s])
            .collect()
    }
}

fn init_from(values: &[f64], s: usize, params: SmoothingParams) -> HwState {
    let sf = s as f64;
    let level = values[..s].iter().sum::<f64>() / sf;
    let trend = (0..s).map(|k| (values[s + k] - values[k]) / sf).sum::<f64>() / sf;
    let seasonals = values[..s].iter().map(|y| y - level).collect();
    HwState {
        level,
        trend,
        seasonals,
        params,
    }
}

/// Initial state at time `s` with the default smoothing parameters.
pub fn hw_init(series: &UsageSeries) -> Result<HwState> {
    series.check(2)?;
    Ok(init_from(&series.values, series.season_length, SmoothingParams::default()))
}

pub fn hw_step(state: &HwState, y: f64) -> HwState {
    let mut next = state.clone();
    next.step(y);
    next
}

pub fn hw_forecast(state: &HwState, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::param("m", "horizon must be >= 1"));
    }
    Ok(state.forecast(m))
}

/// State after smoothing the whole series (steps over samples `s+1..n`).
pub fn fit_state(series: &UsageSeries, params: SmoothingParams) -> Result<HwState> {
    series.check(2)?;
    params.validate()?;
    let s = series.season_length;
    let mut state = init_from(&series.values, s, params);
    for &y in &series.values[s..] {
        state.step(y);
    }
    Ok(state)
}

/// Raw forecasts for horizons `1..=m` after smoothing the whole series.
pub fn forecast_series(series: &UsageSeries, params: SmoothingParams, m: usize) -> Result<Vec<f64>> {
    hw_forecast(&fit_state(series, params)?, m)
}

/// Forecast user counts: raw forecasts rounded to the nearest integer and
/// clamped at zero.
pub fn predict_counts(series: &UsageSeries, params: SmoothingParams, m: usize) -> Result<Vec<u64>> {
    Ok(forecast_series(series, params, m)?
        .into_iter()
        .map(|f| f.round().max(0.0) as u64)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamFit {
    pub params: SmoothingParams,
    /// One-step-ahead sum of squared errors over the training span.
    pub sse: f64,
}

/// Number of grid points per axis in [`fit_params`] (step 0.05).
const GRID_STEPS: usize = 20;

fn one_step_sse(values: &[f64], s: usize, params: SmoothingParams) -> f64 {
    let mut state = init_from(values, s, params);
    let mut sse = 0.0;
    for &y in &values[s..] {
        let e = y - state.next_forecast();
        sse += e * e;
        state.step(y);
    }
    sse
}

/// Grid search over `{0, 0.05, ..., 1}^3` minimising the one-step-ahead SSE
/// on all but the last season, which is held out. Ties keep the smallest
/// `(alpha, beta, gamma)` in lexicographic order.
pub fn fit_params(series: &UsageSeries) -> Result<ParamFit> {
    series.check(3)?;
    let s = series.season_length;
    let train = &series.values[..series.values.len() - s];
    let grid = |k: usize| k as f64 / GRID_STEPS as f64;
    let mut best: Option<ParamFit> = None;
    for a in 0..=GRID_STEPS {
        for b in 0..=GRID_STEPS {
            for g in 0..=GRID_STEPS {
                let params = SmoothingParams {
                    alpha: grid(a),
                    beta: grid(b),
                    gamma: grid(g),
                };
                let sse = one_step_sse(train, s, params);
                if best.is_none_or(|f| sse < f.sse) {
                    best = Some(ParamFit { params, sse });
                }
            }
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Residuals `actual - forecast` on the held-out last season, forecasting
/// horizons `1..=s` from the end of the training span.
pub fn holdout_residuals(series: &UsageSeries, params: SmoothingParams) -> Result<Vec<f64>> {
    series.check(3)?;
    let s = series.season_length;
    let split = series.values.len() - s;
    let train = UsageSeries {
        values: series.values[..split].to_vec(),
        timestamps: None,
        ..series.clone()
    };
    let forecast = forecast_series(&train, params, s)?;
    Ok(series.values[split..]
        .iter()
        .zip(forecast)
        .map(|(y, f)| y - f)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize, s: usize) -> UsageSeries {
        UsageSeries::new(0, (1..=n).map(|t| t as f64).collect(), s)
    }

    #[test]
    fn constant_series_init() {
        let st = hw_init(&UsageSeries::new(0, vec![3.5; 14], 7)).unwrap();
        assert_eq!(st.level, 3.5);
        assert_eq!(st.trend, 0.0);
        assert!(st.seasonals.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn linear_series_init() {
        let st = hw_init(&linear(8, 4)).unwrap();
        assert_eq!(st.level, 2.5);
        assert_eq!(st.trend, 1.0);
        assert_eq!(st.seasonals, [-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn init_needs_two_seasons() {
        assert!(matches!(
            hw_init(&linear(7, 4)),
            Err(Error::SeriesTooShort { needed: 8, got: 7 })
        ));
    }

    #[test]
    fn zero_weights_only_drift() {
        let mut st = hw_init(&linear(8, 4)).unwrap();
        st.params = SmoothingParams::new(0.0, 0.0, 0.0).unwrap();
        let next = hw_step(&st, 123.0);
        assert_eq!(next.level, st.level + st.trend);
        assert_eq!(next.trend, st.trend);
        assert_eq!(next.seasonals, [-0.5, 0.5, 1.5, -1.5]);
    }

    #[test]
    fn unit_alpha_tracks_deseasonalised_observation() {
        let mut st = hw_init(&linear(8, 4)).unwrap();
        st.params = SmoothingParams::new(1.0, 0.0, 0.0).unwrap();
        let next = hw_step(&st, 9.0);
        assert_eq!(next.level, 9.0 - (-1.5));
    }

    #[test]
    fn three_step_hand_trace() {
        // traced step by step from L=2.5, b=1, S=(-1.5,-0.5,0.5,1.5)
        let mut st = hw_init(&linear(8, 4)).unwrap();
        st.params = SmoothingParams::new(0.2, 0.1, 0.1).unwrap();
        let expected = [
            (4.1000000000000005, 1.06, [-0.5, 0.5, 1.5, -1.2600000000000002]),
            (5.428, 1.0868, [0.5, 1.5, -1.2600000000000002, -0.3928]),
            (6.51184, 1.0865040000000001, [1.5, -1.2600000000000002, -0.3928, 0.498816]),
        ];
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
        for (y, (level, trend, seas)) in [5.0, 6.0, 7.0].into_iter().zip(expected) {
            st = hw_step(&st, y);
            assert!(rel(st.level, level));
            assert!(rel(st.trend, trend));
            for (a, b) in st.seasonals.iter().zip(seas) {
                assert!(rel(*a, b));
            }
        }
        let f = hw_forecast(&st, 5).unwrap();
        let want = [9.098344, 7.424848000000001, 9.378552, 11.356672000000001, 13.44436];
        for (a, b) in f.iter().zip(want) {
            assert!(rel(*a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn flat_state_forecasts_level() {
        let st = HwState {
            level: 4.0,
            trend: 0.0,
            seasonals: VecDeque::from(vec![0.0; 3]),
            params: SmoothingParams::default(),
        };
        assert_eq!(hw_forecast(&st, 5).unwrap(), vec![4.0; 5]);
        assert!(hw_forecast(&st, 0).is_err());
    }

    #[test]
    fn horizon_wraps_seasonal_ring() {
        let st = HwState {
            level: 0.0,
            trend: 0.0,
            seasonals: VecDeque::from(vec![1.0, 2.0, 3.0]),
            params: SmoothingParams::default(),
        };
        let f = st.forecast(7);
        assert_eq!(f, vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0]);
    }

    #[test]
    fn constant_prediction() {
        let counts = predict_counts(&UsageSeries::new(0, vec![7.0; 21], 7), SmoothingParams::default(), 3).unwrap();
        assert_eq!(counts, vec![7, 7, 7]);
    }

    #[test]
    fn negative_forecast_clamps_to_zero() {
        // falling series whose next forecast is below zero
        let series = UsageSeries::new(0, vec![12.0, 12.0, 8.0, 8.0, 4.0, 4.0, 1.0, 1.0], 2);
        let raw = forecast_series(&series, SmoothingParams::default(), 3).unwrap();
        assert!(raw.iter().any(|&f| f < -0.5), "{raw:?}");
        let counts = predict_counts(&series, SmoothingParams::default(), 3).unwrap();
        for (c, f) in counts.iter().zip(&raw) {
            assert_eq!(*c, f.round().max(0.0) as u64);
        }
        assert!(counts.contains(&0));
    }

    #[test]
    fn constant_series_fits_zero_params() {
        let fit = fit_params(&UsageSeries::new(0, vec![5.0; 21], 7)).unwrap();
        assert_eq!(fit.sse, 0.0);
        assert_eq!(fit.params, SmoothingParams::new(0.0, 0.0, 0.0).unwrap());
    }

    #[test]
    fn fit_needs_held_out_season() {
        assert!(fit_params(&UsageSeries::new(0, vec![5.0; 20], 7)).is_err());
    }
}
