//! Scenario inputs: base-station usage traces, user snapshots, the JSON
//! scenario configuration and seeded synthetic users.
//!
//! # Random streams
//!
//! Every random draw comes from `ChaCha8Rng::seed_from_u64` (crates `rand`
//! 0.8 / `rand_chacha` 0.3). A uniform `u` in `[0, 1)` is taken as
//! `(next_u64 >> 11) * 2^-53`. Per user, in this order:
//!
//! - [`generate_users`]: `x = u * X`, `y = u * Y`, palette index
//!   `floor(u * len)`.
//! - [`materialize_users`]: `r = cell_radius * sqrt(u)`, `phi = 2 pi u`,
//!   palette index `floor(u * len)`; the point `(x_B + r cos phi, y_B + r sin phi)`
//!   is clamped to the region. The stream is seeded with
//!   [`derive_seed`]`(seed, bs_id)`.
//! - [`generate_hotspots`]: `x = R + u (X - 2R)`, `y = R + u (Y - 2R)`.
//! - [`generate_hotspot_users`]: centre index `floor(u * len)`, then the
//!   three draws of [`materialize_users`] around that centre.

mod trace;
mod users;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::forecast::SmoothingParams;
use crate::geometry::{Norm, Point};
use crate::placement::{MaxDronesRule, Region};

pub use trace::{parse_trace, series_from_trace, write_trace};
pub use users::{derive_seed, generate_hotspot_users, generate_hotspots, generate_users, materialize_users, read_users, write_users};

/// One sample of a base-station usage trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsRecord {
    /// Epoch seconds.
    pub timestamp: i64,
    pub bs_id: u32,
    pub x_m: f64,
    pub y_m: f64,
    pub online_users: u64,
}

impl BsRecord {
    pub fn position(&self) -> Point {
        Point::new(self.x_m, self.y_m)
    }
}

/// Channel section of the config. Without an explicit `pl_threshold` the
/// threshold is calibrated to the region range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub a: f64,
    pub b: f64,
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub fc: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pl_threshold: Option<f64>,
    #[serde(default)]
    pub horizontal_norm: Norm,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let p = ChannelParams::default();
        ChannelConfig {
            a: p.s_curve_a,
            b: p.s_curve_b,
            eta_los: p.eta_los,
            eta_nlos: p.eta_nlos,
            fc: p.carrier_hz,
            h: p.altitude,
            pl_threshold: None,
            horizontal_norm: p.horizontal_norm,
        }
    }
}

impl ChannelConfig {
    pub fn resolve(&self, range: f64) -> ChannelParams {
        let p = ChannelParams {
            s_curve_a: self.a,
            s_curve_b: self.b,
            eta_los: self.eta_los,
            eta_nlos: self.eta_nlos,
            carrier_hz: self.fc,
            altitude: self.h,
            pl_threshold: f64::INFINITY,
            horizontal_norm: self.horizontal_norm,
        };
        match self.pl_threshold {
            Some(t) => ChannelParams { pl_threshold: t, ..p },
            None => p.calibrated_to(range),
        }
    }
}

fn default_capacity_palette() -> Vec<f64> {
    vec![10.0, 20.0, 30.0, 40.0]
}

fn default_bw_palette() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 1.5, 2.0]
}

fn default_capacity() -> f64 {
    40.0
}

fn default_alpha() -> f64 {
    0.9
}

fn default_max_iter() -> usize {
    32
}

fn default_move_norm() -> Norm {
    Norm::L2
}

/// Everything a pipeline run needs besides its input files.
///
/// `time_budget` has no default: the interval between planning epochs is a
/// property of the deployment and must be stated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub region: Region,
    #[serde(default)]
    pub channel: ChannelConfig,
    /// Per-DBS capacity used by `place` and `plan`, Mbit/s.
    #[serde(default = "default_capacity")]
    pub capacity_mbps: f64,
    /// Capacities swept by `report`, Mbit/s.
    #[serde(default = "default_capacity_palette")]
    pub capacity_palette: Vec<f64>,
    /// User bandwidth demands, Mbit/s, drawn uniformly.
    #[serde(default = "default_bw_palette")]
    pub bw_palette: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub max_drones_rule: MaxDronesRule,
    /// Drone speed, m/s.
    pub speed: f64,
    /// Time between planning epochs, s.
    pub time_budget: f64,
    #[serde(default = "default_move_norm")]
    pub move_norm: Norm,
    /// Radius of the disc predicted users are spread over; defaults to the
    /// region range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_radius: Option<f64>,
    #[serde(default)]
    pub smoothing: SmoothingParams,
}

impl ScenarioConfig {
    /// Config with every default and the given movement limits.
    pub fn new(speed: f64, time_budget: f64) -> Self {
        ScenarioConfig {
            region: Region::default(),
            channel: ChannelConfig::default(),
            capacity_mbps: default_capacity(),
            capacity_palette: default_capacity_palette(),
            bw_palette: default_bw_palette(),
            seed: 0,
            alpha: default_alpha(),
            max_iter: default_max_iter(),
            max_drones_rule: MaxDronesRule::default(),
            speed,
            time_budget,
            move_norm: default_move_norm(),
            cell_radius: None,
            smoothing: SmoothingParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::param("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
        self.channel_params().validate()?;
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("capacity_mbps", self.capacity_mbps)?;
        positive("speed", self.speed)?;
        positive("time_budget", self.time_budget)?;
        positive("cell_radius", self.cell_radius())?;
        for (name, palette) in [("capacity_palette", &self.capacity_palette), ("bw_palette", &self.bw_palette)] {
            if palette.is_empty() {
                return Err(Error::param(name, "must not be empty"));
            }
            for &v in palette {
                positive(name, v)?;
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be >= 1"));
        }
        self.smoothing.validate()
    }

    pub fn channel_params(&self) -> ChannelParams {
        self.channel.resolve(self.region.range)
    }

    pub fn cell_radius(&self) -> f64 {
        self.cell_radius.unwrap_or(self.region.range)
    }
}
