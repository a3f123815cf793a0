//! Probabilistic air-to-ground channel.
//!
//! The line-of-sight probability is an S-curve in the elevation angle
//! (in degrees):
//!
//! ```text
//! P(LoS)  = 1 / (1 + a * exp(-b * (theta_deg - a)))
//! P(NLoS) = 1 - P(LoS)
//! PL      = 20 log10(4 pi fc d / c) + P(LoS) eta_los + P(NLoS) eta_nlos
//! ```
//!
//! with `d = sqrt(h^2 + r^2)` the slant distance. A user is covered by a
//! drone when the mean path loss does not exceed `pl_threshold`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Norm, Point};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Environment constants of the air-to-ground model.
///
/// The defaults are common urban values from the air-to-ground literature,
/// not measured ground truth; every field is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// S-curve offset parameter (dimensionless).
    #[serde(rename = "a")]
    pub s_curve_a: f64,
    /// S-curve steepness parameter (dimensionless).
    #[serde(rename = "b")]
    pub s_curve_b: f64,
    /// Mean excess loss under line of sight, dB.
    pub eta_los: f64,
    /// Mean excess loss without line of sight, dB.
    pub eta_nlos: f64,
    /// Carrier frequency, Hz.
    #[serde(rename = "fc")]
    pub carrier_hz: f64,
    /// Drone altitude, m.
    #[serde(rename = "h")]
    pub altitude: f64,
    /// Largest admissible path loss, dB.
    pub pl_threshold: f64,
    #[serde(default)]
    pub horizontal_norm: Norm,
}

impl Default for ChannelParams {
    /// Urban defaults at 100 m altitude, with the threshold calibrated so
    /// the coverage boundary sits at 50 m horizontal distance.
    fn default() -> Self {
        ChannelParams {
            s_curve_a: 9.61,
            s_curve_b: 0.16,
            eta_los: 1.0,
            eta_nlos: 20.0,
            carrier_hz: 2e9,
            altitude: 100.0,
            pl_threshold: f64::INFINITY,
            horizontal_norm: Norm::L1,
        }
        .calibrated_to(50.0)
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.s_curve_a),
            ("b", self.s_curve_b),
            ("fc", self.carrier_hz),
            ("h", self.altitude),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.eta_los.is_finite() && self.eta_los >= 0.0) {
            return Err(Error::param("eta_los", "must be finite and >= 0"));
        }
        if !(self.eta_nlos.is_finite() && self.eta_nlos >= self.eta_los) {
            return Err(Error::param("eta_nlos", "must be finite and >= eta_los"));
        }
        if self.pl_threshold.is_nan() {
            return Err(Error::param("pl_threshold", "must not be NaN"));
        }
        Ok(())
    }

    /// Returns a copy whose threshold equals the path loss at `range`, so the
    /// coverage boundary lies exactly at that horizontal distance.
    pub fn calibrated_to(mut self, range: f64) -> Self {
        self.pl_threshold = self.path_loss(range);
        self
    }

    /// Probability of line of sight at elevation `theta` (radians). Caller
    /// guarantees `theta` is in `[0, pi/2]`.
    pub fn los_probability(&self, theta: f64) -> f64 {
        let deg = theta.to_degrees();
        1.0 / (1.0 + self.s_curve_a * (-self.s_curve_b * (deg - self.s_curve_a)).exp())
    }

    /// Mean path loss in dB at horizontal distance `r`.
    pub fn path_loss(&self, r: f64) -> f64 {
        let theta = elevation(self.altitude, r);
        let p_los = self.los_probability(theta);
        let d = self.altitude.hypot(r);
        let free_space = 20.0 * (4.0 * PI * self.carrier_hz * d / SPEED_OF_LIGHT).log10();
        free_space + p_los * self.eta_los + (1.0 - p_los) * self.eta_nlos
    }

    pub fn horizontal_distance(&self, a: &Point, b: &Point) -> f64 {
        a.distance(b, self.horizontal_norm)
    }

    pub fn covers(&self, user: &Point, dbs: &Point) -> bool {
        self.path_loss(self.horizontal_distance(user, dbs)) <= self.pl_threshold
    }

    /// Horizontal distance at which the path loss reaches the threshold.
    ///
    /// `None` when even a user directly below the drone is out of range.
    /// Path loss grows with `r` whenever `eta_nlos >= eta_los`, so the
    /// boundary is found by bisection.
    pub fn coverage_radius(&self) -> Option<f64> {
        if self.path_loss(0.0) > self.pl_threshold {
            return None;
        }
        let mut hi = self.altitude.max(1.0);
        while self.path_loss(hi) <= self.pl_threshold {
            hi *= 2.0;
            if hi > 1e9 {
                return Some(f64::INFINITY);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.path_loss(mid) <= self.pl_threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

fn elevation(h: f64, r: f64) -> f64 {
    if r == 0.0 {
        FRAC_PI_2
    } else {
        (h / r).atan()
    }
}

/// Elevation angle (radians) of a drone at altitude `h` seen from horizontal
/// distance `r`.
pub fn elevation_angle(h: f64, r: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", format!("altitude must be > 0, got {h}")));
    }
    if !(r >= 0.0) {
        return Err(Error::param("r", format!("distance must be >= 0, got {r}")));
    }
    Ok(elevation(h, r))
}

pub fn los_probability(theta: f64, params: &ChannelParams) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::param("theta", format!("{theta} outside [0, pi/2]")));
    }
    Ok(params.los_probability(theta))
}

pub fn path_loss(r: f64, params: &ChannelParams) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::param("r", format!("distance must be >= 0, got {r}")));
    }
    Ok(params.path_loss(r))
}

pub fn is_covered(user: Point, dbs: Point, params: &ChannelParams) -> bool {
    params.covers(&user, &dbs)
}
