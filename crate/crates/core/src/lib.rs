//! Planning toolkit for drone base stations (DBS).
//!
//! The pipeline has four stages, each in its own module:
//!
//! - [`channel`]: air-to-ground path loss and the coverage gate.
//! - [`placement`]: coverage-maximising DBS placement for a fixed fleet size,
//!   and the binary search for the smallest fleet that reaches a coverage target.
//! - [`forecast`]: additive decomposition and Holt-Winters smoothing of
//!   per-base-station user counts.
//! - [`transfer`]: minimum-distance one-to-one transfer of drones between
//!   two placements.
//!
//! [`scenario`] handles trace ingestion, configuration and seeded synthetic
//! user generation.

pub mod channel;
pub mod error;
pub mod forecast;
pub mod geometry;
pub mod placement;
pub mod scenario;
pub mod transfer;

pub use channel::ChannelParams;
pub use error::{Error, Result};
pub use forecast::{DecompResult, HwState, SmoothingParams, UsageSeries};
pub use geometry::{Norm, Point};
pub use placement::{CoverageReport, FleetSearch, GroundUser, Placement, Region};
pub use scenario::{BsRecord, ScenarioConfig};
pub use transfer::{CostMatrix, TransferPlan, TransferProblem};
