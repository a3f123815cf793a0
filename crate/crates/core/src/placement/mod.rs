//! Coverage-maximising placement of drone base stations.
//!
//! For a fixed fleet size the solver picks sites from a discrete candidate
//! set (a lattice at pitch `R / sqrt(2)` plus every user location) so that
//! as many users as possible are associated with a drone. Associations must
//! respect three constraint families:
//!
//! - a user is served by at most one drone;
//! - the summed bandwidth of a drone's users stays strictly below its capacity;
//! - a user can only be served by a drone that covers it under the channel model.
//!
//! [`binary_search_fleet`] wraps the solver in a binary search over fleet
//! sizes in `[1, max_drones]` to find the smallest fleet reaching a coverage
//! target.

mod assign;
mod search;

use std::collections::HashSet;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::Point;

pub use search::{binary_search_fleet, search_with, FleetSearch, PlacementSolver, ENUMERATION_MAX_SUBSETS,
    EXACT_ASSIGNMENT_MAX_USERS};

/// A demand point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundUser {
    #[serde(rename = "user_id")]
    pub id: usize,
    #[serde(rename = "x_m")]
    pub x: f64,
    #[serde(rename = "y_m")]
    pub y: f64,
    /// Required bandwidth, Mbit/s.
    #[serde(rename = "bw_mbps")]
    pub bw: f64,
}

impl GroundUser {
    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Rectangular service area `[0, width] x [0, length]` and the nominal DBS
/// coverage range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(rename = "x_m")]
    pub width: f64,
    #[serde(rename = "y_m")]
    pub length: f64,
    #[serde(rename = "r_m")]
    pub range: f64,
}

impl Default for Region {
    fn default() -> Self {
        Region {
            width: 300.0,
            length: 400.0,
            range: 50.0,
        }
    }
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::param("region.x_m", "must be > 0"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::param("region.y_m", "must be > 0"));
        }
        if !(self.range > 0.0 && self.range <= self.width.min(self.length)) {
            return Err(Error::param("region.r_m", "must lie in (0, min(x_m, y_m)]"));
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.length).contains(&p.y)
    }

    /// Lattice half-pitch `R / sqrt(2)`.
    pub fn lattice_pitch(&self) -> f64 {
        self.range / SQRT_2
    }
}

/// How the fleet-size upper bound combines the per-axis cell counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxDronesRule {
    /// Cells of a 2-D lattice: `ceil(X / p) * ceil(Y / p)`.
    #[default]
    Product,
    /// `ceil(X / p) + ceil(Y / p)`, kept for comparison only; it cannot tile
    /// a 2-D region.
    AxisSum,
}

/// Axis cell count with a small tolerance so that exact multiples of the
/// pitch are not bumped up by rounding noise.
fn axis_cells(extent: f64, pitch: f64) -> usize {
    ((extent / pitch - 1e-9).ceil() as usize).max(1)
}

/// Upper bound on the useful fleet size: the number of cells of pitch
/// `sqrt(2) R` needed to tile the region.
pub fn max_drones(region: &Region) -> usize {
    max_drones_with(region, MaxDronesRule::Product)
}

pub fn max_drones_with(region: &Region, rule: MaxDronesRule) -> usize {
    let pitch = 2.0 * region.lattice_pitch();
    let nx = axis_cells(region.width, pitch);
    let ny = axis_cells(region.length, pitch);
    match rule {
        MaxDronesRule::Product => nx * ny,
        MaxDronesRule::AxisSum => nx + ny,
    }
}

fn axis_coords(extent: f64, pitch: f64) -> Vec<f64> {
    let mut coords = Vec::new();
    let mut k = 0usize;
    loop {
        let v = k as f64 * pitch;
        if v >= extent - 1e-9 {
            break;
        }
        coords.push(v);
        k += 1;
    }
    coords.push(extent);
    coords
}

/// Candidate DBS sites.
///
/// Lattice points at pitch `R / sqrt(2)` along each axis starting from 0,
/// with the far boundary appended, in row-major order (rows are `y`); then
/// user locations in ascending id order. Exact duplicates are dropped,
/// keeping the first occurrence.
pub fn candidate_sites(region: &Region, users: &[GroundUser]) -> Vec<Point> {
    let pitch = region.lattice_pitch();
    let xs = axis_coords(region.width, pitch);
    let ys = axis_coords(region.length, pitch);

    let mut by_id: Vec<&GroundUser> = users.iter().collect();
    by_id.sort_by_key(|u| u.id);

    let key = |p: &Point| ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(xs.len() * ys.len() + users.len());
    let grid = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Point::new(x, y)));
    for p in grid.chain(by_id.iter().map(|u| u.position())) {
        if seen.insert(key(&p)) {
            out.push(p);
        }
    }
    out
}

/// A set of DBS positions with their user associations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub positions: Vec<Point>,
    /// Per-DBS bandwidth capacity, Mbit/s.
    pub capacity: f64,
    /// Association matrix indexed `[dbs][user]`; users are indexed by their
    /// position in the input slice.
    pub ucd: Vec<Vec<u8>>,
}

impl Placement {
    /// Serving DBS of every user, if any.
    pub fn serving_dbs(&self) -> Vec<Option<usize>> {
        let n_users = self.ucd.first().map_or(0, Vec::len);
        (0..n_users)
            .map(|j| (0..self.ucd.len()).find(|&i| self.ucd[i][j] == 1))
            .collect()
    }

    /// Checks the association constraints against `users` and `params`.
    pub fn audit(&self, users: &[GroundUser], params: &ChannelParams) -> std::result::Result<(), String> {
        if self.ucd.len() != self.positions.len() {
            return Err("ucd row count differs from DBS count".into());
        }
        let cap = to_kbps(self.capacity);
        for (i, row) in self.ucd.iter().enumerate() {
            if row.len() != users.len() {
                return Err(format!("ucd row {i} has {} columns", row.len()));
            }
            let mut load = 0u64;
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => {
                        if !params.covers(&users[j].position(), &self.positions[i]) {
                            return Err(format!("user {j} served by non-covering DBS {i}"));
                        }
                        load += to_kbps(users[j].bw);
                    }
                    _ => return Err(format!("ucd[{i}][{j}] = {v} is not binary")),
                }
            }
            if load >= cap {
                return Err(format!("DBS {i} load {load} kbit/s not below capacity {cap}"));
            }
        }
        for j in 0..users.len() {
            let served: u32 = self.ucd.iter().map(|r| r[j] as u32).sum();
            if served > 1 {
                return Err(format!("user {j} associated with {served} DBSs"));
            }
        }
        Ok(())
    }

    pub fn report(&self, users: &[GroundUser]) -> CoverageReport {
        let per_dbs_load: Vec<f64> = self
            .ucd
            .iter()
            .map(|row| {
                let kbps: u64 = row
                    .iter()
                    .zip(users)
                    .filter(|(v, _)| **v == 1)
                    .map(|(_, u)| to_kbps(u.bw))
                    .sum();
                kbps as f64 / 1000.0
            })
            .collect();
        let covered_count = self.serving_dbs().iter().filter(|s| s.is_some()).count();
        let total_users = users.len();
        CoverageReport {
            covered_count,
            total_users,
            coverage_fraction: if total_users == 0 {
                1.0
            } else {
                covered_count as f64 / total_users as f64
            },
            served_rate: per_dbs_load.iter().sum(),
            per_dbs_load,
        }
    }
}

/// Coverage summary of a placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered_count: usize,
    pub total_users: usize,
    /// `covered_count / total_users`; 1 when there are no users.
    pub coverage_fraction: f64,
    /// Sum of served users' bandwidth, Mbit/s.
    pub served_rate: f64,
    pub per_dbs_load: Vec<f64>,
}

/// Bandwidth accounting is done in integer kbit/s so that the strict
/// capacity inequality is decided exactly.
pub(crate) fn to_kbps(mbps: f64) -> u64 {
    (mbps * 1000.0).round().max(0.0) as u64
}

fn validate_users(users: &[GroundUser]) -> Result<()> {
    for u in users {
        if !(u.bw.is_finite() && u.bw > 0.0) {
            return Err(Error::param("bw_mbps", format!("user {} has bandwidth {}", u.id, u.bw)));
        }
        if !(u.x.is_finite() && u.y.is_finite()) {
            return Err(Error::param("x_m/y_m", format!("user {} has non-finite position", u.id)));
        }
    }
    Ok(())
}

fn validate_capacity(capacity: f64) -> Result<()> {
    if !(capacity.is_finite() && capacity > 0.0) {
        return Err(Error::param("capacity", format!("must be > 0, got {capacity}")));
    }
    Ok(())
}

/// Associates users with the given DBS positions using the deterministic
/// rule: users in ascending id order go to the covering DBS with the most
/// remaining capacity (lowest index on ties). Users that fit nowhere stay
/// unassigned.
pub fn assign_users(
    positions: &[Point],
    users: &[GroundUser],
    capacity: f64,
    params: &ChannelParams,
) -> Result<Placement> {
    if positions.is_empty() {
        return Err(Error::param("positions", "at least one DBS position is required"));
    }
    validate_users(users)?;
    validate_capacity(capacity)?;
    let inst = assign::Instance::new(users, positions.to_vec(), capacity, params);
    let slots: Vec<usize> = (0..positions.len()).collect();
    let a = inst.rule_assign(&slots);
    Ok(inst.placement(&a))
}

/// Best placement of exactly `n_dbs` drones over [`candidate_sites`].
pub fn solve_placement(
    users: &[GroundUser],
    n_dbs: usize,
    region: &Region,
    capacity: f64,
    params: &ChannelParams,
) -> Result<(Placement, CoverageReport)> {
    region.validate()?;
    let max = max_drones(region);
    if n_dbs == 0 || n_dbs > max {
        return Err(Error::FleetSizeOutOfRange { n: n_dbs, max });
    }
    let mut solver = PlacementSolver::new(users, candidate_sites(region, users), capacity, params)?;
    solver.solve(n_dbs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn user(id: usize, x: f64, y: f64, bw: f64) -> GroundUser {
        GroundUser { id, x, y, bw }
    }

    #[test]
    fn max_drones_examples() {
        let r = Region {
            width: SQRT_2 * 50.0,
            length: SQRT_2 * 50.0,
            range: 50.0,
        };
        assert_eq!(max_drones(&r), 1);
        let table = Region::default();
        assert_eq!(max_drones(&table), 30);
        assert_eq!(max_drones_with(&table, MaxDronesRule::AxisSum), 11);
    }

    #[test]
    fn candidate_grid_for_square_region() {
        let r = Region {
            width: 100.0,
            length: 100.0,
            range: 50.0,
        };
        let c = candidate_sites(&r, &[]);
        let p = 50.0 / SQRT_2;
        let axis = [0.0, p, 2.0 * p, 100.0];
        assert_eq!(c.len(), 16);
        for (k, pt) in c.iter().enumerate() {
            assert_eq!(pt.y, axis[k / 4]);
            assert_eq!(pt.x, axis[k % 4]);
        }
        assert_eq!(candidate_sites(&r, &[]), c);
    }

    #[test]
    fn candidates_include_users_once() {
        let r = Region {
            width: 100.0,
            length: 100.0,
            range: 50.0,
        };
        let users = [user(1, 10.0, 10.0, 1.0), user(0, 10.0, 10.0, 1.0), user(2, 0.0, 0.0, 1.0)];
        let c = candidate_sites(&r, &users);
        assert_eq!(c.len(), 17);
        assert_eq!(c[16], Point::new(10.0, 10.0));
    }

    #[test]
    fn single_user_single_dbs() {
        let p = ChannelParams::default();
        let pl = assign_users(&[Point::new(0.0, 0.0)], &[user(0, 10.0, 0.0, 1.0)], 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![1]]);
    }

    #[test]
    fn strict_capacity_admits_two_of_three() {
        let p = ChannelParams::default();
        let users = [user(0, 1.0, 0.0, 4.0), user(1, 2.0, 0.0, 4.0), user(2, 3.0, 0.0, 4.0)];
        let pl = assign_users(&[Point::new(0.0, 0.0)], &users, 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![1, 1, 0]]);
        // 4 + 4 + 2 = 10 is not strictly below 10
        let users = [user(0, 1.0, 0.0, 4.0), user(1, 2.0, 0.0, 4.0), user(2, 3.0, 0.0, 2.0)];
        let pl = assign_users(&[Point::new(0.0, 0.0)], &users, 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![1, 1, 0]]);
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        let p = ChannelParams::default();
        let dbs = [Point::new(0.0, 0.0), Point::new(40.0, 0.0)];
        let pl = assign_users(&dbs, &[user(0, 20.0, 0.0, 1.0)], 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![1], vec![0]]);
    }

    #[test]
    fn rule_prefers_most_remaining_capacity() {
        let p = ChannelParams::default();
        let dbs = [Point::new(0.0, 0.0), Point::new(40.0, 0.0)];
        let users = [user(0, 0.0, 0.0, 2.0), user(1, 20.0, 0.0, 1.0)];
        let pl = assign_users(&dbs, &users, 10.0, &p).unwrap();
        assert_eq!(pl.serving_dbs(), vec![Some(0), Some(1)]);
    }

    #[test]
    fn users_are_processed_by_id_not_slice_order() {
        let p = ChannelParams::default();
        let users = [user(5, 1.0, 0.0, 6.0), user(1, 2.0, 0.0, 6.0)];
        let pl = assign_users(&[Point::new(0.0, 0.0)], &users, 10.0, &p).unwrap();
        assert_eq!(pl.serving_dbs(), vec![None, Some(0)]);
    }

    #[test]
    fn oversized_user_is_never_assigned() {
        let p = ChannelParams::default();
        let pl = assign_users(&[Point::new(0.0, 0.0)], &[user(0, 0.0, 0.0, 12.0)], 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![0]]);
        assert!(pl.audit(&[user(0, 0.0, 0.0, 12.0)], &p).is_ok());
    }

    #[test]
    fn uncovered_user_is_unassigned() {
        let p = ChannelParams::default();
        let pl = assign_users(&[Point::new(0.0, 0.0)], &[user(0, 60.0, 0.0, 1.0)], 10.0, &p).unwrap();
        assert_eq!(pl.ucd, vec![vec![0]]);
    }

    #[test]
    fn assign_rejects_empty_positions() {
        assert!(assign_users(&[], &[], 10.0, &ChannelParams::default()).is_err());
    }

    #[test]
    fn report_sums_loads() {
        let p = ChannelParams::default();
        let users = [user(0, 0.0, 0.0, 0.1), user(1, 1.0, 0.0, 0.5), user(2, 100.0, 0.0, 2.0)];
        let pl = assign_users(&[Point::new(0.0, 0.0)], &users, 10.0, &p).unwrap();
        let rep = pl.report(&users);
        assert_eq!(rep.covered_count, 2);
        assert!((rep.coverage_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert!((rep.served_rate - 0.6).abs() < 1e-12);
        assert_eq!(rep.served_rate, rep.per_dbs_load.iter().sum::<f64>());
    }

    #[test]
    fn solve_rejects_bad_fleet_size() {
        let p = ChannelParams::default();
        let region = Region::default();
        let users = [user(0, 10.0, 10.0, 1.0)];
        assert!(matches!(
            solve_placement(&users, 0, &region, 10.0, &p),
            Err(Error::FleetSizeOutOfRange { .. })
        ));
        assert!(solve_placement(&users, 31, &region, 10.0, &p).is_err());
    }

    #[test]
    fn one_cluster_one_drone() {
        let p = ChannelParams::default();
        let region = Region::default();
        let users: Vec<_> = (0..6).map(|i| user(i, 150.0 + i as f64, 200.0, 1.5)).collect();
        let (pl, rep) = solve_placement(&users, 1, &region, 10.0, &p).unwrap();
        assert_eq!(rep.coverage_fraction, 1.0);
        assert!(pl.audit(&users, &p).is_ok());
    }
}
