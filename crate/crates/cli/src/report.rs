//! Serialisable report records and the plot-data emitters.
//!
//! Plot files are rendered from these records only, so every coordinate in a
//! `.dat` file also appears in the JSON report.

use std::fmt::Write as _;

use aerocell_core::placement::Placement;
use aerocell_core::{CoverageReport, FleetSearch, GroundUser, Point, ScenarioConfig, TransferPlan};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct UserRow {
    pub user_id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub bw_mbps: f64,
    /// Serving DBS, if any.
    pub dbs: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DbsRow {
    pub dbs_id: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub load_mbps: f64,
    pub users_served: usize,
    /// Closed coverage outline (rhombus under the L1 norm).
    pub outline: Vec<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlacementSection {
    /// `auto` (fleet search) or `fixed`.
    pub mode: &'static str,
    pub n_dbs: usize,
    pub max_drones: usize,
    pub below_target: bool,
    pub capacity_mbps: f64,
    pub coverage: CoverageReport,
    pub dbs: Vec<DbsRow>,
    pub users: Vec<UserRow>,
    pub ucd: Vec<Vec<u8>>,
}

impl PlacementSection {
    pub fn new(
        mode: &'static str,
        search: Option<&FleetSearch>,
        max_drones: usize,
        placement: &Placement,
        coverage: &CoverageReport,
        users: &[GroundUser],
        config: &ScenarioConfig,
    ) -> Self {
        let serving = placement.serving_dbs();
        let norm = config.channel.horizontal_norm;
        let radius = config.region.range;
        let dbs = placement
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| DbsRow {
                dbs_id: i,
                x_m: p.x,
                y_m: p.y,
                load_mbps: coverage.per_dbs_load[i],
                users_served: serving.iter().filter(|s| **s == Some(i)).count(),
                outline: norm.outline(*p, radius),
            })
            .collect();
        let users = users
            .iter()
            .zip(&serving)
            .map(|(u, s)| UserRow {
                user_id: u.id,
                x_m: u.x,
                y_m: u.y,
                bw_mbps: u.bw,
                dbs: *s,
            })
            .collect();
        PlacementSection {
            mode,
            n_dbs: placement.positions.len(),
            max_drones,
            below_target: search.is_some_and(|s| s.below_target),
            capacity_mbps: placement.capacity,
            coverage: coverage.clone(),
            dbs,
            users,
            ucd: placement.ucd.clone(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dbs_id,x_m,y_m,load_mbps,users_served\n");
        for d in &self.dbs {
            let _ = writeln!(out, "{},{},{},{},{}", d.dbs_id, d.x_m, d.y_m, d.load_mbps, d.users_served);
        }
        out
    }

    /// Users, DBS positions and coverage outlines as three gnuplot data
    /// blocks separated by double blank lines.
    pub fn to_dat(&self, title: &str) -> String {
        let mut out = format!("# {title}\n# block 0: user_id x_m y_m dbs (-1 = unserved)\n");
        for u in &self.users {
            let dbs = u.dbs.map_or(-1, |d| d as i64);
            let _ = writeln!(out, "{} {} {} {}", u.user_id, u.x_m, u.y_m, dbs);
        }
        out.push_str("\n\n# block 1: dbs_id x_m y_m\n");
        for d in &self.dbs {
            let _ = writeln!(out, "{} {} {}", d.dbs_id, d.x_m, d.y_m);
        }
        out.push_str("\n\n# block 2: dbs_id x_m y_m (closed outline per DBS)\n");
        for d in &self.dbs {
            for p in &d.outline {
                let _ = writeln!(out, "{} {} {}", d.dbs_id, p.x, p.y);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastRow {
    pub bs_id: u32,
    pub x_m: f64,
    pub y_m: f64,
    pub horizon: usize,
    pub raw: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub bs_id: u32,
    pub horizon: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForecastTable {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub season_length: usize,
    pub rows: Vec<ForecastRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holdout_residuals: Option<Vec<ResidualRow>>,
}

impl ForecastTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bs_id,x_m,y_m,horizon,raw,count\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.bs_id, r.x_m, r.y_m, r.horizon, r.raw, r.count);
        }
        if let Some(res) = &self.holdout_residuals {
            out.push_str("\nbs_id,horizon,residual\n");
            for r in res {
                let _ = writeln!(out, "{},{},{}", r.bs_id, r.horizon, r.residual);
            }
        }
        out
    }
}

/// Inputs beyond the config that a run depends on.
#[derive(Debug, Clone, Serialize)]
pub struct RunEcho {
    pub season_length: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub config: ScenarioConfig,
    pub run: RunEcho,
    pub placement_t: PlacementSection,
    pub forecast: ForecastTable,
    pub placement_t1: PlacementSection,
    pub transfer: TransferPlan,
}

impl PipelineReport {
    /// Moves as arrows: matched pairs, then retired sources and launched
    /// targets as single points.
    pub fn transfer_dat(&self) -> String {
        let from = &self.placement_t.dbs;
        let to = &self.placement_t1.dbs;
        let mut out = String::from("# transfer\n# block 0: source target x0 y0 x1 y1 distance_m\n");
        for &(s, t, d) in &self.transfer.matches {
            let _ = writeln!(out, "{s} {t} {} {} {} {} {d}", from[s].x_m, from[s].y_m, to[t].x_m, to[t].y_m);
        }
        out.push_str("\n\n# block 1: retired source x_m y_m\n");
        for &s in &self.transfer.retired {
            let _ = writeln!(out, "{s} {} {}", from[s].x_m, from[s].y_m);
        }
        out.push_str("\n\n# block 2: launched target x_m y_m\n");
        for &t in &self.transfer.launched {
            let _ = writeln!(out, "{t} {} {}", to[t].x_m, to[t].y_m);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub users: usize,
    pub capacity_mbps: f64,
    pub n_star: usize,
    pub coverage_fraction: f64,
    pub served_rate: f64,
    pub below_target: bool,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("users,capacity_mbps,n_star,coverage_fraction,served_rate,below_target\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.users, r.capacity_mbps, r.n_star, r.coverage_fraction, r.served_rate, r.below_target
        );
    }
    out
}
