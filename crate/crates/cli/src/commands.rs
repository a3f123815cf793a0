use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use aerocell_core::forecast::{fit_params, forecast_series, holdout_residuals};
use aerocell_core::placement::{candidate_sites, max_drones_with, search_with, PlacementSolver};
use aerocell_core::scenario::{
    generate_hotspot_users, generate_hotspots, generate_users, materialize_users, parse_trace, read_users,
    series_from_trace,
};
use aerocell_core::transfer::plan_transition;
use aerocell_core::{BsRecord, Error as CoreError, GroundUser, ScenarioConfig, SmoothingParams};
use log::{debug, info};
use serde::Serialize;

use crate::error::{CliError, CliResult, Kind, Staged};
use crate::report::{
    sweep_csv, ForecastRow, ForecastTable, PipelineReport, PlacementSection, ResidualRow, RunEcho, SweepRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn load_config(path: Option<&Path>, seed: Option<u64>, alpha: Option<f64>) -> CliResult<ScenarioConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io("config", p, e))?;
            ScenarioConfig::from_json(&text).stage("config")?
        }
        None => {
            return Err(CliError::validation("config", "--config is required"));
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(a) = alpha {
        cfg.alpha = a;
    }
    cfg.validate().stage("config")?;
    Ok(cfg)
}

fn read_user_file(stage: &'static str, path: &Path) -> CliResult<Vec<GroundUser>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(stage, path, e))?;
    read_users(file).stage(stage)
}

fn read_trace_file(stage: &'static str, path: &Path) -> CliResult<Vec<BsRecord>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(stage, path, e))?;
    parse_trace(file).stage(stage)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

/// Files produced by a command, written all at once; on a failed write the
/// files written so far are removed again.
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    pub fn new() -> Self {
        Outputs { files: Vec::new() }
    }

    pub fn add(&mut self, path: PathBuf, content: String) {
        self.files.push((path, content));
    }

    pub fn write(self) -> CliResult<()> {
        let mut written: Vec<&Path> = Vec::new();
        for (path, content) in &self.files {
            let res = path
                .parent()
                .map_or(Ok(()), fs::create_dir_all)
                .and_then(|_| fs::write(path, content));
            if let Err(e) = res {
                for p in written {
                    let _ = fs::remove_file(p);
                }
                return Err(CliError::io("output", path, e));
            }
            written.push(path);
        }
        Ok(())
    }
}

/// Placement of `users` with the config's capacity: fleet search when `n`
/// is `None`, otherwise exactly `n` drones.
fn place(
    stage: &'static str,
    cfg: &ScenarioConfig,
    users: &[GroundUser],
    n: Option<usize>,
) -> CliResult<PlacementSection> {
    let params = cfg.channel_params();
    let max_d = max_drones_with(&cfg.region, cfg.max_drones_rule);
    let mut solver =
        PlacementSolver::new(users, candidate_sites(&cfg.region, users), cfg.capacity_mbps, &params).stage(stage)?;
    let section = match n {
        None => {
            let found = search_with(&mut solver, max_d, cfg.alpha, cfg.max_iter).stage(stage)?;
            info!(
                "{stage}: n* = {} ({} of {} users served, {} solver calls)",
                found.n_star, found.report.covered_count, found.report.total_users, found.solver_calls
            );
            PlacementSection::new("auto", Some(&found), found.max_drones, &found.placement, &found.report, users, cfg)
        }
        Some(n) => {
            if n == 0 || n > max_d {
                return Err(CoreError::FleetSizeOutOfRange { n, max: max_d }).stage(stage);
            }
            let (placement, report) = solver.solve(n).stage(stage)?;
            PlacementSection::new("fixed", None, max_d, &placement, &report, users, cfg)
        }
    };
    if let Err(reason) = audit(cfg, users, &section) {
        return Err(CliError::new(stage, Kind::Internal, format!("placement audit failed: {reason}")));
    }
    Ok(section)
}

fn audit(cfg: &ScenarioConfig, users: &[GroundUser], section: &PlacementSection) -> Result<(), String> {
    let placement = aerocell_core::Placement {
        positions: section.dbs.iter().map(|d| aerocell_core::Point::new(d.x_m, d.y_m)).collect(),
        capacity: section.capacity_mbps,
        ucd: section.ucd.clone(),
    };
    placement.audit(users, &cfg.channel_params())
}

pub struct PlaceArgs<'a> {
    pub config: Option<&'a Path>,
    pub users: &'a Path,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<&'a Path>,
    pub format: Format,
}

#[derive(Serialize)]
struct PlaceReport<'a> {
    config: &'a ScenarioConfig,
    placement: &'a PlacementSection,
}

/// Returns what to print on stdout.
pub fn cmd_place(args: PlaceArgs) -> CliResult<String> {
    let cfg = load_config(args.config, args.seed, args.alpha)?;
    let users = read_user_file("place", args.users)?;
    let section = place("place", &cfg, &users, args.n)?;
    let body = match args.format {
        Format::Json => to_json(&PlaceReport {
            config: &cfg,
            placement: &section,
        }),
        Format::Csv => section.to_csv(),
    };
    match args.out {
        None => Ok(body),
        Some(dir) => {
            let mut out = Outputs::new();
            let name = match args.format {
                Format::Json => "placement.json",
                Format::Csv => "placement.csv",
            };
            out.add(dir.join(name), body);
            out.add(dir.join("placement.dat"), section.to_dat("placement"));
            out.write()?;
            Ok(String::new())
        }
    }
}

pub struct ForecastArgs<'a> {
    pub config: Option<&'a Path>,
    pub trace: &'a Path,
    pub bs: Option<u32>,
    pub season: usize,
    pub horizon: usize,
    pub fit: bool,
    pub holdout: bool,
    pub out: Option<&'a Path>,
    pub format: Format,
}

fn station_ids(records: &[BsRecord]) -> Vec<u32> {
    let mut ids: Vec<u32> = records.iter().map(|r| r.bs_id).collect();
    ids.dedup();
    ids
}

/// Forecasts every requested station; the table's parameters are those of
/// the last station when fitting per station.
fn forecast_table(
    records: &[BsRecord],
    ids: &[u32],
    season: usize,
    horizon: usize,
    smoothing: SmoothingParams,
    fit: bool,
    holdout: bool,
) -> CliResult<ForecastTable> {
    if horizon == 0 {
        return Err(CliError::validation("forecast", "--horizon must be >= 1"));
    }
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    let mut used = smoothing;
    for &id in ids {
        let series = series_from_trace(records, id, season).stage("forecast")?;
        let params = if fit {
            fit_params(&series).stage("forecast")?.params
        } else {
            smoothing
        };
        used = params;
        let last = records.iter().rfind(|r| r.bs_id == id).expect("series is non-empty");
        let raw = forecast_series(&series, params, horizon).stage("forecast")?;
        debug!("forecast bs {id}: {raw:?}");
        for (h, f) in raw.into_iter().enumerate() {
            rows.push(ForecastRow {
                bs_id: id,
                x_m: last.x_m,
                y_m: last.y_m,
                horizon: h + 1,
                raw: f,
                count: f.round().max(0.0) as u64,
            });
        }
        if holdout {
            let res = holdout_residuals(&series, params).stage("forecast")?;
            residuals.extend(res.into_iter().enumerate().map(|(h, r)| ResidualRow {
                bs_id: id,
                horizon: h + 1,
                residual: r,
            }));
        }
    }
    Ok(ForecastTable {
        alpha: used.alpha,
        beta: used.beta,
        gamma: used.gamma,
        season_length: season,
        rows,
        holdout_residuals: holdout.then_some(residuals),
    })
}

pub fn cmd_forecast(args: ForecastArgs) -> CliResult<String> {
    let smoothing = match args.config {
        Some(_) => load_config(args.config, None, None)?.smoothing,
        None => SmoothingParams::default(),
    };
    let records = read_trace_file("forecast", args.trace)?;
    let ids = match args.bs {
        Some(id) => vec![id],
        None => station_ids(&records),
    };
    let table = forecast_table(&records, &ids, args.season, args.horizon, smoothing, args.fit, args.holdout)?;
    let body = match args.format {
        Format::Json => to_json(&table),
        Format::Csv => table.to_csv(),
    };
    match args.out {
        None => Ok(body),
        Some(dir) => {
            let mut out = Outputs::new();
            let name = match args.format {
                Format::Json => "forecast.json",
                Format::Csv => "forecast.csv",
            };
            out.add(dir.join(name), body);
            out.write()?;
            Ok(String::new())
        }
    }
}

pub struct PlanArgs<'a> {
    pub config: Option<&'a Path>,
    pub users: &'a Path,
    pub trace: &'a Path,
    pub season: usize,
    pub horizon: usize,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: &'a Path,
}

#[derive(Serialize)]
struct Timings {
    place_t: f64,
    forecast: f64,
    materialize: f64,
    place_t1: f64,
    transfer: f64,
}

/// Full pipeline: place(t), forecast, materialize, place(t+1), transfer.
pub fn cmd_plan(args: PlanArgs) -> CliResult<String> {
    let cfg = load_config(args.config, args.seed, args.alpha)?;

    let clock = Instant::now();
    let users_t = read_user_file("place_t", args.users)?;
    let placement_t = place("place_t", &cfg, &users_t, None)?;
    let t_place = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let records = read_trace_file("forecast", args.trace)?;
    let ids = station_ids(&records);
    if ids.is_empty() {
        return Err(CliError::validation("forecast", "trace has no records"));
    }
    let forecast = forecast_table(&records, &ids, args.season, args.horizon, cfg.smoothing, false, false)?;
    let t_forecast = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let mut users_t1 = Vec::new();
    for row in forecast.rows.iter().filter(|r| r.horizon == args.horizon) {
        let bs = BsRecord {
            timestamp: 0,
            bs_id: row.bs_id,
            x_m: row.x_m,
            y_m: row.y_m,
            online_users: row.count,
        };
        if !cfg.region.contains(&bs.position()) {
            return Err(CliError::validation(
                "materialize",
                format!("base station {} lies outside the region", bs.bs_id),
            ));
        }
        for mut u in materialize_users(&cfg, &bs, row.count as usize, cfg.seed) {
            u.id = users_t1.len();
            users_t1.push(u);
        }
    }
    let t_materialize = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let placement_t1 = place("place_t1", &cfg, &users_t1, None)?;
    let t_place1 = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let pos = |s: &PlacementSection| aerocell_core::Placement {
        positions: s.dbs.iter().map(|d| aerocell_core::Point::new(d.x_m, d.y_m)).collect(),
        capacity: s.capacity_mbps,
        ucd: Vec::new(),
    };
    let transfer = plan_transition(&pos(&placement_t), &pos(&placement_t1), cfg.speed, cfg.time_budget, cfg.move_norm)
        .stage("transfer")?;
    let t_transfer = clock.elapsed().as_secs_f64();
    info!(
        "transfer: {} moves, {} retired, {} launched, {:.1} m",
        transfer.matches.len(),
        transfer.retired.len(),
        transfer.launched.len(),
        transfer.total_cost
    );

    let report = PipelineReport {
        config: cfg,
        run: RunEcho {
            season_length: args.season,
            horizon: args.horizon,
        },
        placement_t,
        forecast,
        placement_t1,
        transfer,
    };
    let timings = Timings {
        place_t: t_place,
        forecast: t_forecast,
        materialize: t_materialize,
        place_t1: t_place1,
        transfer: t_transfer,
    };
    let mut out = Outputs::new();
    out.add(args.out.join("report.json"), to_json(&report));
    out.add(args.out.join("placement_t.dat"), report.placement_t.to_dat("placement at t"));
    out.add(args.out.join("placement_t1.dat"), report.placement_t1.to_dat("placement at t+1"));
    out.add(args.out.join("transfer.dat"), report.transfer_dat());
    out.add(args.out.join("timings.json"), to_json(&timings));
    out.write()?;
    Ok(String::new())
}

pub struct ReportArgs<'a> {
    pub config: Option<&'a Path>,
    pub counts: &'a [usize],
    pub hotspots: usize,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<&'a Path>,
    pub format: Format,
}

/// Users for a sweep: uniform, or around `hotspots` seeded centres. The
/// largest count is drawn once and smaller counts are its prefixes.
pub fn sweep_users(cfg: &ScenarioConfig, count: usize, hotspots: usize) -> Vec<GroundUser> {
    if hotspots == 0 {
        generate_users(cfg, count, cfg.seed)
    } else {
        let centres = generate_hotspots(cfg, hotspots, cfg.seed);
        generate_hotspot_users(cfg, &centres, count, cfg.seed.wrapping_add(1))
    }
}

/// Fleet size over the capacity palette and the requested user counts.
pub fn cmd_report(args: ReportArgs) -> CliResult<String> {
    let cfg = load_config(args.config, args.seed, args.alpha)?;
    let max_count = args.counts.iter().copied().max().unwrap_or(0);
    let all = sweep_users(&cfg, max_count, args.hotspots);
    let mut rows = Vec::new();
    for &count in args.counts {
        for &cap in &cfg.capacity_palette {
            let run = ScenarioConfig {
                capacity_mbps: cap,
                ..cfg.clone()
            };
            let users = &all[..count];
            let s = place("report", &run, users, None)?;
            rows.push(SweepRow {
                users: count,
                capacity_mbps: cap,
                n_star: s.n_dbs,
                coverage_fraction: s.coverage.coverage_fraction,
                served_rate: s.coverage.served_rate,
                below_target: s.below_target,
            });
        }
    }
    let body = match args.format {
        Format::Json => to_json(&rows),
        Format::Csv => sweep_csv(&rows),
    };
    match args.out {
        None => Ok(body),
        Some(dir) => {
            let mut out = Outputs::new();
            let name = match args.format {
                Format::Json => "sweep.json",
                Format::Csv => "sweep.csv",
            };
            out.add(dir.join(name), body);
            out.write()?;
            Ok(String::new())
        }
    }
}
