use std::f64::consts::TAU;
use std::io::{Read, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::placement::GroundUser;

use super::{BsRecord, ScenarioConfig};

const USER_HEADER: [&str; 4] = ["user_id", "x_m", "y_m", "bw_mbps"];

/// Uniform draw in `[0, 1)` from the top 53 bits of the next word.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn pick(palette: &[f64], u: f64) -> f64 {
    let i = ((u * palette.len() as f64) as usize).min(palette.len() - 1);
    palette[i]
}

/// Seed of the stream used for one base station: SplitMix64 of
/// `seed ^ (bs_id * 0x9E3779B97F4A7C15)`.
pub fn derive_seed(seed: u64, bs_id: u32) -> u64 {
    let mut z = seed ^ (bs_id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `count` users uniform over the region with palette demands; ids `0..count`.
pub fn generate_users(config: &ScenarioConfig, count: usize, seed: u64) -> Vec<GroundUser> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = &config.region;
    (0..count)
        .map(|id| {
            let x = unit(&mut rng) * r.width;
            let y = unit(&mut rng) * r.length;
            let bw = pick(&config.bw_palette, unit(&mut rng));
            GroundUser { id, x, y, bw }
        })
        .collect()
}

/// `count` users uniform over the L2 disc of the configured cell radius
/// around `bs`, clamped to the region; ids `0..count`.
///
/// Clamping moves each coordinate towards the station, so points stay
/// within the disc as long as the station lies in the region.
pub fn materialize_users(config: &ScenarioConfig, bs: &BsRecord, count: usize, seed: u64) -> Vec<GroundUser> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, bs.bs_id));
    let radius = config.cell_radius();
    (0..count)
        .map(|id| disc_user(config, bs.position(), radius, id, &mut rng))
        .collect()
}

fn disc_user(config: &ScenarioConfig, centre: Point, radius: f64, id: usize, rng: &mut ChaCha8Rng) -> GroundUser {
    let r = radius * unit(rng).sqrt();
    let phi = TAU * unit(rng);
    let bw = pick(&config.bw_palette, unit(rng));
    GroundUser {
        id,
        x: (centre.x + r * phi.cos()).clamp(0.0, config.region.width),
        y: (centre.y + r * phi.sin()).clamp(0.0, config.region.length),
        bw,
    }
}

/// `k` hotspot centres uniform over `[R, X - R] x [R, Y - R]`:
/// `x = R + u (X - 2R)`, `y = R + u (Y - 2R)`.
pub fn generate_hotspots(config: &ScenarioConfig, k: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = &config.region;
    (0..k)
        .map(|_| {
            let x = r.range + unit(&mut rng) * (r.width - 2.0 * r.range).max(0.0);
            let y = r.range + unit(&mut rng) * (r.length - 2.0 * r.range).max(0.0);
            Point::new(x, y)
        })
        .collect()
}

/// `count` users spread over hotspots: each user picks a centre with
/// `floor(u * len)`, then is placed as in [`materialize_users`]; ids
/// `0..count`. Prefixes of a larger draw equal smaller draws.
pub fn generate_hotspot_users(config: &ScenarioConfig, centres: &[Point], count: usize, seed: u64) -> Vec<GroundUser> {
    if centres.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = config.cell_radius();
    (0..count)
        .map(|id| {
            let c = centres[((unit(&mut rng) * centres.len() as f64) as usize).min(centres.len() - 1)];
            disc_user(config, c, radius, id, &mut rng)
        })
        .collect()
}

/// Reads a `user_id,x_m,y_m,bw_mbps` snapshot.
pub fn read_users<R: Read>(input: R) -> Result<Vec<GroundUser>> {
    let mut reader = csv::Reader::from_reader(input);
    if reader.headers()?.iter().map(str::trim).ne(USER_HEADER) {
        return Err(Error::param("users", format!("expected header `{}`", USER_HEADER.join(","))));
    }
    let users = reader.deserialize().collect::<std::result::Result<Vec<GroundUser>, _>>()?;
    Ok(users)
}

pub fn write_users<W: Write>(users: &[GroundUser], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for u in users {
        w.serialize(u)?;
    }
    if users.is_empty() {
        w.write_record(USER_HEADER)?;
    }
    w.flush()?;
    Ok(())
}
