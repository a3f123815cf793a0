use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::forecast::UsageSeries;

use super::BsRecord;

const HEADER: [&str; 5] = ["timestamp", "bs_id", "x_m", "y_m", "online_users"];

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| Error::Trace {
        line,
        reason: format!("{}: cannot parse {raw:?}", HEADER[i]),
    })
}

/// Reads a usage trace. Records come back sorted by `(bs_id, timestamp)`.
pub fn parse_trace<R: Read>(input: R) -> Result<Vec<BsRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(Error::Trace {
            line: 1,
            reason: format!("expected header `{}`", HEADER.join(",")),
        });
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != HEADER.len() {
            return Err(Error::Trace {
                line,
                reason: format!("expected {} fields, got {}", HEADER.len(), row.len()),
            });
        }
        let count: i64 = field(&row, 4, line)?;
        if count < 0 {
            return Err(Error::Trace {
                line,
                reason: format!("online_users must be >= 0, got {count}"),
            });
        }
        let rec = BsRecord {
            timestamp: field(&row, 0, line)?,
            bs_id: field(&row, 1, line)?,
            x_m: field(&row, 2, line)?,
            y_m: field(&row, 3, line)?,
            online_users: count as u64,
        };
        if !(rec.x_m.is_finite() && rec.y_m.is_finite()) {
            return Err(Error::Trace {
                line,
                reason: "coordinates must be finite".into(),
            });
        }
        if !seen.insert((rec.bs_id, rec.timestamp)) {
            return Err(Error::Trace {
                line,
                reason: format!("duplicate sample for bs_id {} at {}", rec.bs_id, rec.timestamp),
            });
        }
        records.push(rec);
    }
    records.sort_by_key(|r| (r.bs_id, r.timestamp));
    Ok(records)
}

/// Writes records in canonical form: the fixed header, one row per record
/// in the given order, shortest round-trip float formatting.
pub fn write_trace<W: Write>(records: &[BsRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.timestamp.to_string(),
            r.bs_id.to_string(),
            r.x_m.to_string(),
            r.y_m.to_string(),
            r.online_users.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Chronological series of one base station. Needs at least two seasons.
pub fn series_from_trace(records: &[BsRecord], bs_id: u32, season_length: usize) -> Result<UsageSeries> {
    if season_length == 0 {
        return Err(Error::param("season_length", "must be >= 1"));
    }
    let mut own: Vec<&BsRecord> = records.iter().filter(|r| r.bs_id == bs_id).collect();
    own.sort_by_key(|r| r.timestamp);
    let needed = 2 * season_length;
    if own.len() < needed {
        return Err(Error::InsufficientData {
            bs_id,
            needed,
            got: own.len(),
        });
    }
    Ok(UsageSeries {
        bs_id,
        values: own.iter().map(|r| r.online_users as f64).collect(),
        season_length,
        timestamps: Some(own.iter().map(|r| r.timestamp).collect()),
    })
}
