//! CSV schemas and their readers/writers.
//!
//! Floats use Rust's shortest round-trip formatting, and undefined values
//! are empty fields.

use std::fs::File;
use std::io;
use std::path::Path;

use crate::error::{Error, Result};
use crate::process::{PathGrid, PathKind};

pub const PATHS_HEADER: &[&str] = &["path_id", "k", "t", "y"];
pub const ESTIMATE_HEADER: &[&str] = &[
    "path_id",
    "sigma_hat_plus",
    "sigma_hat_minus",
    "m_plus",
    "m_minus",
    "q_bar_plus",
    "local_time_hat",
    "bracket_pm",
    "defined_plus",
    "defined_minus",
];
pub const ERRORS_HEADER: &[&str] = &["path_id", "M_plus", "M_minus", "S_plus", "S_minus"];
pub const LIMIT_HEADER: &[&str] = &["draw_id", "M_plus", "M_minus", "S_plus", "S_minus", "lambda", "xi"];
pub const ORW_HEADER: &[&str] = &["walk_id", "q_hat", "alpha", "beta", "occupation_fraction"];
pub const PANEL_HEADER: &[&str] = &["x", "empirical_density", "limit_density"];

pub fn header_line(header: &[&str]) -> String {
    header.join(",")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::Parse {
            line: line.unwrap_or(0),
            msg: format!("{kind:?}"),
        },
    }
}

/// Writes a header and rows to `path`.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(io::BufWriter::new(file));
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn path_rows(path_id: u64, path: &PathGrid) -> impl Iterator<Item = [String; 4]> + '_ {
    path.values()
        .iter()
        .enumerate()
        .map(move |(k, y)| [path_id.to_string(), k.to_string(), path.time(k).to_string(), y.to_string()])
}

pub fn write_paths(file: &Path, paths: &[(u64, PathGrid)]) -> Result<()> {
    write_csv(file, PATHS_HEADER, paths.iter().flat_map(|(id, p)| path_rows(*id, p)))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {name} from {raw:?}"),
    })
}

/// Reads the simulate schema. Rows of one path must be contiguous with
/// `k = 0, 1, …` and uniformly spaced `t` starting at 0; the horizon is the
/// last `t`.
pub fn parse_paths<R: io::Read>(reader: R, source: &Path) -> Result<Vec<(u64, PathGrid)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(source, e))?.clone();
    if header.iter().map(str::trim).ne(PATHS_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {}, got {}", header_line(PATHS_HEADER), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    struct Pending {
        id: u64,
        first_line: u64,
        times: Vec<(f64, u64)>,
        values: Vec<f64>,
    }
    fn finish(p: Pending) -> Result<(u64, PathGrid)> {
        let n = p.values.len() - 1;
        let horizon = p.times[n].0;
        if n == 0 || !(horizon > 0.0) {
            return Err(Error::Parse {
                line: p.first_line,
                msg: format!("path {} needs at least 2 points and a positive horizon", p.id),
            });
        }
        for (k, &(t, line)) in p.times.iter().enumerate() {
            let expected = horizon * k as f64 / n as f64;
            if (t - expected).abs() > 1e-9 * horizon {
                return Err(Error::Parse {
                    line,
                    msg: format!("path {}: t={t} is off the uniform grid (expected {expected})", p.id),
                });
            }
        }
        let grid = PathGrid::new(horizon, p.values, PathKind::Obm).map_err(|e| Error::Parse {
            line: p.first_line,
            msg: e.to_string(),
        })?;
        Ok((p.id, grid))
    }

    let mut out: Vec<(u64, PathGrid)> = Vec::new();
    let mut cur: Option<Pending> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(source, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != PATHS_HEADER.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, got {}", PATHS_HEADER.len(), rec.len()),
            });
        }
        let id: u64 = field(&rec, 0, "path_id", line)?;
        let k: usize = field(&rec, 1, "k", line)?;
        let t: f64 = field(&rec, 2, "t", line)?;
        let y: f64 = field(&rec, 3, "y", line)?;
        if !(t.is_finite() && y.is_finite()) {
            return Err(Error::Parse {
                line,
                msg: "non-finite t or y".into(),
            });
        }
        if cur.as_ref().is_some_and(|p| p.id != id) {
            out.push(finish(cur.take().expect("checked above"))?);
        }
        if cur.is_none() {
            if out.iter().any(|(done, _)| *done == id) {
                return Err(Error::Parse {
                    line,
                    msg: format!("rows of path {id} are not contiguous"),
                });
            }
            cur = Some(Pending {
                id,
                first_line: line,
                times: Vec::new(),
                values: Vec::new(),
            });
        }
        let p = cur.as_mut().expect("just set");
        if k != p.values.len() {
            return Err(Error::Parse {
                line,
                msg: format!("path {id}: expected k={}, got {k}", p.values.len()),
            });
        }
        p.times.push((t, line));
        p.values.push(y);
    }
    if let Some(p) = cur {
        out.push(finish(p)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no rows".into(),
        });
    }
    Ok(out)
}

pub fn read_paths(file: &Path) -> Result<Vec<(u64, PathGrid)>> {
    let f = File::open(file).map_err(|e| Error::io(file, e))?;
    parse_paths(io::BufReader::new(f), file)
}
