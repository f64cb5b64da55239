//! `ASFGRID v1` text rasters.
//!
//! ```text
//! ASFGRID v1 <label> <origin_lat> <origin_lon> <d_lat> <d_lon> <n_lat> <n_lon>
//! # units: us
//! <n_lon values>      <- southernmost row
//! ...
//! <n_lon values>      <- northernmost row
//! ```
//!
//! Values are whitespace separated, west to east, `NA` for NODATA. Lines
//! starting with `#` and blank lines after the header are ignored. ASF maps
//! store microseconds; accuracy exports store meters and may hold a single
//! row or column.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use lorasf_core::{AsfMap, AsfMapError, GeoPoint, Raster, RasterError};

pub const MAGIC: &str = "ASFGRID";
pub const VERSION: &str = "v1";
pub const NODATA: &str = "NA";

#[derive(Debug, thiserror::Error)]
pub enum GridFileError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("invalid value: {0}")]
    Value(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl GridFileError {
    fn format(line: usize, reason: impl Into<String>) -> Self {
        Self::Format {
            line,
            reason: reason.into(),
        }
    }
}

impl From<RasterError> for GridFileError {
    fn from(e: RasterError) -> Self {
        match e {
            RasterError::NonFinite { .. } => Self::Value(e.to_string()),
            other => Self::format(1, other.to_string()),
        }
    }
}

impl From<AsfMapError> for GridFileError {
    fn from(e: AsfMapError) -> Self {
        match e {
            AsfMapError::Raster(r) => r.into(),
            AsfMapError::TooSmall { .. } => Self::format(1, e.to_string()),
            other => Self::Value(other.to_string()),
        }
    }
}

struct Header {
    label: String,
    origin_lat: f64,
    origin_lon: f64,
    d_lat: f64,
    d_lon: f64,
    n_lat: usize,
    n_lon: usize,
}

fn parse_header(line: &str) -> Result<Header, GridFileError> {
    let bad = |reason: &str| GridFileError::format(1, reason);
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 9 {
        return Err(bad(
            "header needs 9 fields: ASFGRID v1 <id> <lat0> <lon0> <dlat> <dlon> <nlat> <nlon>",
        ));
    }
    if fields[0] != MAGIC || fields[1] != VERSION {
        return Err(bad("header must start with `ASFGRID v1`"));
    }
    let float = |k: usize, name: &str| -> Result<f64, GridFileError> {
        let v: f64 = fields[k]
            .parse()
            .map_err(|_| GridFileError::format(1, format!("{name}: cannot parse {:?}", fields[k])))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GridFileError::format(1, format!("{name} must be finite")))
        }
    };
    let count = |k: usize, name: &str| -> Result<usize, GridFileError> {
        fields[k]
            .parse()
            .map_err(|_| GridFileError::format(1, format!("{name}: cannot parse {:?}", fields[k])))
    };
    Ok(Header {
        label: fields[2].to_string(),
        origin_lat: float(3, "origin_lat")?,
        origin_lon: float(4, "origin_lon")?,
        d_lat: float(5, "d_lat")?,
        d_lon: float(6, "d_lon")?,
        n_lat: count(7, "n_lat")?,
        n_lon: count(8, "n_lon")?,
    })
}

/// Reads any `ASFGRID v1` raster.
pub fn read_raster<R: BufRead>(source: R) -> Result<Raster, GridFileError> {
    let mut lines = source.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => parse_header(&line?)?,
        None => return Err(GridFileError::format(1, "empty file")),
    };
    let origin = GeoPoint::new(header.origin_lat, header.origin_lon)
        .map_err(|_| GridFileError::format(1, "origin outside lat/lon range"))?;

    let expected = header
        .n_lat
        .checked_mul(header.n_lon)
        .ok_or_else(|| GridFileError::format(1, "grid too large"))?;
    let mut values = Vec::with_capacity(expected.min(1 << 24));
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        rows += 1;
        if rows > header.n_lat {
            return Err(GridFileError::format(
                lineno,
                format!("more than the declared {} rows", header.n_lat),
            ));
        }
        let before = values.len();
        for token in trimmed.split_whitespace() {
            if token == NODATA {
                values.push(None);
                continue;
            }
            let v: f64 = token
                .parse()
                .map_err(|_| GridFileError::format(lineno, format!("cannot parse value {token:?}")))?;
            if !v.is_finite() {
                return Err(GridFileError::Value(format!(
                    "line {lineno}: non-finite value {token:?}"
                )));
            }
            values.push(Some(v));
        }
        let got = values.len() - before;
        if got != header.n_lon {
            return Err(GridFileError::format(
                lineno,
                format!("expected {} values, found {got}", header.n_lon),
            ));
        }
    }
    if rows != header.n_lat {
        return Err(GridFileError::format(
            rows + 1,
            format!("expected {} rows, found {rows}", header.n_lat),
        ));
    }
    Ok(Raster::new(
        header.label,
        origin,
        header.d_lat,
        header.d_lon,
        header.n_lat,
        header.n_lon,
        values,
    )?)
}

/// Reads a raster and checks it as an ASF map (microseconds, at least 2x2,
/// values within the sanity bound).
pub fn load_asf_map<R: BufRead>(source: R) -> Result<AsfMap, GridFileError> {
    Ok(AsfMap::try_from(read_raster(source)?)?)
}

/// Canonical text form. `f64` values use the shortest representation that
/// parses back to the same bits.
pub fn format_raster(raster: &Raster, units: &str) -> String {
    let mut out = String::with_capacity(raster.values().len() * 8 + 128);
    let o = raster.origin();
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {} {} {} {}",
        raster.label(),
        o.lat(),
        o.lon(),
        raster.d_lat(),
        raster.d_lon(),
        raster.n_lat(),
        raster.n_lon()
    );
    let _ = writeln!(out, "# units: {units}");
    for row in raster.values().chunks(raster.n_lon()) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            match v {
                Some(x) => {
                    let _ = write!(out, "{x}");
                }
                None => out.push_str(NODATA),
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_raster<W: Write>(raster: &Raster, units: &str, mut sink: W) -> io::Result<()> {
    sink.write_all(format_raster(raster, units).as_bytes())
}

pub fn write_asf_map<W: Write>(map: &AsfMap, sink: W) -> io::Result<()> {
    write_raster(map.raster(), "us", sink)
}
