//! Text formats for worlds.
//!
//! Grid file:
//!
//! ```text
//! occgrid v1
//! resolution 0.2
//! origin -2 -4 0
//! dims 70 40 25
//! 1200 0
//! 3 1
//! ...
//! ```
//!
//! After the header, each line is a run `<count> <0|1>` over cells in x-fastest,
//! then y, then z order; the runs must cover exactly `nx * ny * nz` cells.
//!
//! Cloud file: one `x y z` triple per line. Blank lines and anything after `#`
//! are ignored in both formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::geometry::Point3;

use super::{OccupancyGrid, WorldError};

pub const GRID_MAGIC: &str = "occgrid v1";

struct Line<'a> {
    number: usize,
    offset: usize,
    text: &'a str,
}

/// Non-empty lines with comments stripped, tagged with 1-based line numbers and byte offsets.
fn content_lines(src: &str) -> impl Iterator<Item = Line<'_>> {
    let mut offset = 0;
    src.split_inclusive('\n').enumerate().filter_map(move |(i, raw)| {
        let start = offset;
        offset += raw.len();
        let text = raw.split('#').next().unwrap_or("").trim();
        (!text.is_empty()).then_some(Line { number: i + 1, offset: start, text })
    })
}

struct Parser<'a> {
    path: &'a str,
    len: usize,
    last_line: usize,
}

impl Parser<'_> {
    fn err(&self, line: &Line<'_>, message: impl Into<String>) -> WorldError {
        WorldError::Parse {
            path: self.path.to_string(),
            line: line.number,
            offset: line.offset,
            message: message.into(),
        }
    }

    fn eof(&self, message: impl Into<String>) -> WorldError {
        WorldError::Parse {
            path: self.path.to_string(),
            line: self.last_line,
            offset: self.len,
            message: format!("unexpected end of file: {}", message.into()),
        }
    }

    fn numbers<T: std::str::FromStr>(&self, line: &Line<'_>, fields: &[&str]) -> Result<Vec<T>, WorldError> {
        fields.iter().map(|f| f.parse::<T>().map_err(|_| self.err(line, format!("invalid number `{f}`")))).collect()
    }
}

pub fn parse_grid(src: &str, path: &str) -> Result<OccupancyGrid, WorldError> {
    let parser = Parser { path, len: src.len(), last_line: src.lines().count().max(1) };
    let mut lines = content_lines(src);

    let magic = lines.next().ok_or_else(|| parser.eof("missing `occgrid v1` header"))?;
    if magic.text != GRID_MAGIC {
        return Err(parser.err(&magic, format!("expected `{GRID_MAGIC}`, found `{}`", magic.text)));
    }

    let mut header = |key: &str| -> Result<(Vec<f64>, Line<'_>), WorldError> {
        let line = lines.next().ok_or_else(|| parser.eof(format!("missing `{key}` header")))?;
        let mut fields = line.text.split_whitespace();
        if fields.next() != Some(key) {
            return Err(parser.err(&line, format!("expected `{key}` header")));
        }
        let rest: Vec<&str> = fields.collect();
        if key == "dims" {
            let ints: Vec<usize> = parser.numbers(&line, &rest)?;
            return Ok((ints.into_iter().map(|v| v as f64).collect(), line));
        }
        Ok((parser.numbers(&line, &rest)?, line))
    };

    let (res, _) = header("resolution")?;
    let (origin, _) = header("origin")?;
    let (dims, _) = header("dims")?;
    if res.len() != 1 {
        return Err(WorldError::DimensionMismatch(format!("resolution needs 1 value, got {}", res.len())));
    }
    if origin.len() != 3 {
        return Err(WorldError::DimensionMismatch(format!("origin needs 3 values, got {}", origin.len())));
    }
    if dims.len() != 3 {
        return Err(WorldError::DimensionMismatch(format!("dims needs 3 values, got {}", dims.len())));
    }
    let dims = [dims[0] as usize, dims[1] as usize, dims[2] as usize];
    let mut grid = OccupancyGrid::new(res[0], Point3::new(origin[0], origin[1], origin[2]), dims)?;
    let total = grid.cells().len();

    let mut cells = Vec::with_capacity(total);
    for line in lines {
        let fields: Vec<&str> = line.text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parser.err(&line, "run must be `<count> <0|1>`"));
        }
        let count: usize =
            fields[0].parse().map_err(|_| parser.err(&line, format!("invalid count `{}`", fields[0])))?;
        let value = match fields[1] {
            "0" => false,
            "1" => true,
            other => return Err(parser.err(&line, format!("cell value must be 0 or 1, found `{other}`"))),
        };
        if cells.len() + count > total {
            return Err(parser.err(&line, format!("runs exceed the {total} cells declared by dims")));
        }
        cells.resize(cells.len() + count, value);
    }
    if cells.len() < total {
        return Err(parser.eof(format!("runs cover {} of {} cells", cells.len(), total)));
    }
    grid = OccupancyGrid::from_cells(grid.resolution(), grid.origin(), dims, cells)?;
    Ok(grid)
}

pub fn parse_cloud(src: &str, path: &str) -> Result<Vec<Point3>, WorldError> {
    let parser = Parser { path, len: src.len(), last_line: 0 };
    content_lines(src)
        .map(|line| {
            let fields: Vec<&str> = line.text.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parser.err(&line, format!("expected `x y z`, found {} fields", fields.len())));
            }
            let v: Vec<f64> = parser.numbers(&line, &fields)?;
            let p = Point3::new(v[0], v[1], v[2]);
            if !p.is_finite() {
                return Err(parser.err(&line, "non-finite coordinate"));
            }
            Ok(p)
        })
        .collect()
}

pub fn write_grid(grid: &OccupancyGrid, mut out: impl Write) -> std::io::Result<()> {
    let o = grid.origin();
    let d = grid.dims();
    writeln!(out, "{GRID_MAGIC}")?;
    writeln!(out, "resolution {}", grid.resolution())?;
    writeln!(out, "origin {} {} {}", o.x, o.y, o.z)?;
    writeln!(out, "dims {} {} {}", d[0], d[1], d[2])?;
    let cells = grid.cells();
    let mut i = 0;
    while i < cells.len() {
        let v = cells[i];
        let run = cells[i..].iter().take_while(|&&c| c == v).count();
        writeln!(out, "{} {}", run, u8::from(v))?;
        i += run;
    }
    Ok(())
}

pub fn write_cloud(points: &[Point3], mut out: impl Write) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "{} {} {}", p.x, p.y, p.z)?;
    }
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String, WorldError> {
    fs::read_to_string(path).map_err(|source| WorldError::Io { path: path.display().to_string(), source })
}

pub fn read_grid_file(path: impl AsRef<Path>) -> Result<OccupancyGrid, WorldError> {
    let path = path.as_ref();
    parse_grid(&read_to_string(path)?, &path.display().to_string())
}

pub fn read_cloud_file(path: impl AsRef<Path>) -> Result<Vec<Point3>, WorldError> {
    let path = path.as_ref();
    parse_cloud(&read_to_string(path)?, &path.display().to_string())
}

pub fn write_grid_file(grid: &OccupancyGrid, path: impl AsRef<Path>) -> Result<(), WorldError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_grid(grid, &mut buf)
        .and_then(|_| fs::write(path, buf))
        .map_err(|source| WorldError::Io { path: path.display().to_string(), source })
}

pub fn write_cloud_file(points: &[Point3], path: impl AsRef<Path>) -> Result<(), WorldError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_cloud(points, &mut buf)
        .and_then(|_| fs::write(path, buf))
        .map_err(|source| WorldError::Io { path: path.display().to_string(), source })
}
