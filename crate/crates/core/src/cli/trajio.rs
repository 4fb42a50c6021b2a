//! Plain-text trajectory files: `#` header lines, then one `t x y z l` row per
//! state with `t` the cumulative time.

use std::fmt::Write as _;
use std::path::Path;

use crate::geometry::{Point3, TrajState, Trajectory, TrajectoryKind};

use super::CliError;

pub fn format_trajectory(t: &Trajectory) -> String {
    let a = t.anchor;
    let mut out = format!("# trajectory {}\n# anchor {} {} {}\n# t x y z l\n", t.kind, a.x, a.y, a.z);
    let mut time = 0.0;
    for s in &t.states {
        time += s.dt;
        let p = s.position;
        let _ = writeln!(out, "{} {} {} {} {}", time, p.x, p.y, p.z, s.tether_length);
    }
    out
}

fn numbers<const N: usize>(fields: &[&str], line: usize) -> Result<[f64; N], CliError> {
    if fields.len() != N {
        return Err(CliError::Parse(format!("line {line}: expected {N} numbers, found {}", fields.len())));
    }
    let mut out = [0.0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| CliError::Parse(format!("line {line}: bad number {f:?}")))?;
    }
    Ok(out)
}

pub fn parse_trajectory(src: &str) -> Result<Trajectory, CliError> {
    let mut anchor = Point3::ORIGIN;
    let mut kind = TrajectoryKind::Initial;
    let mut states = Vec::new();
    let mut last_t = 0.0;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if let Some(comment) = text.strip_prefix('#') {
            let fields: Vec<&str> = comment.split_whitespace().collect();
            match fields.first() {
                Some(&"anchor") => anchor = Point3::from_array(numbers::<3>(&fields[1..], line)?),
                Some(&"trajectory") if fields.get(1) == Some(&"optimized") => kind = TrajectoryKind::Optimized,
                _ => {}
            }
            continue;
        }
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [t, x, y, z, l] = numbers::<5>(&fields, line)?;
        let dt = if states.is_empty() { 0.0 } else { t - last_t };
        last_t = t;
        states.push(TrajState::new(Point3::new(x, y, z), l, dt));
    }
    let traj = Trajectory::new(states, anchor, kind);
    traj.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(traj)
}

pub fn write_trajectory(path: &Path, t: &Trajectory) -> Result<(), CliError> {
    std::fs::write(path, format_trajectory(t)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_trajectory(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn format_polyline(points: &[Point3]) -> String {
    let mut out = String::new();
    for p in points {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    out
}
