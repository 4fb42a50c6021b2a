//! Hanging-tether model.
//!
//! A cable of length `L` hanging between the anchor `A` and the UAV `B` lies in
//! the vertical plane through both points. With `s` the horizontal coordinate
//! along that plane (0 at `A`, `d` at `B`) and heights measured from `A`:
//!
//! ```text
//! z(s) = a * cosh((s - x0) / a) + z0
//! sqrt(L^2 - h^2) = 2a * sinh(d / 2a)        (solved for a by bisection)
//! x0 = d/2 - a * atanh(h / L),   z0 = -a * cosh(x0 / a)
//! ```
//!
//! where `h` is the height of `B` above `A`. Two degenerate cases get their own
//! shapes: a taut cable (length within a relative 1e-6 of the chord) is the
//! straight segment, and a nearly vertical cable (horizontal separation below
//! 1e-4 m) is modeled as a doubled vertical line.

use thiserror::Error;

use crate::geometry::{distance, Point3};
use crate::world::World;

/// Default cable discretization.
pub const DEFAULT_SEGMENTS: usize = 64;
/// Default bisection tolerance on the scale parameter and on the residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Lengths up to `chord * (1 + TAUT_SLACK)` are treated as a straight segment.
pub const TAUT_SLACK: f64 = 1e-6;
/// Horizontal separations below this use the vertical model.
pub const VERTICAL_THRESHOLD: f64 = 1e-4;

const INITIAL_BRACKET: (f64, f64) = (1e-3, 1e4);
const MAX_BISECTION_ITERATIONS: usize = 200;
const MAX_BRACKET_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatenaryError {
    #[error("tether length {length} is shorter than the chord {chord}")]
    InvalidLength { length: f64, chord: f64 },
    #[error("could not bracket the catenary parameter (span {span}, rise {rise}, length {length})")]
    NoConvergence { span: f64, rise: f64, length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatenaryShape {
    /// Straight segment between the anchors.
    Taut,
    /// Cable hanging straight down to `low_z` and back up.
    Vertical { low_z: f64 },
    Hanging {
        /// Scale parameter `a`, in meters.
        param_a: f64,
        x0: f64,
        z0: f64,
        /// Residual height mismatch at `s = d`, spread linearly along the span.
        end_correction: f64,
    },
}

/// Solved cable between two anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catenary {
    pub anchor_a: Point3,
    pub anchor_b: Point3,
    pub length: f64,
    /// Unit horizontal direction from `anchor_a` toward `anchor_b`.
    pub direction: (f64, f64),
    /// Horizontal separation `d`.
    pub span: f64,
    /// Height of `anchor_b` above `anchor_a`.
    pub rise: f64,
    pub shape: CatenaryShape,
}

/// Ordered cable sample points from `anchor_a` to `anchor_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TetherPolyline {
    pub points: Vec<Point3>,
}

impl TetherPolyline {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| distance(w[0], w[1])).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Solves the cable shape between `a` and `b` for the given length.
pub fn solve_catenary(a: Point3, b: Point3, length: f64, tol: f64) -> Result<Catenary, CatenaryError> {
    let chord = distance(a, b);
    if !(length >= chord - tol) || !length.is_finite() {
        return Err(CatenaryError::InvalidLength { length, chord });
    }
    let delta = b - a;
    let span = delta.horizontal_norm();
    let rise = delta.z;
    let direction = if span > 0.0 { (delta.x / span, delta.y / span) } else { (1.0, 0.0) };
    let mut cat = Catenary { anchor_a: a, anchor_b: b, length, direction, span, rise, shape: CatenaryShape::Taut };

    if length <= chord * (1.0 + TAUT_SLACK) {
        return Ok(cat);
    }
    if span < VERTICAL_THRESHOLD {
        let low_z = a.z.min(b.z) - (length - rise.abs()) / 2.0;
        cat.shape = CatenaryShape::Vertical { low_z };
        return Ok(cat);
    }

    let param_a = solve_scale_parameter(span, rise, length, tol)?;
    let x0 = span / 2.0 - param_a * (rise / length).atanh();
    let z0 = -param_a * (x0 / param_a).cosh();
    let raw_end = param_a * ((span - x0) / param_a).cosh() + z0;
    cat.shape = CatenaryShape::Hanging { param_a, x0, z0, end_correction: rise - raw_end };
    Ok(cat)
}

/// Root of `2a sinh(d / 2a) = sqrt(L^2 - h^2)` by bisection. The left side
/// decreases monotonically in `a`, so the root is unique once bracketed.
fn solve_scale_parameter(span: f64, rise: f64, length: f64, tol: f64) -> Result<f64, CatenaryError> {
    let target = (length * length - rise * rise).sqrt();
    let residual = |a: f64| 2.0 * a * (span / (2.0 * a)).sinh() - target;
    let fail = || CatenaryError::NoConvergence { span, rise, length };

    let (mut lo, mut hi) = INITIAL_BRACKET;
    let mut expansions = 0;
    while residual(lo) <= 0.0 {
        lo /= 10.0;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(fail());
        }
    }
    while residual(hi) >= 0.0 {
        hi *= 10.0;
        expansions += 1;
        if expansions > MAX_BRACKET_EXPANSIONS {
            return Err(fail());
        }
    }

    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid);
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol && r.abs() <= tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl Catenary {
    pub fn chord(&self) -> f64 {
        distance(self.anchor_a, self.anchor_b)
    }

    pub fn param_a(&self) -> Option<f64> {
        match self.shape {
            CatenaryShape::Hanging { param_a, .. } => Some(param_a),
            _ => None,
        }
    }

    /// Height above `anchor_a` at horizontal plane coordinate `s` (hanging shape only).
    fn height(&self, s: f64) -> f64 {
        match self.shape {
            CatenaryShape::Hanging { param_a, x0, z0, end_correction } => {
                param_a * ((s - x0) / param_a).cosh() + z0 + end_correction * s / self.span
            }
            CatenaryShape::Taut => self.rise * if self.span > 0.0 { s / self.span } else { 0.0 },
            CatenaryShape::Vertical { .. } => 0.0,
        }
    }

    fn plane_point(&self, s: f64, z: f64) -> Point3 {
        Point3::new(self.anchor_a.x + self.direction.0 * s, self.anchor_a.y + self.direction.1 * s, self.anchor_a.z + z)
    }

    /// Curve point at horizontal plane coordinate `s` in `[0, span]`.
    /// For the vertical shape, `s / span` is read as the arc-length fraction.
    pub fn point_at(&self, s: f64) -> Point3 {
        match self.shape {
            CatenaryShape::Vertical { low_z } => {
                let t = if self.span > 0.0 { s / self.span } else { 0.0 };
                self.vertical_point(t, low_z)
            }
            _ => self.plane_point(s, self.height(s)),
        }
    }

    fn vertical_point(&self, t: f64, low_z: f64) -> Point3 {
        let (a, b) = (self.anchor_a, self.anchor_b);
        let down = a.z - low_z;
        let along = t * self.length;
        let z = if along <= down { a.z - along } else { low_z + (along - down) };
        Point3::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, z)
    }

    /// Lowest height reached by the cable.
    pub fn lowest_z(&self) -> f64 {
        let ends = self.anchor_a.z.min(self.anchor_b.z);
        match self.shape {
            CatenaryShape::Taut => ends,
            CatenaryShape::Vertical { low_z } => low_z,
            CatenaryShape::Hanging { x0, .. } => {
                if x0 > 0.0 && x0 < self.span {
                    (self.anchor_a.z + self.height(x0)).min(ends)
                } else {
                    ends
                }
            }
        }
    }

    /// Closed-form arc length of the hanging curve; equals `length` for the other shapes.
    pub fn analytic_arc_length(&self) -> f64 {
        match self.shape {
            CatenaryShape::Hanging { param_a, x0, .. } => {
                param_a * ((self.span - x0) / param_a).sinh() + param_a * (x0 / param_a).sinh()
            }
            CatenaryShape::Taut => self.chord(),
            CatenaryShape::Vertical { .. } => self.length,
        }
    }

    /// `m` points at equal horizontal intervals (equal arc-length fractions for
    /// the vertical shape), endpoints exact. `m` below 2 is raised to 2; a
    /// zero-length cable at its own anchor yields a single point.
    pub fn discretize(&self, m: usize) -> TetherPolyline {
        let m = m.max(2);
        if self.anchor_a == self.anchor_b && self.length == 0.0 {
            return TetherPolyline { points: vec![self.anchor_a] };
        }
        let last = (m - 1) as f64;
        let mut points: Vec<Point3> = match self.shape {
            CatenaryShape::Taut => (0..m).map(|j| self.anchor_a.lerp(self.anchor_b, j as f64 / last)).collect(),
            CatenaryShape::Vertical { low_z } => (0..m).map(|j| self.vertical_point(j as f64 / last, low_z)).collect(),
            CatenaryShape::Hanging { .. } => (0..m).map(|j| self.point_at(self.span * j as f64 / last)).collect(),
        };
        points[0] = self.anchor_a;
        points[m - 1] = self.anchor_b;
        TetherPolyline { points }
    }
}

/// Cable model for anchors closer than the vertical threshold horizontally:
/// from `a` straight down to `(length - |h|) / 2` below the lower anchor, then
/// up to `b`.
pub fn vertical_degenerate(a: Point3, b: Point3, length: f64, m: usize) -> TetherPolyline {
    let rise = b.z - a.z;
    let low_z = a.z.min(b.z) - (length - rise.abs()).max(0.0) / 2.0;
    let span = (b - a).horizontal_norm();
    let direction = if span > 0.0 { ((b.x - a.x) / span, (b.y - a.y) / span) } else { (1.0, 0.0) };
    Catenary { anchor_a: a, anchor_b: b, length, direction, span, rise, shape: CatenaryShape::Vertical { low_z } }
        .discretize(m)
}

/// Solves and discretizes the cable from `anchor` to `uav`.
pub fn tether_polyline(anchor: Point3, uav: Point3, length: f64, m: usize) -> Result<TetherPolyline, CatenaryError> {
    Ok(solve_catenary(anchor, uav, length, DEFAULT_TOLERANCE)?.discretize(m))
}

/// Smallest obstacle clearance over the polyline points, `+inf` without obstacles.
pub fn min_tether_clearance(tether: &TetherPolyline, world: &World) -> f64 {
    tether.points.iter().map(|&p| world.clearance(p)).fold(f64::INFINITY, f64::min)
}
