//! Shared geometric primitives and the discretized trajectory representation.
//!
//! All quantities are SI: meters for positions and lengths, seconds for time
//! increments. The ground vehicle (the tether anchor) sits at the world origin
//! unless a scenario says otherwise.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack allowed between a stored tether length and the anchor-to-UAV chord.
pub const TETHER_CHORD_TOLERANCE: f64 = 1e-6;

/// A position in the world frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Horizontal (xy-plane) length of the vector.
    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, other: Point3, t: f64) -> Point3 {
        Point3::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t, self.z + (other.z - self.z) * t)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Point3, b: Point3) -> f64 {
    (a - b).norm()
}

/// One discretized trajectory state: UAV position, tether length and the
/// time increment from the previous state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajState {
    pub position: Point3,
    pub tether_length: f64,
    /// Zero for the first state of a trajectory.
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("non-finite value in state {index}")]
    NonFinite { index: usize },
    #[error("state {index}: dt = {dt} must be positive")]
    NonPositiveDt { index: usize, dt: f64 },
    #[error("state 0: dt = {dt} must be zero")]
    FirstDtNonZero { dt: f64 },
    #[error("state {index}: tether length {length} shorter than chord {chord}")]
    TetherTooShort { index: usize, length: f64, chord: f64 },
    #[error("trajectory needs at least 2 states, got {0}")]
    TooFewStates(usize),
}

impl TrajState {
    pub fn new(position: Point3, tether_length: f64, dt: f64) -> Self {
        Self { position, tether_length, dt }
    }

    /// Checks the state invariants; `index` 0 is the first state of its trajectory.
    pub fn validate(&self, anchor: Point3, index: usize) -> Result<(), StateError> {
        if !self.position.is_finite() || !self.tether_length.is_finite() || !self.dt.is_finite() {
            return Err(StateError::NonFinite { index });
        }
        if index == 0 {
            if self.dt != 0.0 {
                return Err(StateError::FirstDtNonZero { dt: self.dt });
            }
        } else if self.dt <= 0.0 {
            return Err(StateError::NonPositiveDt { index, dt: self.dt });
        }
        let chord = distance(self.position, anchor);
        if self.tether_length < chord - TETHER_CHORD_TOLERANCE {
            return Err(StateError::TetherTooShort { index, length: self.tether_length, chord });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    Initial,
    Optimized,
}

impl fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryKind::Initial => f.write_str("initial"),
            TrajectoryKind::Optimized => f.write_str("optimized"),
        }
    }
}

/// Ordered sequence of states from start to goal, with the anchor they hang from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<TrajState>,
    pub anchor: Point3,
    pub kind: TrajectoryKind,
}

impl Trajectory {
    pub fn new(states: Vec<TrajState>, anchor: Point3, kind: TrajectoryKind) -> Self {
        Self { states, anchor, kind }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Point3> + '_ {
        self.states.iter().map(|s| s.position)
    }

    /// Sum of the Euclidean segment lengths.
    pub fn path_length(&self) -> f64 {
        self.states.windows(2).map(|w| distance(w[0].position, w[1].position)).sum()
    }

    /// Sum of the time increments.
    pub fn duration(&self) -> f64 {
        self.states.iter().map(|s| s.dt).sum()
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.states.len() < 2 {
            return Err(StateError::TooFewStates(self.states.len()));
        }
        self.states.iter().enumerate().try_for_each(|(i, s)| s.validate(self.anchor, i))
    }
}
