//! Initial trajectory construction: tether-aware Lazy Theta* over the
//! occupancy grid, interpolation at a fixed spacing, and constant-velocity
//! time stamps.

mod feasibility;
mod interpolate;
mod lazy_theta;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catenary::DEFAULT_SEGMENTS;
use crate::geometry::{Point3, Trajectory};
use crate::world::World;

pub use feasibility::{catenary_in_collision, check_catenary_feasibility, TetherFeasibility};
pub use interpolate::interpolate_path;
pub use lazy_theta::{plan_path, PathNode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Maximum tether length, meters.
    pub l_max: f64,
    /// Tether length increment while searching for a collision-free length, meters.
    pub eps_l: f64,
    /// Minimum clearance between any tether sample and the obstacle cloud, meters.
    pub tether_clearance_min: f64,
    /// Maximum distance between consecutive interpolated states, meters.
    pub interp_spacing: f64,
    /// Speed of the constant-velocity time model, m/s.
    pub v_init: f64,
    /// Tether discretization used for clearance checks.
    pub segments: usize,
    /// When false the search ignores the tether (UAV-only planning).
    pub tether_aware: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            l_max: 20.0,
            eps_l: 0.05,
            tether_clearance_min: 0.2,
            interp_spacing: 0.5,
            v_init: 2.0,
            segments: DEFAULT_SEGMENTS,
            tether_aware: true,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        let positive = [
            ("l_max", self.l_max),
            ("eps_l", self.eps_l),
            ("tether_clearance_min", self.tether_clearance_min),
            ("interp_spacing", self.interp_spacing),
            ("v_init", self.v_init),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PlanError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.eps_l >= self.l_max {
            return Err(PlanError::InvalidConfig("eps_l must be smaller than l_max".into()));
        }
        if self.segments < 2 {
            return Err(PlanError::InvalidConfig("segments must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("start {0} is not a feasible state")]
    StartInfeasible(Point3),
    #[error("goal {0} is not a feasible state")]
    GoalInfeasible(Point3),
    #[error("no path: open set exhausted after {expanded} expansions")]
    NoPath { expanded: usize },
    #[error("interpolated state {index} at {point} has no collision-free tether length")]
    InfeasibleInterpolant { index: usize, point: Point3 },
    #[error("invalid planner configuration: {0}")]
    InvalidConfig(String),
}

/// Plans way-points and turns them into a time-stamped initial trajectory.
pub fn plan_initial_trajectory(
    start: Point3,
    goal: Point3,
    anchor: Point3,
    cfg: &PlannerConfig,
    world: &World,
) -> Result<Trajectory, PlanError> {
    let waypoints = plan_path(start, goal, anchor, cfg, world)?;
    interpolate_path(&waypoints, anchor, cfg, world)
}
