//! Trajectory planning for a UAV tethered to a static ground vehicle.
//!
//! The tether is a hanging catenary whose length is a decision variable. A
//! tether-aware Lazy Theta* search produces a feasible initial path, which is
//! then refined by sparse weighted nonlinear least squares over positions,
//! tether lengths and time increments.

pub mod catenary;
pub mod cli;
pub mod geometry;
pub mod metrics;
pub mod optimizer;
pub mod planner;
pub mod world;

pub use geometry::{distance, Point3, TrajState, Trajectory, TrajectoryKind};
