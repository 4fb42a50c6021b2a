//! Weighted nonlinear least-squares refinement of an initial trajectory.
//!
//! Every state contributes five variables `[x, y, z, l, dt]`. Seven factor
//! kinds couple consecutive states; their weighted squared residuals are
//! minimized with Levenberg-Marquardt on banded normal equations.

mod banded;
mod lm;
mod problem;
pub mod residuals;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catenary::DEFAULT_SEGMENTS;

pub use banded::BandedMatrix;
pub use lm::{solve, SolveOutcome, Termination, TraceRow};
pub use problem::{build_problem, total_cost, Factor, FactorKind, OptProblem, VARS_PER_STATE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptConfig {
    pub gamma_eq: f64,
    pub gamma_o: f64,
    pub gamma_theta: f64,
    pub gamma_t: f64,
    pub gamma_v: f64,
    pub gamma_a: f64,
    pub gamma_l: f64,
    /// Obstacle penalty growth, 1/m.
    pub beta: f64,
    /// Obstacle activation distance, meters.
    pub rho_o: f64,
    /// Safety distance in the obstacle exponent, meters.
    pub rho_a: f64,
    /// Tether clearance threshold, meters.
    pub rho_l: f64,
    /// Turn angle bound, radians.
    pub rho_theta: f64,
    /// Desired speed, m/s.
    pub rho_v: f64,
    pub max_iterations: usize,
    /// Tether discretization.
    pub segments: usize,
    /// Cap on the kinematics residual.
    pub kinematics_ceiling: f64,
    pub initial_damping: f64,
    pub damping_increase: f64,
    pub damping_decrease: f64,
    /// Rejected trial steps tolerated within one iteration.
    pub max_rejections: usize,
    /// Central finite-difference step, absolute.
    pub fd_step: f64,
    pub min_relative_decrease: f64,
    pub min_step_norm: f64,
    /// Lower clamp on time increments, seconds.
    pub dt_min: f64,
    /// Upper clamp on tether lengths, meters.
    pub l_max: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            gamma_eq: 0.6,
            gamma_o: 0.8,
            gamma_theta: 0.4,
            gamma_t: 0.005,
            gamma_v: 0.06,
            gamma_a: 1.0,
            gamma_l: 0.9,
            beta: 4.0,
            rho_o: 1.0,
            rho_a: 1.0,
            rho_l: 0.2,
            rho_theta: PI / 6.0,
            rho_v: 2.0,
            max_iterations: 100,
            segments: DEFAULT_SEGMENTS,
            kinematics_ceiling: 1e3,
            initial_damping: 1e-4,
            damping_increase: 2.0,
            damping_decrease: 3.0,
            max_rejections: 40,
            fd_step: 1e-6,
            min_relative_decrease: 1e-8,
            min_step_norm: 1e-10,
            dt_min: 1e-3,
            l_max: 20.0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        let weights = [
            ("gamma_eq", self.gamma_eq),
            ("gamma_o", self.gamma_o),
            ("gamma_theta", self.gamma_theta),
            ("gamma_t", self.gamma_t),
            ("gamma_v", self.gamma_v),
            ("gamma_a", self.gamma_a),
            ("gamma_l", self.gamma_l),
            ("beta", self.beta),
        ];
        for (name, v) in weights {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(OptError::InvalidConfig(format!("{name} must be non-negative, got {v}")));
            }
        }
        let positive = [
            ("rho_o", self.rho_o),
            ("rho_a", self.rho_a),
            ("rho_l", self.rho_l),
            ("rho_theta", self.rho_theta),
            ("rho_v", self.rho_v),
            ("kinematics_ceiling", self.kinematics_ceiling),
            ("initial_damping", self.initial_damping),
            ("fd_step", self.fd_step),
            ("dt_min", self.dt_min),
            ("l_max", self.l_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(OptError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.damping_increase <= 1.0 || self.damping_decrease <= 1.0 {
            return Err(OptError::InvalidConfig("damping factors must exceed 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(OptError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if self.segments < 2 {
            return Err(OptError::InvalidConfig("segments must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("trajectory has {0} states; at least 5 are required")]
    TooShort(usize),
    #[error("non-finite cost in {factor} at iteration {iteration}")]
    NumericalFailure { factor: String, iteration: usize },
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
}
