//! Unweighted residuals of the seven cost terms.

use crate::catenary::{min_tether_clearance, tether_polyline};
use crate::geometry::{distance, Point3};
use crate::world::World;

use super::OptConfig;

/// Deviation of three consecutive segment lengths from their mean. The
/// components always sum to zero.
pub fn residual_equidistance(p0: Point3, p1: Point3, p2: Point3, p3: Point3) -> [f64; 3] {
    let d = [distance(p0, p1), distance(p1, p2), distance(p2, p3)];
    let mean = (d[0] + d[1] + d[2]) / 3.0;
    [mean - d[0], mean - d[1], mean - d[2]]
}

/// Obstacle penalty for a UAV at clearance `d`: `exp(rho_a - beta d)` inside
/// the activation distance `rho_o`, zero outside. Continuous only where
/// `exp(rho_a - beta rho_o)` vanishes, which it does not in general.
pub fn obstacle_penalty(d: f64, cfg: &OptConfig) -> f64 {
    if d < cfg.rho_o {
        (cfg.rho_a - cfg.beta * d).exp()
    } else {
        0.0
    }
}

pub fn residual_uav_obstacle(p: Point3, world: &World, cfg: &OptConfig) -> f64 {
    obstacle_penalty(world.clearance(p), cfg)
}

/// True when the turn at `p1` exceeds `rho_theta`. Coincident points never count as a turn.
pub fn turn_exceeds_bound(p0: Point3, p1: Point3, p2: Point3, cfg: &OptConfig) -> bool {
    let (u, v) = (p1 - p0, p2 - p1);
    let norms = u.norm() * v.norm();
    if norms == 0.0 {
        return false;
    }
    let cos = (u.dot(v) / norms).clamp(-1.0, 1.0);
    cos.acos() > cfg.rho_theta
}

/// `1 / |u . v|` capped at `kinematics_ceiling`, where `u` and `v` are the
/// segments meeting at `p1`; callers decide whether the turn is active.
pub fn turn_penalty(p0: Point3, p1: Point3, p2: Point3, cfg: &OptConfig) -> f64 {
    let dot = (p1 - p0).dot(p2 - p1).abs();
    if dot * cfg.kinematics_ceiling <= 1.0 {
        cfg.kinematics_ceiling
    } else {
        1.0 / dot
    }
}

pub fn residual_kinematics(p0: Point3, p1: Point3, p2: Point3, cfg: &OptConfig) -> f64 {
    if turn_exceeds_bound(p0, p1, p2, cfg) {
        turn_penalty(p0, p1, p2, cfg)
    } else {
        0.0
    }
}

/// Deviation of a time increment from its initial value.
pub fn residual_time(dt: f64, dt0: f64) -> f64 {
    dt0 - dt
}

/// Segment speed minus the desired speed.
pub fn residual_velocity(p: Point3, p_next: Point3, dt_next: f64, cfg: &OptConfig) -> f64 {
    distance(p, p_next) / dt_next - cfg.rho_v
}

/// Change of speed across `p1`, divided by the two time increments.
pub fn residual_acceleration(p0: Point3, p1: Point3, p2: Point3, dt: f64, dt_next: f64) -> f64 {
    let v_prev = distance(p0, p1) / dt;
    let v_next = distance(p1, p2) / dt_next;
    (v_next - v_prev) / (dt + dt_next)
}

/// Whether the cable from `anchor` to `p`, at `length` (raised to the chord if
/// shorter), passes closer than `rho_l` to an obstacle.
pub fn tether_collides(p: Point3, length: f64, anchor: Point3, world: &World, cfg: &OptConfig) -> bool {
    let length = length.max(distance(p, anchor));
    match tether_polyline(anchor, p, length, cfg.segments) {
        Ok(poly) => min_tether_clearance(&poly, world) < cfg.rho_l,
        Err(_) => true,
    }
}

/// Tether residual for a known collision state: a steep penalty favoring
/// longer cables while colliding, otherwise the slack beyond the chord.
pub fn tether_penalty(p: Point3, length: f64, anchor: Point3, collides: bool) -> [f64; 2] {
    let chord = distance(p, anchor);
    if collides {
        [1e4 * (10.0 * (chord - length)).exp(), 0.0]
    } else {
        [0.0, length - chord]
    }
}

pub fn residual_tether(p: Point3, length: f64, anchor: Point3, world: &World, cfg: &OptConfig) -> [f64; 2] {
    tether_penalty(p, length, anchor, tether_collides(p, length, anchor, world, cfg))
}
