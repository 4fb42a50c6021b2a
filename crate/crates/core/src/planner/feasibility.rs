use crate::catenary::{min_tether_clearance, tether_polyline};
use crate::geometry::{distance, Point3};
use crate::world::World;

use super::PlannerConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherFeasibility {
    pub feasible: bool,
    /// Shortest collision-free length found; the last length tried when infeasible.
    pub length: f64,
}

/// True when some sample of the cable at length `length` is closer than the
/// clearance threshold to an obstacle.
pub fn catenary_in_collision(p: Point3, anchor: Point3, length: f64, cfg: &PlannerConfig, world: &World) -> bool {
    match tether_polyline(anchor, p, length, cfg.segments) {
        Ok(poly) => min_tether_clearance(&poly, world) < cfg.tether_clearance_min,
        Err(_) => true,
    }
}

/// Starts from the taut length and pays out `eps_l` at a time while the cable
/// collides and the length stays below `l_max`.
pub fn check_catenary_feasibility(p: Point3, anchor: Point3, cfg: &PlannerConfig, world: &World) -> TetherFeasibility {
    let mut length = distance(p, anchor);
    while catenary_in_collision(p, anchor, length, cfg, world) && length < cfg.l_max {
        length += cfg.eps_l;
    }
    TetherFeasibility { feasible: length < cfg.l_max, length }
}
