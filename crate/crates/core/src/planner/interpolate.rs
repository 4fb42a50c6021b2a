use crate::geometry::{distance, Point3, TrajState, Trajectory, TrajectoryKind};
use crate::world::World;

use super::{check_catenary_feasibility, PlanError, PlannerConfig};

/// Subdivides each way-point segment into equal pieces no longer than
/// `interp_spacing`, assigns every state its shortest collision-free tether
/// length and stamps time increments at constant speed `v_init`.
///
/// If some inserted state has no feasible tether length, the interpolation is
/// retried once at half the spacing before giving up.
pub fn interpolate_path(
    waypoints: &[Point3],
    anchor: Point3,
    cfg: &PlannerConfig,
    world: &World,
) -> Result<Trajectory, PlanError> {
    cfg.validate()?;
    match interpolate_with_spacing(waypoints, anchor, cfg, world, cfg.interp_spacing) {
        Err(PlanError::InfeasibleInterpolant { .. }) => {
            interpolate_with_spacing(waypoints, anchor, cfg, world, cfg.interp_spacing / 2.0)
        }
        other => other,
    }
}

fn subdivide(waypoints: &[Point3], spacing: f64) -> Vec<Point3> {
    let mut points = Vec::new();
    if let Some(&first) = waypoints.first() {
        points.push(first);
    }
    for w in waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = distance(a, b);
        if len == 0.0 {
            continue;
        }
        let pieces = ((len / spacing) - 1e-9).ceil().max(1.0) as usize;
        for j in 1..pieces {
            points.push(a.lerp(b, j as f64 / pieces as f64));
        }
        points.push(b);
    }
    points
}

fn interpolate_with_spacing(
    waypoints: &[Point3],
    anchor: Point3,
    cfg: &PlannerConfig,
    world: &World,
    spacing: f64,
) -> Result<Trajectory, PlanError> {
    let points = subdivide(waypoints, spacing);
    let mut states = Vec::with_capacity(points.len());
    for (index, &point) in points.iter().enumerate() {
        let tether_length = if cfg.tether_aware {
            let f = check_catenary_feasibility(point, anchor, cfg, world);
            if !f.feasible {
                return Err(PlanError::InfeasibleInterpolant { index, point });
            }
            f.length
        } else {
            distance(point, anchor)
        };
        let dt = if index == 0 { 0.0 } else { distance(points[index - 1], point) / cfg.v_init };
        states.push(TrajState::new(point, tether_length, dt));
    }
    Ok(Trajectory::new(states, anchor, TrajectoryKind::Initial))
}
