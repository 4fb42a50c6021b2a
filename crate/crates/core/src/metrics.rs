//! Evaluation metrics for initial and optimized trajectories.

use std::fmt::Write as _;

use crate::catenary::{min_tether_clearance, tether_polyline};
use crate::geometry::{distance, Trajectory};
use crate::optimizer::residuals::residual_acceleration;
use crate::optimizer::OptConfig;
use crate::world::World;

/// Ratio of optimized to initial length above which inflation is flagged.
pub const LENGTH_INFLATION_LIMIT: f64 = 1.10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryMetrics {
    /// Sum of segment lengths, meters.
    pub length: f64,
    /// Sum of time increments, seconds.
    pub duration: f64,
    pub uav_clearance_mean: f64,
    pub uav_clearance_min: f64,
    pub tether_clearance_mean: f64,
    pub tether_clearance_min: f64,
    pub speed_mean: f64,
    pub speed_max: f64,
    /// Signed mean of the per-state acceleration.
    pub accel_mean: f64,
    pub accel_abs_mean: f64,
    /// Largest acceleration magnitude.
    pub accel_max: f64,
    /// Seconds spent producing the trajectory.
    pub compute_time: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Clearances and speeds are per state or per segment; the tether of every
/// state is discretized into `cfg.segments` pieces at `max(l, chord)`.
pub fn compute_metrics(t: &Trajectory, world: &World, cfg: &OptConfig) -> TrajectoryMetrics {
    let p: Vec<_> = t.positions().collect();
    let uav: Vec<f64> = p.iter().map(|&q| world.clearance(q)).collect();
    let tether: Vec<f64> = t
        .states
        .iter()
        .map(|s| {
            let length = s.tether_length.max(distance(t.anchor, s.position));
            tether_polyline(t.anchor, s.position, length, cfg.segments)
                .map_or(0.0, |poly| min_tether_clearance(&poly, world))
        })
        .collect();
    let speeds: Vec<f64> = (1..p.len()).map(|i| distance(p[i - 1], p[i]) / t.states[i].dt).collect();
    let accels: Vec<f64> = (1..p.len().saturating_sub(1))
        .map(|i| residual_acceleration(p[i - 1], p[i], p[i + 1], t.states[i].dt, t.states[i + 1].dt))
        .collect();
    let abs: Vec<f64> = accels.iter().map(|a| a.abs()).collect();
    TrajectoryMetrics {
        length: t.path_length(),
        duration: t.duration(),
        uav_clearance_mean: mean(&uav),
        uav_clearance_min: min(&uav),
        tether_clearance_mean: mean(&tether),
        tether_clearance_min: min(&tether),
        speed_mean: mean(&speeds),
        speed_max: max(&speeds),
        accel_mean: mean(&accels),
        accel_abs_mean: mean(&abs),
        accel_max: max(&abs),
        compute_time: 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub metric: &'static str,
    pub initial: f64,
    pub optimized: f64,
    pub delta: f64,
    /// `optimized / initial`; NaN when the initial value is zero.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    /// Optimized length exceeds `LENGTH_INFLATION_LIMIT` times the initial length.
    pub length_inflation: bool,
    /// Optimized minimum UAV clearance is below the initial one.
    pub clearance_regression: bool,
    /// Optimized minimum tether clearance is below the initial one.
    pub tether_clearance_regression: bool,
}

impl Comparison {
    pub fn report(&self) -> String {
        let mut out = format!("{:<22}{:>14}{:>14}{:>14}{:>10}\n", "metric", "initial", "optimized", "delta", "ratio");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<22}{:>14.4}{:>14.4}{:>14.4}{:>10.4}",
                r.metric, r.initial, r.optimized, r.delta, r.ratio
            );
        }
        let flag = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(out, "length inflation > 10%: {}", flag(self.length_inflation));
        let _ = writeln!(out, "uav clearance regression: {}", flag(self.clearance_regression));
        let _ = writeln!(out, "tether clearance regression: {}", flag(self.tether_clearance_regression));
        out
    }
}

pub fn compare(initial: &TrajectoryMetrics, optimized: &TrajectoryMetrics) -> Comparison {
    let pairs = [
        ("length", initial.length, optimized.length),
        ("duration", initial.duration, optimized.duration),
        ("uav_clearance_mean", initial.uav_clearance_mean, optimized.uav_clearance_mean),
        ("uav_clearance_min", initial.uav_clearance_min, optimized.uav_clearance_min),
        ("tether_clearance_mean", initial.tether_clearance_mean, optimized.tether_clearance_mean),
        ("tether_clearance_min", initial.tether_clearance_min, optimized.tether_clearance_min),
        ("speed_mean", initial.speed_mean, optimized.speed_mean),
        ("speed_max", initial.speed_max, optimized.speed_max),
        ("accel_mean", initial.accel_mean, optimized.accel_mean),
        ("accel_abs_mean", initial.accel_abs_mean, optimized.accel_abs_mean),
        ("accel_max", initial.accel_max, optimized.accel_max),
    ];
    let rows = pairs
        .into_iter()
        .map(|(metric, a, b)| CompareRow {
            metric,
            initial: a,
            optimized: b,
            delta: if a == b { 0.0 } else { b - a },
            ratio: if a == 0.0 { f64::NAN } else { b / a },
        })
        .collect();
    Comparison {
        rows,
        length_inflation: optimized.length > LENGTH_INFLATION_LIMIT * initial.length,
        clearance_regression: optimized.uav_clearance_min < initial.uav_clearance_min,
        tether_clearance_regression: optimized.tether_clearance_min < initial.tether_clearance_min,
    }
}

pub const CSV_HEADER: &str =
    "SIG,LIP,LTO,TIP,TOT,mean_DOI,min_DOI,mean_DOO,min_DOO,mean_DCOI,min_DCOI,mean_DCOO,min_DCOO,\
mean_VTO,max_VTO,mean_ATO,max_ATO,mean_abs_ATO,TCI,TCO";

/// One CSV row in `CSV_HEADER` order. Commas in `sig` are replaced by spaces.
pub fn csv_row(sig: &str, initial: &TrajectoryMetrics, optimized: &TrajectoryMetrics) -> String {
    let values = [
        initial.length,
        optimized.length,
        initial.duration,
        optimized.duration,
        initial.uav_clearance_mean,
        initial.uav_clearance_min,
        optimized.uav_clearance_mean,
        optimized.uav_clearance_min,
        initial.tether_clearance_mean,
        initial.tether_clearance_min,
        optimized.tether_clearance_mean,
        optimized.tether_clearance_min,
        optimized.speed_mean,
        optimized.speed_max,
        optimized.accel_mean,
        optimized.accel_max,
        optimized.accel_abs_mean,
        initial.compute_time,
        optimized.compute_time,
    ];
    let mut row = sig.replace(',', " ");
    for v in values {
        let _ = write!(row, ",{v:.6}");
    }
    row
}

pub fn metrics_csv(sig: &str, initial: &TrajectoryMetrics, optimized: &TrajectoryMetrics) -> String {
    format!("{CSV_HEADER}\n{}\n", csv_row(sig, initial, optimized))
}
