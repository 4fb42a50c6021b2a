//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls the code it checks beyond building
//! inputs.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tetherplan::catenary::tether_polyline;
use tetherplan::optimizer::OptConfig;
use tetherplan::world::{Cell, ObstacleCloud, OccupancyGrid, World};
use tetherplan::{Point3, TrajState, Trajectory, TrajectoryKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: Point3, hi: Point3) -> Point3 {
    Point3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z))
}

pub fn dist(a: Point3, b: Point3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Catenary parameter by bisection on `ln a` over `[1e-8, 1e8]` for
/// `2 a sinh(span / 2a) = sqrt(L^2 - rise^2)`, 200 halvings.
pub fn catenary_root(span: f64, rise: f64, length: f64) -> f64 {
    let target = (length * length - rise * rise).sqrt();
    let f = |a: f64| 2.0 * a * (span / (2.0 * a)).sinh() - target;
    let (mut lo, mut hi) = ((1e-8f64).ln(), (1e8f64).ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // f decreases in a: too long a curve means a is too small
        let v = f(mid.exp());
        if v.is_infinite() || v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Exhaustive nearest point.
pub fn brute_nearest(points: &[Point3], q: Point3) -> Option<(f64, Point3)> {
    let mut best: Option<(f64, Point3)> = None;
    for &p in points {
        let d = dist(p, q);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, p));
        }
    }
    best
}

pub fn brute_clearance(points: &[Point3], q: Point3) -> f64 {
    brute_nearest(points, q).map_or(f64::INFINITY, |(d, _)| d)
}

/// Minimum clearance of the cable at `length`, scanning every sample against
/// every obstacle point.
pub fn tether_clearance(points: &[Point3], anchor: Point3, p: Point3, length: f64, segments: usize) -> f64 {
    let poly = tether_polyline(anchor, p, length, segments).expect("cable solves");
    poly.points.iter().map(|&s| brute_clearance(points, s)).fold(f64::INFINITY, f64::min)
}

/// Shortest collision-free cable length on a grid of `step` above the chord,
/// `None` if nothing below `l_max` clears.
pub fn sweep_min_length(
    points: &[Point3],
    anchor: Point3,
    p: Point3,
    threshold: f64,
    l_max: f64,
    step: f64,
    segments: usize,
) -> Option<f64> {
    let chord = dist(anchor, p);
    let mut k = 0usize;
    loop {
        let l = chord + k as f64 * step;
        if l >= l_max {
            return None;
        }
        if tether_clearance(points, anchor, p, l, segments) >= threshold {
            return Some(l);
        }
        k += 1;
    }
}

/// Cells containing samples of the segment every `step`.
pub fn sampled_cells(grid: &OccupancyGrid, a: Point3, b: Point3, step: f64) -> Vec<Cell> {
    let n = (dist(a, b) / step).ceil().max(1.0) as usize;
    let mut cells: Vec<Cell> = (0..=n).map(|k| grid.cell_of(a.lerp(b, k as f64 / n as f64))).collect();
    cells.sort();
    cells.dedup();
    cells
}

pub fn sampled_line_of_sight(grid: &OccupancyGrid, a: Point3, b: Point3, step: f64) -> bool {
    sampled_cells(grid, a, b, step).into_iter().all(|c| !grid.is_cell_occupied(c))
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// 26-connected Dijkstra between cell centers of free cells, followed by
/// greedy line-of-sight shortcutting. Returns the smoothed way-points with the
/// exact endpoints substituted for their cell centers.
pub fn dijkstra_smoothed(grid: &OccupancyGrid, start: Point3, goal: Point3) -> Option<Vec<Point3>> {
    let [nx, ny, nz] = grid.dims();
    let index = |c: Cell| grid.linear_index(c);
    let s = index(grid.cell_of(start))?;
    let g = index(grid.cell_of(goal))?;
    let mut best: HashMap<usize, (f64, usize)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(s, (0.0, s));
    heap.push(Entry(0.0, s));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > best[&u].0 {
            continue;
        }
        if u == g {
            break;
        }
        let c = grid.cell_from_index(u);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let n = [c[0] + dx, c[1] + dy, c[2] + dz];
                    if n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= nx as i64 || n[1] >= ny as i64 || n[2] >= nz as i64 {
                        continue;
                    }
                    if grid.is_cell_occupied(n) {
                        continue;
                    }
                    let v = index(n).unwrap();
                    let nd = d + grid.resolution() * ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
                    if best.get(&v).is_none_or(|&(old, _)| nd < old) {
                        best.insert(v, (nd, u));
                        heap.push(Entry(nd, v));
                    }
                }
            }
        }
    }
    best.get(&g)?;
    let mut chain = vec![g];
    while *chain.last().unwrap() != s {
        chain.push(best[chain.last().unwrap()].1);
    }
    chain.reverse();
    let mut raw: Vec<Point3> = chain.iter().map(|&i| grid.cell_center(grid.cell_from_index(i))).collect();
    raw[0] = start;
    *raw.last_mut().unwrap() = goal;

    let mut out = vec![raw[0]];
    let mut i = 0;
    while i + 1 < raw.len() {
        let mut j = raw.len() - 1;
        while j > i + 1 && !sampled_line_of_sight(grid, raw[i], raw[j], grid.resolution() / 10.0) {
            j -= 1;
        }
        out.push(raw[j]);
        i = j;
    }
    Some(out)
}

pub fn polyline_length(points: &[Point3]) -> f64 {
    points.windows(2).map(|w| dist(w[0], w[1])).sum()
}

pub fn empty_world(resolution: f64, origin: Point3, dims: [usize; 3]) -> World {
    World::new(OccupancyGrid::new(resolution, origin, dims).unwrap(), ObstacleCloud::new(vec![]))
}

/// Trajectory through `points` at constant `speed` with taut tethers.
pub fn constant_speed(points: &[Point3], anchor: Point3, speed: f64) -> Trajectory {
    let states = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let dt = if i == 0 { 0.0 } else { dist(points[i - 1], p) / speed };
            TrajState::new(p, dist(p, anchor), dt)
        })
        .collect();
    Trajectory::new(states, anchor, TrajectoryKind::Initial)
}

/// Weighted sum of squared residuals over every factor window, computed
/// directly from the flattened `[x y z l dt]` state vector.
pub fn naive_cost(x: &[f64], dt0: &[f64], points: &[Point3], anchor: Point3, cfg: &OptConfig) -> f64 {
    let n = x.len() / 5;
    let p = |i: usize| Point3::new(x[5 * i], x[5 * i + 1], x[5 * i + 2]);
    let l = |i: usize| x[5 * i + 3];
    let dt = |i: usize| x[5 * i + 4];
    let mut total = 0.0;

    for i in 2..n - 1 {
        let d = [dist(p(i - 2), p(i - 1)), dist(p(i - 1), p(i)), dist(p(i), p(i + 1))];
        let alpha = (d[0] + d[1] + d[2]) / 3.0;
        total += cfg.gamma_eq * d.iter().map(|di| (alpha - di).powi(2)).sum::<f64>();
    }
    for i in 0..n {
        let d = brute_clearance(points, p(i));
        let r = if d < cfg.rho_o { (cfg.rho_a - cfg.beta * d).exp() } else { 0.0 };
        total += cfg.gamma_o * r * r;
    }
    for i in 1..n - 1 {
        let (u, v) = (p(i) - p(i - 1), p(i + 1) - p(i));
        let uv = u.x * v.x + u.y * v.y + u.z * v.z;
        let norms = dist(p(i), p(i - 1)) * dist(p(i + 1), p(i));
        let angle = (uv / norms).clamp(-1.0, 1.0).acos();
        let r = if norms > 0.0 && angle > cfg.rho_theta { (1.0 / uv.abs()).min(cfg.kinematics_ceiling) } else { 0.0 };
        total += cfg.gamma_theta * r * r;
    }
    for i in 1..n {
        total += cfg.gamma_t * (dt0[i] - dt(i)).powi(2);
    }
    for i in 0..n - 1 {
        total += cfg.gamma_v * (dist(p(i), p(i + 1)) / dt(i + 1) - cfg.rho_v).powi(2);
    }
    for i in 1..n - 1 {
        let v0 = dist(p(i - 1), p(i)) / dt(i);
        let v1 = dist(p(i), p(i + 1)) / dt(i + 1);
        total += cfg.gamma_a * ((v1 - v0) / (dt(i) + dt(i + 1))).powi(2);
    }
    for i in 0..n {
        let chord = dist(p(i), anchor);
        let clearance = tether_clearance(points, anchor, p(i), l(i).max(chord), cfg.segments);
        let r =
            if clearance < cfg.rho_l { (1e4 * (10.0 * (chord - l(i))).exp()).powi(2) } else { (l(i) - chord).powi(2) };
        total += cfg.gamma_l * r;
    }
    total
}
