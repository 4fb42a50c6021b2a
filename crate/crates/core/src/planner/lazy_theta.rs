//! Lazy Theta* over the 26-connected occupancy grid.
//!
//! A node is usable when its cell is free and, for tether-aware planning, the
//! cable from the anchor to the node position admits a collision-free length
//! no longer than `l_max`. The start and goal nodes sit at the exact start and
//! goal points; every other node sits at its cell center. In tether-aware mode
//! a straight move also has to keep the tether clearance from the cloud.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use crate::geometry::{distance, Point3};
use crate::world::{Cell, World};

use super::{check_catenary_feasibility, PlanError, PlannerConfig};

/// Search bookkeeping for one grid cell.
#[derive(Debug, Clone, Copy)]
pub struct PathNode {
    pub cell: Cell,
    /// Cost of the best known path from the start, meters.
    pub g: f64,
    /// Linear index of the parent cell; the start is its own parent.
    pub parent: usize,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy)]
struct OpenEntry {
    f: f64,
    g: f64,
    idx: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    // max-heap: smallest f first, ties to the larger g, then the lower index
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| self.g.total_cmp(&other.g)).then_with(|| other.idx.cmp(&self.idx))
    }
}

struct Search<'a> {
    world: &'a World,
    cfg: &'a PlannerConfig,
    anchor: Point3,
    start: Point3,
    goal: Point3,
    start_idx: usize,
    goal_idx: usize,
    nodes: HashMap<usize, PathNode>,
    usable: HashMap<usize, bool>,
}

impl Search<'_> {
    fn position(&self, idx: usize) -> Point3 {
        if idx == self.start_idx {
            self.start
        } else if idx == self.goal_idx {
            self.goal
        } else {
            let grid = &self.world.grid;
            grid.cell_center(grid.cell_from_index(idx))
        }
    }

    fn state_ok(&self, p: Point3) -> bool {
        !self.world.cell_occupied(p)
            && (!self.cfg.tether_aware || check_catenary_feasibility(p, self.anchor, self.cfg, self.world).feasible)
    }

    fn is_usable(&mut self, idx: usize) -> bool {
        if let Some(&ok) = self.usable.get(&idx) {
            return ok;
        }
        let ok = self.state_ok(self.position(idx));
        self.usable.insert(idx, ok);
        ok
    }

    fn line_of_sight(&self, a: usize, b: usize) -> bool {
        let (pa, pb) = (self.position(a), self.position(b));
        self.world.line_of_sight(pa, pb) && (!self.cfg.tether_aware || self.segment_clear(pa, pb))
    }

    /// Every interpolated state becomes a tether endpoint, so interior samples
    /// of a tether-aware segment must keep the tether clearance (plus half the
    /// sample step) from the cloud.
    fn segment_clear(&self, a: Point3, b: Point3) -> bool {
        let step = self.world.grid.resolution() / 4.0;
        let threshold = self.cfg.tether_clearance_min + step / 2.0;
        let n = (distance(a, b) / step).ceil() as usize;
        (1..n).all(|k| self.world.clearance(a.lerp(b, k as f64 / n as f64)) >= threshold)
    }

    fn cost(&self, a: usize, b: usize) -> f64 {
        distance(self.position(a), self.position(b))
    }

    /// Usable neighbors reachable by a straight move from `idx`.
    fn visible_neighbors(&mut self, idx: usize) -> Vec<usize> {
        let grid = &self.world.grid;
        let c = grid.cell_from_index(idx);
        let mut out = Vec::with_capacity(26);
        for dz in -1..=1 {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let Some(n) = self.world.grid.linear_index([c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    if self.is_usable(n) && self.line_of_sight(idx, n) {
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    fn g(&self, idx: usize) -> f64 {
        self.nodes.get(&idx).map_or(f64::INFINITY, |n| n.g)
    }

    fn heuristic(&self, idx: usize) -> f64 {
        distance(self.position(idx), self.goal)
    }
}

/// Way-points from `start` to `goal`; consecutive way-points see each other.
pub fn plan_path(
    start: Point3,
    goal: Point3,
    anchor: Point3,
    cfg: &PlannerConfig,
    world: &World,
) -> Result<Vec<Point3>, PlanError> {
    cfg.validate()?;
    let grid = &world.grid;
    let start_idx = grid.linear_index(grid.cell_of(start)).ok_or(PlanError::StartInfeasible(start))?;
    let goal_idx = grid.linear_index(grid.cell_of(goal)).ok_or(PlanError::GoalInfeasible(goal))?;

    let mut search =
        Search { world, cfg, anchor, start, goal, start_idx, goal_idx, nodes: HashMap::new(), usable: HashMap::new() };
    if !search.state_ok(start) {
        return Err(PlanError::StartInfeasible(start));
    }
    if !search.state_ok(goal) {
        return Err(PlanError::GoalInfeasible(goal));
    }
    if start_idx == goal_idx {
        return if world.line_of_sight(start, goal) {
            Ok(vec![start, goal])
        } else {
            Err(PlanError::NoPath { expanded: 0 })
        };
    }
    search.usable.insert(start_idx, true);
    search.usable.insert(goal_idx, true);

    let cell_of = |idx: usize| grid.cell_from_index(idx);
    search.nodes.insert(start_idx, PathNode { cell: cell_of(start_idx), g: 0.0, parent: start_idx, closed: false });
    let mut open = BinaryHeap::new();
    open.push(OpenEntry { f: search.heuristic(start_idx), g: 0.0, idx: start_idx });
    let mut expanded = 0usize;

    while let Some(entry) = open.pop() {
        let s = entry.idx;
        let node = search.nodes[&s];
        if node.closed || entry.g != node.g {
            continue; // stale heap entry
        }
        expanded += 1;

        // lazy line-of-sight check deferred to expansion
        if !search.line_of_sight(node.parent, s) {
            let best = search
                .visible_neighbors(s)
                .into_iter()
                .filter(|n| search.nodes.get(n).is_some_and(|nd| nd.closed))
                .map(|n| (search.g(n) + search.cost(n, s), n))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let Some((g, parent)) = best else { continue };
            let nd = search.nodes.get_mut(&s).expect("node exists");
            nd.g = g;
            nd.parent = parent;
        }

        if s == goal_idx {
            return Ok(reconstruct(&search, s));
        }
        search.nodes.get_mut(&s).expect("node exists").closed = true;

        let parent = search.nodes[&s].parent;
        let g_parent = search.g(parent);
        for n in search.visible_neighbors(s) {
            let cell = cell_of(n);
            let candidate = g_parent + search.cost(parent, n);
            match search.nodes.entry(n) {
                Entry::Occupied(mut e) => {
                    let nd = e.get_mut();
                    if nd.closed || candidate >= nd.g {
                        continue;
                    }
                    nd.g = candidate;
                    nd.parent = parent;
                }
                Entry::Vacant(e) => {
                    e.insert(PathNode { cell, g: candidate, parent, closed: false });
                }
            }
            open.push(OpenEntry { f: candidate + search.heuristic(n), g: candidate, idx: n });
        }
    }
    Err(PlanError::NoPath { expanded })
}

fn reconstruct(search: &Search<'_>, goal_idx: usize) -> Vec<Point3> {
    let mut chain = vec![goal_idx];
    let mut cur = goal_idx;
    while cur != search.start_idx {
        cur = search.nodes[&cur].parent;
        chain.push(cur);
    }
    chain.reverse();
    chain.into_iter().map(|i| search.position(i)).collect()
}
