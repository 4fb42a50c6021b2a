//! Procedural test scenes: an arch in open space, a narrow corridor, a room
//! with a shelf, a room with an outlet duct, and an open field of boxes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point3;
use crate::world::io::{write_cloud_file, write_grid_file};
use crate::world::{OccupancyGrid, World};

use super::config::{Config, ScenarioSpec};
use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SceneKind {
    Arc,
    Corridor,
    Confined,
    Duct,
    Open,
}

impl SceneKind {
    pub const ALL: [SceneKind; 5] =
        [SceneKind::Arc, SceneKind::Corridor, SceneKind::Confined, SceneKind::Duct, SceneKind::Open];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Arc => "arc",
            SceneKind::Corridor => "corridor",
            SceneKind::Confined => "confined",
            SceneKind::Duct => "duct",
            SceneKind::Open => "open",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SceneKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            CliError::Config(format!("unknown scene kind {s:?}; expected arc, corridor, confined, duct or open"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    /// Cell edge, meters.
    pub resolution: f64,
    /// Seed for the `open` scene.
    pub seed: u64,
    /// Boxes per 10 square meters in the `open` scene.
    pub density: f64,
    /// Free width of the corridor, meters.
    pub width: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self { resolution: 0.2, seed: 7, density: 0.8, width: 1.2 }
    }
}

impl SceneParams {
    /// Parses `key=value` pairs separated by commas, e.g. `seed=3,density=0.5`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut p = SceneParams::default();
        for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || CliError::Config(format!("bad scene parameter {pair:?}"));
            let (k, v) = pair.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "resolution" => p.resolution = v.trim().parse().map_err(|_| bad())?,
                "seed" => p.seed = v.trim().parse().map_err(|_| bad())?,
                "density" => p.density = v.trim().parse().map_err(|_| bad())?,
                "width" => p.width = v.trim().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.resolution > 0.0 && self.resolution <= 1.0) {
            return Err(CliError::Config(format!("resolution must be in (0, 1], got {}", self.resolution)));
        }
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(CliError::Config(format!("density must be non-negative, got {}", self.density)));
        }
        if !(self.width > 0.0 && self.width < 5.0) {
            return Err(CliError::Config(format!("width must be in (0, 5), got {}", self.width)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub kind: SceneKind,
    pub grid: OccupancyGrid,
    pub anchor: Point3,
    pub start: Point3,
    pub goal: Point3,
}

impl Scene {
    /// Occupied cell centers.
    pub fn cloud(&self) -> Vec<Point3> {
        self.grid.occupied_cells().map(|c| self.grid.cell_center(c)).collect()
    }

    pub fn world(&self) -> World {
        World::from_grid(self.grid.clone())
    }
}

struct Builder {
    grid: OccupancyGrid,
}

impl Builder {
    fn new(origin: [f64; 3], size: [f64; 3], resolution: f64) -> Result<Self, CliError> {
        let dims = size.map(|s| (s / resolution - 1e-9).ceil() as usize);
        let grid = OccupancyGrid::new(resolution, Point3::from_array(origin), dims)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self { grid })
    }

    /// Marks every cell whose center lies inside the axis-aligned box.
    fn solid(&mut self, lo: [f64; 3], hi: [f64; 3]) {
        let g = &self.grid;
        let (a, b) = (g.cell_of(Point3::from_array(lo)), g.cell_of(Point3::from_array(hi)));
        let mut cells = Vec::new();
        for z in a[2]..=b[2] {
            for y in a[1]..=b[1] {
                for x in a[0]..=b[0] {
                    let c = [x, y, z];
                    if !g.in_bounds(c) {
                        continue;
                    }
                    let p = g.cell_center(c).to_array();
                    if (0..3).all(|k| p[k] >= lo[k] && p[k] <= hi[k]) {
                        cells.push(c);
                    }
                }
            }
        }
        for c in cells {
            self.grid.set_occupied(c, true);
        }
    }
}

pub fn generate_scene(kind: SceneKind, params: &SceneParams) -> Result<Scene, CliError> {
    params.validate()?;
    let r = params.resolution;
    let anchor = Point3::ORIGIN;
    let start = Point3::new(0.0, 0.0, 1.0);
    let (grid, goal) = match kind {
        SceneKind::Arc => {
            let mut b = Builder::new([-1.0, -3.0, 0.0], [11.0, 6.0, 3.0], r)?;
            b.solid([4.0, 1.0, 0.0], [4.4, 1.4, 2.4]);
            b.solid([4.0, -1.4, 0.0], [4.4, -1.0, 2.4]);
            b.solid([4.0, -1.4, 2.0], [4.4, 1.4, 2.4]);
            (b.grid, Point3::new(9.0, 1.5, 1.5))
        }
        SceneKind::Corridor => {
            let h = params.width / 2.0;
            let mut b = Builder::new([-1.0, -3.0, 0.0], [10.0, 6.0, 3.0], r)?;
            b.solid([2.0, h, 0.0], [2.2, 3.0, 3.0]);
            b.solid([2.0, -3.0, 0.0], [2.2, -h, 3.0]);
            b.solid([2.0, h, 0.0], [7.0, h + 0.2, 3.0]);
            b.solid([2.0, -h - 0.2, 0.0], [7.0, -h, 3.0]);
            (b.grid, Point3::new(8.0, 0.3, 1.2))
        }
        SceneKind::Confined => {
            let mut b = Builder::new([-1.0, -2.5, 0.0], [7.0, 5.0, 2.8], r)?;
            b.solid([-1.0, -2.5, 0.0], [-0.8, 2.5, 2.8]);
            b.solid([5.8, -2.5, 0.0], [6.0, 2.5, 2.8]);
            b.solid([-1.0, -2.5, 0.0], [6.0, -2.3, 2.8]);
            b.solid([-1.0, 2.3, 0.0], [6.0, 2.5, 2.8]);
            b.solid([-1.0, -2.5, 2.6], [6.0, 2.5, 2.8]);
            b.solid([1.6, -1.2, 1.0], [2.4, 1.2, 1.4]);
            (b.grid, Point3::new(4.0, 0.0, 1.2))
        }
        SceneKind::Duct => {
            let mut b = Builder::new([-1.0, -2.5, 0.0], [8.5, 5.0, 3.0], r)?;
            b.solid([-1.0, -2.5, 0.0], [-0.8, 2.5, 3.0]);
            b.solid([-1.0, -2.5, 0.0], [4.2, -2.3, 3.0]);
            b.solid([-1.0, 2.3, 0.0], [4.2, 2.5, 3.0]);
            b.solid([-1.0, -2.5, 2.8], [4.2, 2.5, 3.0]);
            // front wall with a 1.6 m square opening centered at z = 1.2
            b.solid([4.0, -2.5, 0.0], [4.2, -0.8, 3.0]);
            b.solid([4.0, 0.8, 0.0], [4.2, 2.5, 3.0]);
            b.solid([4.0, -0.8, 0.0], [4.2, 0.8, 0.4]);
            b.solid([4.0, -0.8, 2.0], [4.2, 0.8, 3.0]);
            b.solid([4.2, 0.8, 0.2], [6.0, 1.0, 2.2]);
            b.solid([4.2, -1.0, 0.2], [6.0, -0.8, 2.2]);
            b.solid([4.2, -1.0, 0.2], [6.0, 1.0, 0.4]);
            b.solid([4.2, -1.0, 2.0], [6.0, 1.0, 2.2]);
            (b.grid, Point3::new(6.5, 0.0, 1.6))
        }
        SceneKind::Open => {
            let (origin, size) = ([-1.0, -4.0, 0.0], [13.0, 8.0, 3.0]);
            let mut b = Builder::new(origin, size, r)?;
            let goal = Point3::new(10.0, 0.0, 1.5);
            let count = (params.density * size[0] * size[1] / 10.0).round() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let keep_out = [start, goal];
            let mut placed = 0;
            let mut attempts = 0;
            while placed < count && attempts < 100 * count {
                attempts += 1;
                let (cx, cy) = (rng.gen_range(1.0..9.0), rng.gen_range(-3.0..3.0));
                let (hx, hy) = (rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5));
                let height = rng.gen_range(0.6..2.6);
                let clear = keep_out.iter().all(|p| {
                    let dx = ((p.x - cx).abs() - hx).max(0.0);
                    let dy = ((p.y - cy).abs() - hy).max(0.0);
                    dx.hypot(dy) > 1.0
                });
                if clear {
                    b.solid([cx - hx, cy - hy, 0.0], [cx + hx, cy + hy, height]);
                    placed += 1;
                }
            }
            (b.grid, goal)
        }
    };
    Ok(Scene { kind, grid, anchor, start, goal })
}

/// Writes `grid.occ`, `cloud.xyz` and a ready-to-run `scenario.toml` into
/// `dir`; returns the path of the scenario file.
pub fn write_scene(scene: &Scene, dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_grid_file(&scene.grid, dir.join("grid.occ")).map_err(CliError::from)?;
    write_cloud_file(&scene.cloud(), dir.join("cloud.xyz")).map_err(CliError::from)?;
    let cfg = Config {
        scenario: ScenarioSpec {
            name: scene.kind.name().into(),
            grid: "grid.occ".into(),
            cloud: Some("cloud.xyz".into()),
            anchor: scene.anchor,
            start: scene.start,
            goal: scene.goal,
        },
        ..Default::default()
    };
    let path = dir.join("scenario.toml");
    std::fs::write(&path, cfg.to_toml()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
