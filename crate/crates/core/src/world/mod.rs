//! Environment model: an occupancy grid for search and line-of-sight, and an
//! obstacle point cloud with an exact nearest-neighbor index for clearance.
//!
//! The two representations are independent; a scene generator usually derives
//! the cloud from occupied cell centers, but nothing here requires it.

mod grid;
pub mod io;
mod kdtree;

use std::path::Path;

use thiserror::Error;

use crate::geometry::Point3;

pub use grid::{Cell, OccupancyGrid};
pub use kdtree::KdTree;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("{path}: parse error at line {line}, byte {offset}: {message}")]
    Parse { path: String, line: usize, offset: usize, message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Obstacle points with their nearest-neighbor index.
#[derive(Debug, Clone, Default)]
pub struct ObstacleCloud {
    points: Vec<Point3>,
    tree: KdTree,
}

impl ObstacleCloud {
    pub fn new(points: Vec<Point3>) -> Self {
        let tree = KdTree::build(&points);
        Self { points, tree }
    }

    /// Points in their original order.
    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nearest(&self, p: Point3) -> Option<(f64, Point3)> {
        self.tree.nearest(p)
    }
}

#[derive(Debug, Clone)]
pub struct World {
    pub grid: OccupancyGrid,
    pub cloud: ObstacleCloud,
}

impl World {
    pub fn new(grid: OccupancyGrid, cloud: ObstacleCloud) -> Self {
        Self { grid, cloud }
    }

    /// World whose cloud holds the centers of every occupied grid cell.
    pub fn from_grid(grid: OccupancyGrid) -> Self {
        let points = grid.occupied_cells().map(|c| grid.cell_center(c)).collect();
        Self { cloud: ObstacleCloud::new(points), grid }
    }

    /// Distance to and location of the closest obstacle point; `None` when the cloud is empty.
    pub fn nearest_obstacle(&self, p: Point3) -> Option<(f64, Point3)> {
        self.cloud.nearest(p)
    }

    /// Distance to the closest obstacle point, `+inf` for an empty cloud.
    pub fn clearance(&self, p: Point3) -> f64 {
        self.nearest_obstacle(p).map_or(f64::INFINITY, |(d, _)| d)
    }

    pub fn cell_occupied(&self, p: Point3) -> bool {
        self.grid.cell_occupied(p)
    }

    pub fn line_of_sight(&self, a: Point3, b: Point3) -> bool {
        self.grid.line_of_sight(a, b)
    }
}

/// Reads a grid file and a cloud file into a world.
pub fn load_world(grid_file: impl AsRef<Path>, cloud_file: impl AsRef<Path>) -> Result<World, WorldError> {
    let grid = io::read_grid_file(grid_file)?;
    let points = io::read_cloud_file(cloud_file)?;
    Ok(World::new(grid, ObstacleCloud::new(points)))
}
