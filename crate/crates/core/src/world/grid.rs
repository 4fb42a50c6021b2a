use crate::geometry::Point3;

use super::WorldError;

/// Integer cell coordinates; may lie outside the grid.
pub type Cell = [i64; 3];

/// Axis-aligned 3D occupancy grid. `origin` is the minimum corner of cell (0, 0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    resolution: f64,
    origin: Point3,
    dims: [usize; 3],
    occupancy: Vec<bool>,
    /// Whether points outside the grid bounds count as occupied.
    pub outside_is_obstacle: bool,
}

impl OccupancyGrid {
    /// All-free grid.
    pub fn new(resolution: f64, origin: Point3, dims: [usize; 3]) -> Result<Self, WorldError> {
        let n = Self::check_header(resolution, origin, dims)?;
        Ok(Self { resolution, origin, dims, occupancy: vec![false; n], outside_is_obstacle: true })
    }

    pub fn from_cells(
        resolution: f64,
        origin: Point3,
        dims: [usize; 3],
        occupancy: Vec<bool>,
    ) -> Result<Self, WorldError> {
        let n = Self::check_header(resolution, origin, dims)?;
        if occupancy.len() != n {
            return Err(WorldError::DimensionMismatch(format!(
                "dims {}x{}x{} need {} cells, got {}",
                dims[0],
                dims[1],
                dims[2],
                n,
                occupancy.len()
            )));
        }
        Ok(Self { resolution, origin, dims, occupancy, outside_is_obstacle: true })
    }

    fn check_header(resolution: f64, origin: Point3, dims: [usize; 3]) -> Result<usize, WorldError> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(WorldError::DimensionMismatch(format!("resolution must be positive, got {resolution}")));
        }
        if !origin.is_finite() {
            return Err(WorldError::DimensionMismatch("origin must be finite".into()));
        }
        if dims.contains(&0) {
            return Err(WorldError::DimensionMismatch(format!("dims must be >= 1, got {dims:?}")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| WorldError::DimensionMismatch("grid too large".into()))
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cells(&self) -> &[bool] {
        &self.occupancy
    }

    /// Maximum corner of the grid volume.
    pub fn upper_corner(&self) -> Point3 {
        self.origin
            + Point3::new(
                self.dims[0] as f64 * self.resolution,
                self.dims[1] as f64 * self.resolution,
                self.dims[2] as f64 * self.resolution,
            )
    }

    pub fn cell_of(&self, p: Point3) -> Cell {
        let r = (p - self.origin) / self.resolution;
        [r.x.floor() as i64, r.y.floor() as i64, r.z.floor() as i64]
    }

    pub fn cell_center(&self, c: Cell) -> Point3 {
        self.origin
            + Point3::new(
                (c[0] as f64 + 0.5) * self.resolution,
                (c[1] as f64 + 0.5) * self.resolution,
                (c[2] as f64 + 0.5) * self.resolution,
            )
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.iter().zip(self.dims.iter()).all(|(&v, &d)| v >= 0 && (v as u64) < d as u64)
    }

    /// Linear index, x fastest.
    pub fn linear_index(&self, c: Cell) -> Option<usize> {
        self.in_bounds(c).then(|| c[0] as usize + self.dims[0] * (c[1] as usize + self.dims[1] * c[2] as usize))
    }

    pub fn cell_from_index(&self, idx: usize) -> Cell {
        let x = idx % self.dims[0];
        let y = (idx / self.dims[0]) % self.dims[1];
        let z = idx / (self.dims[0] * self.dims[1]);
        [x as i64, y as i64, z as i64]
    }

    pub fn is_cell_occupied(&self, c: Cell) -> bool {
        match self.linear_index(c) {
            Some(i) => self.occupancy[i],
            None => self.outside_is_obstacle,
        }
    }

    /// Marks an in-bounds cell; out-of-bounds cells are ignored.
    pub fn set_occupied(&mut self, c: Cell, occupied: bool) {
        if let Some(i) = self.linear_index(c) {
            self.occupancy[i] = occupied;
        }
    }

    pub fn cell_occupied(&self, p: Point3) -> bool {
        self.is_cell_occupied(self.cell_of(p))
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.occupancy.iter().enumerate().filter(|(_, &o)| o).map(|(i, _)| self.cell_from_index(i))
    }

    /// True iff no cell the closed segment `a`-`b` touches is occupied.
    pub fn line_of_sight(&self, a: Point3, b: Point3) -> bool {
        self.walk_segment(a, b, |c| !self.is_cell_occupied(c))
    }

    /// Every cell the segment touches, in traversal order.
    pub fn traversed_cells(&self, a: Point3, b: Point3) -> Vec<Cell> {
        let mut out = Vec::new();
        self.walk_segment(a, b, |c| {
            out.push(c);
            true
        });
        out
    }

    /// Amanatides-Woo voxel walk. When the segment crosses an edge or corner
    /// exactly, every cell sharing it is visited. Stops early (returning
    /// false) when `visit` returns false.
    pub fn walk_segment(&self, a: Point3, b: Point3, mut visit: impl FnMut(Cell) -> bool) -> bool {
        const TIE: f64 = 1e-12;
        let mut cell = self.cell_of(a);
        if !visit(cell) {
            return false;
        }
        let start = ((a - self.origin) / self.resolution).to_array();
        let dir = ((b - a) / self.resolution).to_array();
        let mut step = [0i64; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for k in 0..3 {
            if dir[k] > 0.0 {
                step[k] = 1;
                t_max[k] = ((cell[k] + 1) as f64 - start[k]) / dir[k];
                t_delta[k] = 1.0 / dir[k];
            } else if dir[k] < 0.0 {
                step[k] = -1;
                t_max[k] = (cell[k] as f64 - start[k]) / dir[k];
                t_delta[k] = -1.0 / dir[k];
            }
        }
        loop {
            let t_min = t_max[0].min(t_max[1]).min(t_max[2]);
            if !(t_min <= 1.0) {
                return true;
            }
            let tied: Vec<usize> = (0..3).filter(|&k| t_max[k] - t_min <= TIE).collect();
            if tied.len() > 1 {
                // cells sharing the crossed edge/corner
                for mask in 1..(1u32 << tied.len()) - 1 {
                    let mut c = cell;
                    for (bit, &k) in tied.iter().enumerate() {
                        if mask & (1 << bit) != 0 {
                            c[k] += step[k];
                        }
                    }
                    if !visit(c) {
                        return false;
                    }
                }
            }
            for &k in &tied {
                cell[k] += step[k];
                t_max[k] += t_delta[k];
            }
            if !visit(cell) {
                return false;
            }
        }
    }
}
