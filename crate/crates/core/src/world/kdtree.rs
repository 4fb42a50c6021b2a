//! Exact nearest-neighbor index over a static point set.

use crate::geometry::Point3;

const LEAF_SIZE: usize = 8;

/// Balanced 3-d tree stored implicitly: the node for a range `lo..hi` is the
/// point at `(lo + hi) / 2`, split along `axes[mid]`.
#[derive(Debug, Clone, Default)]
pub struct KdTree {
    points: Vec<Point3>,
    axes: Vec<u8>,
}

fn coord(p: &Point3, axis: u8) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

impl KdTree {
    pub fn build(points: &[Point3]) -> Self {
        let mut pts = points.to_vec();
        let mut axes = vec![0u8; pts.len()];
        Self::build_range(&mut pts, &mut axes);
        Self { points: pts, axes }
    }

    fn build_range(pts: &mut [Point3], axes: &mut [u8]) {
        if pts.len() <= LEAF_SIZE {
            return;
        }
        // split along the axis of largest extent
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in pts.iter() {
            for (k, v) in p.to_array().into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let axis = (0..3u8)
            .max_by(|&a, &b| {
                let ea = hi[a as usize] - lo[a as usize];
                let eb = hi[b as usize] - lo[b as usize];
                ea.total_cmp(&eb).then(b.cmp(&a))
            })
            .unwrap_or(0);
        let mid = pts.len() / 2;
        pts.select_nth_unstable_by(mid, |a, b| coord(a, axis).total_cmp(&coord(b, axis)));
        axes[mid] = axis;
        let (left, rest) = pts.split_at_mut(mid);
        let (left_axes, rest_axes) = axes.split_at_mut(mid);
        Self::build_range(left, left_axes);
        Self::build_range(&mut rest[1..], &mut rest_axes[1..]);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Closest stored point and its distance, or `None` for an empty tree.
    pub fn nearest(&self, q: Point3) -> Option<(f64, Point3)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, 0usize);
        self.search(0, self.points.len(), q, &mut best);
        Some((best.0.sqrt(), self.points[best.1]))
    }

    fn search(&self, lo: usize, hi: usize, q: Point3, best: &mut (f64, usize)) {
        if hi - lo <= LEAF_SIZE {
            for i in lo..hi {
                let d2 = (q - self.points[i]).norm_squared();
                if d2 < best.0 {
                    *best = (d2, i);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid];
        let p = self.points[mid];
        let d2 = (q - p).norm_squared();
        if d2 < best.0 {
            *best = (d2, mid);
        }
        let diff = coord(&q, axis) - coord(&p, axis);
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(near.0, near.1, q, best);
        if diff * diff < best.0 {
            self.search(far.0, far.1, q, best);
        }
    }
}
