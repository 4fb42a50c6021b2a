mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use tetherplan::cli::scenes::{generate_scene, SceneKind, SceneParams};
use tetherplan::world::io::{parse_grid, read_cloud_file, read_grid_file, write_cloud_file, write_grid_file};
use tetherplan::world::{load_world, Cell, ObstacleCloud, OccupancyGrid, WorldError};
use tetherplan::Point3;

#[test]
fn nearest_matches_exhaustive_scan() {
    let mut rng = rng(11);
    for round in 0..3 {
        let spread = [0.5, 5.0, 50.0][round];
        let lo = Point3::new(-spread, -spread, -spread);
        let hi = Point3::new(spread, spread, spread);
        let points: Vec<Point3> = (0..10_000).map(|_| random_point(&mut rng, lo, hi)).collect();
        let cloud = ObstacleCloud::new(points.clone());
        for _ in 0..1000 {
            let q = random_point(&mut rng, lo * 1.2, hi * 1.2);
            let got = cloud.nearest(q).unwrap();
            let want = brute_nearest(&points, q).unwrap();
            assert_eq!(got.0, want.0, "query {q}");
            assert_eq!(dist(got.1, q), want.0);
        }
    }
}

#[test]
fn nearest_on_lattice_with_ties() {
    let points: Vec<Point3> =
        (0..1000).map(|i| Point3::new((i % 10) as f64, ((i / 10) % 10) as f64, (i / 100) as f64)).collect();
    let cloud = ObstacleCloud::new(points.clone());
    let mut rng = rng(12);
    for _ in 0..1000 {
        let q = random_point(&mut rng, Point3::new(-1.0, -1.0, -1.0), Point3::new(10.0, 10.0, 10.0));
        let q = Point3::new((q.x * 2.0).round() / 2.0, (q.y * 2.0).round() / 2.0, q.z);
        assert_eq!(cloud.nearest(q).unwrap().0, brute_nearest(&points, q).unwrap().0);
    }
}

fn random_grid(seed: u64) -> OccupancyGrid {
    let mut rng = rng(seed);
    let mut g = OccupancyGrid::new(0.25, Point3::new(-1.0, -2.0, 0.5), [20, 16, 12]).unwrap();
    for i in 0..20 {
        for j in 0..16 {
            for k in 0..12 {
                g.set_occupied([i, j, k], rng.gen_bool(0.08));
            }
        }
    }
    g
}

/// Closed-box segment test, with `pad` added to every face.
fn segment_touches_cell(g: &OccupancyGrid, a: Point3, b: Point3, c: Cell, pad: f64) -> bool {
    let lo = g.origin().to_array();
    let (a, b) = (a.to_array(), b.to_array());
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..3 {
        let bmin = lo[k] + c[k] as f64 * g.resolution() - pad;
        let bmax = bmin + g.resolution() + 2.0 * pad;
        let d = b[k] - a[k];
        if d == 0.0 {
            if a[k] < bmin || a[k] > bmax {
                return false;
            }
        } else {
            let (mut ta, mut tb) = ((bmin - a[k]) / d, (bmax - a[k]) / d);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
        }
    }
    t0 <= t1
}

#[test]
fn voxel_walk_between_samples_and_exact_boxes() {
    let g = random_grid(13);
    let mut rng = rng(14);
    let (lo, hi) = (g.origin() + Point3::new(1e-3, 1e-3, 1e-3), g.upper_corner() - Point3::new(1e-3, 1e-3, 1e-3));
    let mut agree = 0;
    for _ in 0..1000 {
        let (a, b) = (random_point(&mut rng, lo, hi), random_point(&mut rng, lo, hi));
        let walked = g.traversed_cells(a, b);
        for c in sampled_cells(&g, a, b, g.resolution() / 10.0) {
            assert!(walked.contains(&c), "sampled cell {c:?} missed by the walk {a} -> {b}");
        }
        for &c in &walked {
            assert!(segment_touches_cell(&g, a, b, c, 1e-9), "walk visited {c:?} which {a} -> {b} does not touch");
        }
        let los = g.line_of_sight(a, b);
        let sampled = sampled_line_of_sight(&g, a, b, g.resolution() / 10.0);
        assert!(!los || sampled);
        if los == sampled {
            agree += 1;
        } else {
            // the walk caught a sliver the samples stepped over
            assert!(walked.iter().any(|&c| g.is_cell_occupied(c)));
        }
    }
    assert!(agree >= 990, "only {agree} of 1000 segments agree with the sampling oracle");
}

#[test]
fn axis_aligned_and_diagonal_segments() {
    let g = random_grid(15);
    let c = |i: i64, j: i64, k: i64| g.cell_center([i, j, k]);
    for (a, b) in
        [(c(0, 0, 0), c(19, 0, 0)), (c(3, 3, 3), c(3, 15, 3)), (c(0, 0, 0), c(11, 11, 11)), (c(2, 9, 4), c(2, 9, 4))]
    {
        let walked = g.traversed_cells(a, b);
        for s in sampled_cells(&g, a, b, g.resolution() / 10.0) {
            assert!(walked.contains(&s));
        }
        assert_eq!(g.line_of_sight(a, b), g.line_of_sight(b, a));
    }
}

proptest! {
    #[test]
    fn line_of_sight_is_symmetric(ax in -0.9..3.9f64, ay in -1.9..1.9f64, az in 0.6..3.4f64,
                                  bx in -0.9..3.9f64, by in -1.9..1.9f64, bz in 0.6..3.4f64) {
        let g = random_grid(16);
        let (a, b) = (Point3::new(ax, ay, az), Point3::new(bx, by, bz));
        prop_assert_eq!(g.line_of_sight(a, b), g.line_of_sight(b, a));
    }

    #[test]
    fn cell_interior_round_trip(i in 0i64..20, j in 0i64..16, k in 0i64..12,
                                fx in 0.01..0.99f64, fy in 0.01..0.99f64, fz in 0.01..0.99f64) {
        let g = random_grid(17);
        let o = g.origin();
        let r = g.resolution();
        let p = Point3::new(o.x + (i as f64 + fx) * r, o.y + (j as f64 + fy) * r, o.z + (k as f64 + fz) * r);
        prop_assert_eq!(g.cell_of(p), [i, j, k]);
        prop_assert_eq!(g.cell_of(g.cell_center([i, j, k])), [i, j, k]);
    }
}

#[test]
fn generated_scene_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let scene = generate_scene(SceneKind::Corridor, &SceneParams::default()).unwrap();
    let cloud = scene.cloud();
    let (gp, cp) = (dir.path().join("grid.occ"), dir.path().join("cloud.xyz"));
    write_grid_file(&scene.grid, &gp).unwrap();
    write_cloud_file(&cloud, &cp).unwrap();
    assert_eq!(read_grid_file(&gp).unwrap(), scene.grid);
    let back = read_cloud_file(&cp).unwrap();
    assert_eq!(back.len(), cloud.len());
    for (a, b) in back.iter().zip(&cloud) {
        assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
    }
    let world = load_world(&gp, &cp).unwrap();
    assert_eq!(world.cloud.points().len(), cloud.len());
    // writing again gives the same bytes
    let gp2 = dir.path().join("again.occ");
    write_grid_file(&world.grid, &gp2).unwrap();
    assert_eq!(std::fs::read(&gp).unwrap(), std::fs::read(&gp2).unwrap());
}

#[test]
fn truncated_grid_names_the_offset() {
    let scene = generate_scene(SceneKind::Arc, &SceneParams::default()).unwrap();
    let mut bytes = Vec::new();
    tetherplan::world::io::write_grid(&scene.grid, &mut bytes).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    let cut = &text[..text.len() * 2 / 3];
    let cut = &cut[..cut.rfind('\n').unwrap() + 1];
    match parse_grid(cut, "cut.occ") {
        Err(WorldError::Parse { offset, message, .. }) => {
            assert_eq!(offset, cut.len());
            assert!(message.contains("end of file"), "{message}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_world(dir.path().join("nope.occ"), dir.path().join("nope.xyz")).is_err());
}
