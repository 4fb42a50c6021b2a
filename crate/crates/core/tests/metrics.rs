mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;

use tetherplan::metrics::{compare, compute_metrics, metrics_csv, TrajectoryMetrics, CSV_HEADER};
use tetherplan::optimizer::OptConfig;
use tetherplan::world::{ObstacleCloud, OccupancyGrid, World};
use tetherplan::{Point3, TrajState, Trajectory, TrajectoryKind};

fn random_trajectory(seed: u64) -> (Trajectory, Vec<Point3>) {
    let mut rng = rng(seed);
    let n = rng.gen_range(3..12);
    let states = (0..n)
        .map(|i| {
            let p = Point3::new(0.5 + 0.6 * i as f64, rng.gen_range(-0.5..0.5), rng.gen_range(0.5..1.5));
            TrajState::new(p, p.norm() + rng.gen_range(0.0..0.3), if i == 0 { 0.0 } else { rng.gen_range(0.1..0.6) })
        })
        .collect();
    let cloud = (0..rng.gen_range(1..60))
        .map(|_| random_point(&mut rng, Point3::new(-1.0, -2.0, 0.0), Point3::new(8.0, 2.0, 2.5)))
        .collect();
    (Trajectory::new(states, Point3::ORIGIN, TrajectoryKind::Initial), cloud)
}

fn world_of(points: Vec<Point3>, shift: Point3) -> World {
    World::new(
        OccupancyGrid::new(0.5, Point3::new(-2.0, -3.0, -1.0) + shift, [24, 12, 10]).unwrap(),
        ObstacleCloud::new(points.into_iter().map(|p| p + shift).collect()),
    )
}

/// Straightforward recomputation of every field.
fn naive(t: &Trajectory, points: &[Point3], segments: usize) -> TrajectoryMetrics {
    let s = &t.states;
    let n = s.len();
    let mut m = TrajectoryMetrics::default();
    let (mut uav, mut teth) = (Vec::new(), Vec::new());
    for st in s {
        m.duration += st.dt;
        uav.push(brute_clearance(points, st.position));
        let chord = dist(st.position, t.anchor);
        teth.push(tether_clearance(points, t.anchor, st.position, st.tether_length.max(chord), segments));
    }
    let mut speeds = Vec::new();
    for i in 1..n {
        let d = dist(s[i - 1].position, s[i].position);
        m.length += d;
        speeds.push(d / s[i].dt);
    }
    let mut acc = Vec::new();
    for i in 1..n - 1 {
        acc.push((speeds[i] - speeds[i - 1]) / (s[i].dt + s[i + 1].dt));
    }
    let avg = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    m.uav_clearance_mean = avg(&uav);
    m.uav_clearance_min = uav.iter().copied().fold(f64::INFINITY, f64::min);
    m.tether_clearance_mean = avg(&teth);
    m.tether_clearance_min = teth.iter().copied().fold(f64::INFINITY, f64::min);
    m.speed_mean = avg(&speeds);
    m.speed_max = speeds.iter().copied().fold(0.0, f64::max);
    m.accel_mean = avg(&acc);
    let abs: Vec<f64> = acc.iter().map(|a| a.abs()).collect();
    m.accel_abs_mean = avg(&abs);
    m.accel_max = abs.iter().copied().fold(0.0, f64::max);
    m
}

fn close(a: &TrajectoryMetrics, b: &TrajectoryMetrics, tol: f64) -> Result<(), String> {
    let fields = |m: &TrajectoryMetrics| {
        [
            m.length,
            m.duration,
            m.uav_clearance_mean,
            m.uav_clearance_min,
            m.tether_clearance_mean,
            m.tether_clearance_min,
            m.speed_mean,
            m.speed_max,
            m.accel_mean,
            m.accel_abs_mean,
            m.accel_max,
        ]
    };
    for (k, (x, y)) in fields(a).iter().zip(fields(b)).enumerate() {
        if (x - y).abs() > tol * (1.0 + y.abs()) {
            return Err(format!("field {k}: {x} vs {y}"));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_naive_recomputation(seed in 0u64..1_000_000) {
        let (t, points) = random_trajectory(seed);
        let cfg = OptConfig::default();
        let got = compute_metrics(&t, &world_of(points.clone(), Point3::ORIGIN), &cfg);
        close(&got, &naive(&t, &points, cfg.segments), 1e-12).map_err(TestCaseError::fail)?;
        prop_assert!(got.uav_clearance_min <= got.uav_clearance_mean);
        prop_assert!(got.tether_clearance_min <= got.tether_clearance_mean);
    }

    #[test]
    fn invariant_under_translation(seed in 0u64..1_000_000, dx in -5.0..5.0f64, dy in -5.0..5.0f64, dz in -5.0..5.0f64) {
        let (t, points) = random_trajectory(seed);
        let shift = Point3::new(dx, dy, dz);
        let cfg = OptConfig::default();
        let a = compute_metrics(&t, &world_of(points.clone(), Point3::ORIGIN), &cfg);
        let mut moved = t.clone();
        moved.anchor += shift;
        for s in &mut moved.states {
            s.position += shift;
        }
        let b = compute_metrics(&moved, &world_of(points, shift), &cfg);
        close(&a, &b, 1e-6).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn length_and_duration_add_up(seed in 0u64..1_000_000) {
        let (t, points) = random_trajectory(seed);
        let (u, _) = random_trajectory(seed + 1);
        let w = world_of(points, Point3::ORIGIN);
        let cfg = OptConfig::default();
        let last = t.states.last().unwrap().position;
        let offset = last - u.states[0].position;
        let mut joined = t.clone();
        let mut tail = Vec::new();
        for s in &u.states[1..] {
            let p = s.position + offset;
            tail.push(TrajState::new(p, p.norm(), s.dt));
        }
        joined.states.extend(tail);
        let shifted_u = Trajectory::new(
            u.states.iter().map(|s| TrajState::new(s.position + offset, (s.position + offset).norm(), s.dt)).collect(),
            Point3::ORIGIN,
            TrajectoryKind::Initial,
        );
        let (a, b, c) = (compute_metrics(&t, &w, &cfg), compute_metrics(&shifted_u, &w, &cfg), compute_metrics(&joined, &w, &cfg));
        prop_assert!((a.length + b.length - c.length).abs() < 1e-9);
        prop_assert!((a.duration + b.duration - c.duration).abs() < 1e-9);
    }
}

#[test]
fn straight_run_at_desired_speed() {
    let path: Vec<Point3> = (0..=8).map(|i| Point3::new(0.5 * i as f64, 0.0, 1.0)).collect();
    let t = constant_speed(&path, Point3::ORIGIN, 2.0);
    let m = compute_metrics(&t, &world_of(vec![], Point3::ORIGIN), &OptConfig::default());
    assert!((m.length - 4.0).abs() < 1e-12);
    assert!((m.duration - 2.0).abs() < 1e-12);
    assert!((m.speed_mean - 2.0).abs() < 1e-12);
    assert_eq!(m.accel_abs_mean, 0.0);
}

#[test]
fn comparison_flags_and_csv() {
    let (t, points) = random_trajectory(5);
    let m = compute_metrics(&t, &world_of(points, Point3::ORIGIN), &OptConfig::default());
    let same = compare(&m, &m);
    assert!(same.rows.iter().all(|r| r.delta == 0.0));
    assert!(!same.length_inflation && !same.clearance_regression);
    let longer = TrajectoryMetrics { length: m.length * 1.05, ..m };
    assert!(!compare(&m, &longer).length_inflation);
    let much_longer = TrajectoryMetrics { length: m.length * 1.2, ..m };
    assert!(compare(&m, &much_longer).length_inflation);
    let closer = TrajectoryMetrics { uav_clearance_min: m.uav_clearance_min - 0.1, ..m };
    assert!(compare(&m, &closer).clearance_regression);

    let csv = metrics_csv("arc, start - goal", &m, &m);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
    assert!(lines[1].starts_with("arc  start - goal,"));
}
