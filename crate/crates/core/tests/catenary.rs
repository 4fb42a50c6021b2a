mod common;

use common::*;
use proptest::prelude::*;

use tetherplan::catenary::{solve_catenary, tether_polyline, vertical_degenerate, CatenaryShape, DEFAULT_TOLERANCE};
use tetherplan::Point3;

fn instance(chord: f64, slack: f64, heading: f64, up: f64) -> (Point3, Point3, f64) {
    let a = Point3::new(0.3, -0.2, 0.5);
    let horiz = (1.0 - up * up).sqrt();
    let b = a + Point3::new(heading.cos() * horiz, heading.sin() * horiz, up) * chord;
    (a, b, slack * dist(a, b))
}

/// Arc length of the sampled curve with a fine sampling, independent of `discretize`.
fn fine_length(a: Point3, b: Point3, length: f64) -> f64 {
    let c = solve_catenary(a, b, length, DEFAULT_TOLERANCE).unwrap();
    let n = 20_000;
    (0..n).map(|k| dist(c.point_at(c.span * k as f64 / n as f64), c.point_at(c.span * (k + 1) as f64 / n as f64))).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn root_matches_bisection_oracle(chord in 0.5..15.0f64, slack in 1.001..3.0f64,
                                     heading in 0.0..std::f64::consts::TAU, up in -0.99..0.99f64) {
        let (a, b, l) = instance(chord, slack, heading, up);
        let c = solve_catenary(a, b, l, DEFAULT_TOLERANCE).unwrap();
        let CatenaryShape::Hanging { param_a, end_correction, .. } = c.shape else {
            return Err(TestCaseError::fail("expected a hanging cable"));
        };
        prop_assert!((param_a - catenary_root(c.span, c.rise, l)).abs() < 1e-8);
        prop_assert!(end_correction.abs() < 1e-4);
        prop_assert!(dist(c.point_at(0.0), a) < 1e-4);
        prop_assert!(dist(c.point_at(c.span), b) < 1e-4);
        prop_assert!((c.analytic_arc_length() - l).abs() < 1e-6 * l);
    }

    #[test]
    fn polyline_length_is_close(chord in 0.5..15.0f64, slack in 1.001..3.0f64,
                                heading in 0.0..std::f64::consts::TAU, up in -0.99..0.99f64) {
        let (a, b, l) = instance(chord, slack, heading, up);
        let poly = tether_polyline(a, b, l, 128).unwrap();
        prop_assert_eq!(poly.len(), 128);
        prop_assert!((poly.length() - l).abs() < 0.01 * l);
        prop_assert!(poly.length() <= l * (1.0 + 1e-9));
    }

    #[test]
    fn cable_never_rises_above_the_higher_anchor(chord in 0.5..10.0f64, slack in 1.001..3.0f64,
                                                 heading in 0.0..std::f64::consts::TAU, up in -0.99..0.99f64) {
        let (a, b, l) = instance(chord, slack, heading, up);
        let top = a.z.max(b.z);
        for p in tether_polyline(a, b, l, 64).unwrap().points {
            prop_assert!(p.z <= top + 1e-9);
        }
    }
}

#[test]
fn quadrature_agrees_with_requested_length() {
    for (chord, slack, up) in [(1.0, 1.01, 0.0), (5.0, 1.5, 0.4), (12.0, 2.8, -0.7), (0.6, 3.0, 0.9)] {
        let (a, b, l) = instance(chord, slack, 0.7, up);
        assert!((fine_length(a, b, l) - l).abs() < 1e-5 * l);
    }
}

#[test]
fn near_taut_and_vertical_cases() {
    let a = Point3::ORIGIN;
    let b = Point3::new(3.0, 0.0, 4.0);
    let taut = solve_catenary(a, b, 5.0 * (1.0 + 1e-7), DEFAULT_TOLERANCE).unwrap();
    assert_eq!(taut.shape, CatenaryShape::Taut);
    let up = Point3::new(0.0, 0.0, 2.0);
    // 60 pieces put a sample exactly on the lowest point
    let poly = tether_polyline(a, up, 3.0, 61).unwrap();
    assert!((poly.length() - 3.0).abs() < 1e-9);
    assert!((poly.points.iter().map(|p| p.z).fold(f64::INFINITY, f64::min) + 0.5).abs() < 1e-12);
    assert_eq!(vertical_degenerate(a, up, 3.0, 61), poly);
}
