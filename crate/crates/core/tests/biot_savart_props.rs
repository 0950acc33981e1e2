mod common;

use elfscan::field::FieldSample;
use elfscan::sim::{fixtures::square_loop, model_field, segment_field, Vec3, WireModel, WireSegmentPath};
use proptest::prelude::*;

use common::{close, infinite_wire_ut, square_loop_center_ut};

fn vec3() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn as_vec(s: FieldSample) -> Vec3 {
    Vec3::new(s.bx, s.by, s.bz)
}

fn rel_diff(a: Vec3, b: Vec3) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn subdividing_a_segment_changes_nothing(a in vec3(), b in vec3(), eval in vec3(), pieces in 2usize..12) {
        prop_assume!((b - a).norm() > 1e-3);
        prop_assume!(eval.distance_to_segment(a, b) > 1e-2);
        let whole = segment_field(a, b, 1.0, eval).unwrap();
        let mut split = Vec3::ZERO;
        for i in 0..pieces {
            let p = a + (b - a) * (i as f64 / pieces as f64);
            let q = a + (b - a) * ((i + 1) as f64 / pieces as f64);
            split += segment_field(p, q, 1.0, eval).unwrap();
        }
        prop_assert!(rel_diff(whole, split) < 1e-12, "{whole:?} vs {split:?}");
    }

    #[test]
    fn field_is_linear_in_current(a in vec3(), b in vec3(), eval in vec3(), c in -100.0f64..100.0) {
        prop_assume!((b - a).norm() > 1e-3 && eval.distance_to_segment(a, b) > 1e-2);
        let path = WireSegmentPath::new(vec![a, b], 1.0).unwrap();
        let unit = as_vec(model_field(&WireModel::new(vec![path.clone()]), eval).unwrap());
        let scaled = as_vec(model_field(&WireModel::new(vec![path.with_current(c)]), eval).unwrap());
        prop_assert!(rel_diff(unit * c, scaled) < 1e-12);
    }

    #[test]
    fn reversing_a_path_negates_the_field(a in vec3(), b in vec3(), c in vec3(), eval in vec3()) {
        prop_assume!((b - a).norm() > 1e-3 && (c - b).norm() > 1e-3);
        prop_assume!(eval.distance_to_segment(a, b) > 1e-2 && eval.distance_to_segment(b, c) > 1e-2);
        let path = WireSegmentPath::new(vec![a, b, c], 2.0).unwrap();
        let fwd = as_vec(model_field(&WireModel::new(vec![path.clone()]), eval).unwrap());
        let rev = as_vec(model_field(&WireModel::new(vec![path.reversed()]), eval).unwrap());
        prop_assert!(rel_diff(fwd, rev * -1.0) < 1e-12);
    }

    #[test]
    fn translation_moves_the_field_with_the_geometry(a in vec3(), b in vec3(), eval in vec3(), t in vec3()) {
        prop_assume!((b - a).norm() > 1e-3 && eval.distance_to_segment(a, b) > 1e-2);
        let here = segment_field(a, b, 1.0, eval).unwrap();
        let there = segment_field(a + t, b + t, 1.0, eval + t).unwrap();
        prop_assert!(rel_diff(here, there) < 1e-9);
    }

    #[test]
    fn superposition_over_paths(a in vec3(), b in vec3(), c in vec3(), d in vec3(), eval in vec3()) {
        prop_assume!((b - a).norm() > 1e-3 && (d - c).norm() > 1e-3);
        prop_assume!(eval.distance_to_segment(a, b) > 1e-2 && eval.distance_to_segment(c, d) > 1e-2);
        let p = WireSegmentPath::new(vec![a, b], 1.5).unwrap();
        let q = WireSegmentPath::new(vec![c, d], -0.7).unwrap();
        let both = as_vec(model_field(&WireModel::new(vec![p.clone(), q.clone()]), eval).unwrap());
        let sum = as_vec(model_field(&WireModel::new(vec![p]), eval).unwrap())
            + as_vec(model_field(&WireModel::new(vec![q]), eval).unwrap());
        prop_assert!(rel_diff(both, sum) < 1e-12 || (both - sum).norm() < 1e-15);
    }
}

#[test]
fn long_segment_matches_infinite_wire() {
    let b = segment_field(Vec3::new(-100.0, 0.0, 0.0), Vec3::new(100.0, 0.0, 0.0), 1.0, Vec3::new(0.0, 0.01, 0.0))
        .unwrap()
        .norm()
        * 1e6;
    assert!(close(b, infinite_wire_ut(1.0, 0.01), 1e-3));
}

#[test]
fn square_loop_center() {
    for side in [0.005, 0.1, 2.0] {
        let m = WireModel::new(vec![square_loop(Vec3::ZERO, side, 3.0)]);
        let b = model_field(&m, Vec3::ZERO).unwrap();
        assert!(close(b.bz, square_loop_center_ut(3.0, side), 1e-3), "side {side}");
        assert!(b.bx.abs() < 1e-12 * b.bz.abs() && b.by.abs() < 1e-12 * b.bz.abs());
    }
}

#[test]
fn far_field_falls_as_inverse_cube() {
    let m = WireModel::new(vec![square_loop(Vec3::ZERO, 0.01, 1.0)]);
    for d in [0.2, 0.5, 1.0] {
        let near = model_field(&m, Vec3::new(0.0, 0.0, d)).unwrap().bz;
        let far = model_field(&m, Vec3::new(0.0, 0.0, 2.0 * d)).unwrap().bz;
        let ratio = near / far;
        assert!((ratio / 8.0 - 1.0).abs() < 0.05, "d = {d}: ratio {ratio}");
    }
}

#[test]
fn probe_on_a_wire_is_rejected() {
    let m = WireModel::new(vec![square_loop(Vec3::ZERO, 0.1, 1.0)]);
    assert!(model_field(&m, Vec3::new(0.05, 0.0, 0.0)).is_err());
    assert!(model_field(&m, Vec3::new(0.05, 0.0, 1e-3)).is_ok());
}
