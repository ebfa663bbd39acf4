//! Geometric primitives and predicates shared by every other module.

mod obb;
mod polytope;
mod primitives;
mod transform;
mod vec;

pub use obb::{
    aabb_of_corners, aabb_of_obb, axis_separates, corner_axes, obb_from_points, obb_intersects_obb,
    sat_axes, sat_corners, sat_margin, Corners, Obb, DEGENERATE_AXIS_EPS,
};
pub use polytope::{polytopes_intersect, ConvexPolytope, Face};
pub use primitives::{segment_point_distance, segment_sphere_intersects, Aabb, Segment, Sphere};
pub use transform::{apply_transform, Rigid, Transform};
pub use vec::{Mat3, Vec3};

/// Padding applied to broadphase boxes so that round-off in box construction
/// can never hide a pair that the narrow phase would report.
pub const BROADPHASE_PAD: f64 = 1e-7;

#[cfg(test)]
mod invariants {
    use super::*;
    use proptest::prelude::*;

    fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
        (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn rotation() -> impl Strategy<Value = Mat3> {
        (-3.2..3.2f64, -3.2..3.2f64, -3.2..3.2f64).prop_map(|(a, b, c)| Mat3::from_euler_xyz(a, b, c))
    }

    fn obb() -> impl Strategy<Value = Obb> {
        (vec3(3.0), rotation(), (0.05..2.0f64, 0.05..2.0f64, 0.05..2.0f64))
            .prop_map(|(c, r, (x, y, z))| Obb::new(c, r.cols, Vec3::new(x, y, z)))
    }

    fn transform() -> impl Strategy<Value = Transform> {
        (rotation(), vec3(10.0)).prop_map(|(r, t)| Transform::new(r, t))
    }

    proptest! {
        #[test]
        fn sat_is_rigid_invariant(a in obb(), b in obb(), t in transform()) {
            prop_assume!(sat_margin(&a, &b).abs() > 1e-6);
            let ta = apply_transform(&t, &a);
            let tb = apply_transform(&t, &b);
            prop_assert_eq!(obb_intersects_obb(&ta, &tb), obb_intersects_obb(&a, &b));
        }

        #[test]
        fn segment_sphere_is_rigid_invariant(
            p in vec3(3.0), q in vec3(3.0), c in vec3(3.0),
            r in 0.0..2.0f64, inflate in 0.0..1.0f64, t in transform(),
        ) {
            let s = Segment::new(p, q);
            let d = segment_point_distance(&s, c);
            prop_assume!((d - r - inflate).abs() > 1e-9);
            let ts = Segment::new(t.apply_point(p), t.apply_point(q));
            let tc = apply_transform(&t, &Sphere::new(c, r));
            prop_assert_eq!(
                segment_sphere_intersects(&ts, &tc, inflate),
                segment_sphere_intersects(&s, &Sphere::new(c, r), inflate)
            );
        }

        #[test]
        fn fitted_box_contains_cloud(pts in proptest::collection::vec(vec3(5.0), 1..60)) {
            let o = obb_from_points(&pts).unwrap();
            let slack = 1e-9 * o.half_extents.max_element();
            for p in &pts {
                prop_assert!(o.contains_point(*p, slack));
            }
        }

        #[test]
        fn aabb_is_corner_min_max(o in obb()) {
            let b = aabb_of_obb(&o);
            let corners = o.corners();
            for k in 0..3 {
                let lo = corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(b.min[k], lo);
                prop_assert_eq!(b.max[k], hi);
            }
        }
    }

    #[test]
    fn transform_examples() {
        let s = Sphere::new(Vec3::ZERO, 1.0);
        let moved = apply_transform(&Transform::from_translation(Vec3::X), &s);
        assert_eq!(moved, Sphere::new(Vec3::X, 1.0));

        let o = Obb::new(Vec3::new(0.1, 0.2, 0.3), Mat3::from_euler_xyz(0.3, 0.1, 0.2).cols, Vec3::new(1.0, 2.0, 0.5));
        assert_eq!(apply_transform(&Transform::IDENTITY, &o), o);

        let t = Transform::new(Mat3::from_euler_xyz(1.0, -0.5, 2.0), Vec3::new(4.0, -1.0, 0.5));
        let moved = apply_transform(&t, &o);
        assert_eq!(moved.half_extents, o.half_extents);
        for (a, b) in moved.corners().iter().zip(o.corners()) {
            assert!((*a - t.apply_point(b)).norm() < 1e-9);
        }
    }
}
