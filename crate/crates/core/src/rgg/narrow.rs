use crate::geometry::{sat_corners, segment_sphere_intersects, Corners, Sphere};
use crate::swept::{EdgeGeometry, ObstacleModel, Spline};

/// Any body box of `g` intersects the obstacle's box.
pub fn narrow_over_test(o: &ObstacleModel, g: &EdgeGeometry) -> bool {
    let oc = o.outer_corners();
    g.over.iter().any(|b| sat_corners(&b.corners(), &oc))
}

/// Any spline segment of `g` comes within its radius plus the sphere radius
/// of one of the obstacle's inner spheres.
pub fn narrow_under_test(o: &ObstacleModel, g: &EdgeGeometry) -> bool {
    let spheres = o.inner();
    g.splines().any(|s| spline_hits(s, &spheres))
}

pub fn spline_hits(s: &Spline, spheres: &[Sphere]) -> bool {
    s.segments()
        .any(|seg| spheres.iter().any(|sp| segment_sphere_intersects(&seg, sp, s.radius)))
}

pub fn corners_hit(body: &Corners, obstacle: &Corners) -> bool {
    sat_corners(body, obstacle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Transform, Vec3};
    use crate::swept::{BodySpheres, Configuration, RobotModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (RobotModel, BodySpheres) {
        let m = RobotModel::free_box(Vec3::new(0.6, 0.4, 0.3), 3.0).unwrap();
        let s = BodySpheres::for_robot(&m, None, 0.05).unwrap();
        (m, s)
    }

    #[test]
    fn far_and_engulfing() {
        let (m, s) = setup();
        let a = Configuration::zeros(6);
        let b = Configuration::new(vec![2.0, 1.0, 0.0, 0.5, 0.0, 0.3]);
        let g = EdgeGeometry::for_motion(&m, &s, &a, &b, 0.05, 16).unwrap();
        let far = ObstacleModel::new(Vec3::splat(1.0), None)
            .unwrap()
            .with_pose(Transform::from_translation(Vec3::splat(30.0)))
            .unwrap();
        assert!(!narrow_over_test(&far, &g));
        assert!(!narrow_under_test(&far, &g));
        let big = ObstacleModel::new(Vec3::splat(20.0), None).unwrap();
        assert!(narrow_over_test(&big, &g));
        assert!(narrow_under_test(&big, &g));
    }

    #[test]
    fn under_implies_over() {
        let (m, s) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut unders = 0;
        let mut grazing = 0;
        for _ in 0..400 {
            let a = Configuration::new((0..6).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let b = Configuration::new((0..6).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let g = EdgeGeometry::for_motion(&m, &s, &a, &b, 0.05, 16).unwrap();
            let h = Vec3::new(rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
            let t = Transform::new(
                crate::geometry::Mat3::from_euler_xyz(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0),
                Vec3::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
            );
            let o = ObstacleModel::new(h, None).unwrap().with_pose(t).unwrap();
            let (over, under) = (narrow_over_test(&o, &g), narrow_under_test(&o, &g));
            assert!(!under || over);
            unders += usize::from(under);
            grazing += usize::from(over && !under);
        }
        assert!(unders > 20 && grazing > 20, "{unders} {grazing}");
    }
}
