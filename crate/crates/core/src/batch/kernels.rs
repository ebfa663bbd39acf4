use super::layout::BatchLayout;
use crate::geometry::{sat_corners, segment_sphere_intersects};
use rayon::prelude::*;

/// For each candidate component: does any of its body boxes intersect
/// obstacle `o`'s box? Same separating-axis kernel as the scalar test.
pub fn batch_over(layout: &BatchLayout, candidates: &[u32], o: usize) -> Vec<bool> {
    let oc = layout.obstacle_corners(o);
    candidates
        .par_iter()
        .map(|&c| {
            (0..layout.b).fold(false, |hit, b| hit | sat_corners(&layout.body_corners(c as usize, b), &oc))
        })
        .collect()
}

/// For each candidate component: does any unmasked spline segment come
/// within its slot radius plus the sphere radius of one of obstacle `o`'s
/// spheres?
pub fn batch_under(layout: &BatchLayout, candidates: &[u32], o: usize) -> Vec<bool> {
    let spheres = layout.obstacle_spheres(o);
    candidates
        .par_iter()
        .map(|&c| {
            let mut hit = false;
            for b in 0..layout.b {
                for slot in 0..layout.s {
                    let inflate = layout.spline_radius[b * layout.s + slot];
                    for k in 0..layout.k {
                        let row = layout.segment_row(c as usize, b, slot, k);
                        if !layout.seg_mask[row] {
                            continue;
                        }
                        let seg = layout.segment(row);
                        hit |= spheres.iter().fold(false, |h, sp| h | segment_sphere_intersects(&seg, sp, inflate));
                    }
                }
            }
            hit
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Transform, Vec3};
    use crate::rgg::{narrow_over_test, narrow_under_test};
    use crate::roadmap::{Roadmap, RoadmapGeometry};
    use crate::swept::{posed_spheres, Configuration, ObstacleModel, RobotModel, DEFAULT_SEGMENT_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_geometry(rng: &mut ChaCha8Rng, nodes: usize) -> (Roadmap, RoadmapGeometry) {
        let robot = RobotModel::free_box(Vec3::splat(0.5), std::f64::consts::PI).unwrap();
        let qs: Vec<Configuration> = (0..nodes)
            .map(|_| {
                Configuration::new(
                    (0..6)
                        .map(|i| if i < 3 { rng.gen_range(-4.0..4.0) } else { rng.gen_range(-1.0..1.0) })
                        .collect(),
                )
            })
            .collect();
        let edges: Vec<(u32, u32)> = (1..nodes as u32).map(|i| (i - 1, i)).collect();
        let roadmap = Roadmap::new(qs, edges).unwrap();
        let g = RoadmapGeometry::build(&roadmap, &robot, 0.3, None, DEFAULT_SEGMENT_CAP).unwrap();
        (roadmap, g)
    }

    #[test]
    fn kernels_match_scalar_tests() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (_, g) = random_geometry(&mut rng, 40);
        let mut obstacles: Vec<ObstacleModel> = (0..4)
            .map(|_| {
                ObstacleModel::new(
                    Vec3::new(rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0)),
                    None,
                )
                .unwrap()
            })
            .collect();
        let mut layout = BatchLayout::serialize(&g, &obstacles, None).unwrap();
        let all: Vec<u32> = (0..layout.n as u32).collect();
        let mut pairs = 0;
        while pairs < 10_000 {
            for (oi, o) in obstacles.iter_mut().enumerate() {
                let t = Transform::from_translation(Vec3::new(
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                ));
                o.set_pose(t).unwrap();
                layout.update_transforms(&[(oi as u32, t)]).unwrap();
                let over = batch_over(&layout, &all, oi);
                let under = batch_under(&layout, &all, oi);
                for (c, comp) in g.components.iter().enumerate() {
                    assert_eq!(over[c], narrow_over_test(o, comp), "over {c} {oi}");
                    assert_eq!(under[c], narrow_under_test(o, comp), "under {c} {oi}");
                    pairs += 1;
                }
            }
        }
    }

    #[test]
    fn far_and_engulfing_obstacles() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (_, g) = random_geometry(&mut rng, 5);
        let obstacles = vec![
            ObstacleModel::new(Vec3::splat(1.0), None).unwrap().with_pose(Transform::from_translation(Vec3::splat(100.0))).unwrap(),
            ObstacleModel::new(Vec3::splat(50.0), None).unwrap(),
        ];
        let layout = BatchLayout::serialize(&g, &obstacles, None).unwrap();
        let all: Vec<u32> = (0..layout.n as u32).collect();
        assert!(batch_over(&layout, &all, 0).iter().all(|h| !h));
        assert!(batch_under(&layout, &all, 0).iter().all(|h| !h));
        assert!(batch_over(&layout, &all, 1).iter().all(|&h| h));
        assert!(batch_under(&layout, &all, 1).iter().all(|&h| h));
    }

    #[test]
    fn padding_does_not_change_results() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, g) = random_geometry(&mut rng, 12);
        // The long obstacle has many spheres; the cube is padded up to it.
        let long = ObstacleModel::new(Vec3::new(4.0, 0.5, 0.5), None).unwrap();
        let cube = ObstacleModel::new(Vec3::splat(0.5), None).unwrap();
        assert!(long.sphere_count() > cube.sphere_count());
        let both = BatchLayout::serialize(&g, &[long, cube.clone()], None).unwrap();
        let alone = BatchLayout::serialize(&g, &[cube.clone()], None).unwrap();
        let padded = both.obstacle_spheres(1);
        let last = padded[cube.sphere_count() - 1];
        assert!(padded[cube.sphere_count()..].iter().all(|s| *s == last));
        let all: Vec<u32> = (0..both.n as u32).collect();
        for _ in 0..50 {
            let t = Transform::from_translation(Vec3::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            ));
            let mut a = both.clone();
            let mut b = alone.clone();
            a.update_transforms(&[(1, t)]).unwrap();
            b.update_transforms(&[(0, t)]).unwrap();
            assert_eq!(posed_spheres(cube.canonical_spheres(), &t), b.obstacle_spheres(0));
            assert_eq!(batch_under(&a, &all, 1), batch_under(&b, &all, 0));
        }
    }
}
