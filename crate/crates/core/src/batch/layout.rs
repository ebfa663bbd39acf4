use crate::error::{Error, Result};
use crate::geometry::{aabb_of_corners, Aabb, Corners, Segment, Sphere, Transform, Vec3, BROADPHASE_PAD};
use crate::roadmap::{ObstacleId, RoadmapGeometry};
use crate::swept::{posed_corners, posed_spheres, ObstacleModel};

/// Dense fixed-shape arrays holding every approximation.
///
/// Shapes, row-major:
///
/// | array           | shape            |
/// |-----------------|------------------|
/// | `e_plus`        | N × B × 8 × 3    |
/// | `o_plus`        | M × 8 × 3        |
/// | `e_minus`       | N × B × S × K × 2 × 3 |
/// | `seg_mask`      | N × B × S × K    |
/// | `spline_radius` | B × S            |
/// | `o_minus_c`     | M × C × 3        |
/// | `o_minus_r`     | M                |
///
/// A sphere slot is `sphere × R + piece`, where R is the largest number of
/// pieces any sphere's spline was split into.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchLayout {
    pub n: usize,
    pub b: usize,
    pub s: usize,
    pub k: usize,
    pub m: usize,
    pub c: usize,
    pub pieces_per_sphere: usize,
    pub e_plus: Vec<f64>,
    pub o_plus: Vec<f64>,
    pub e_minus: Vec<f64>,
    pub seg_mask: Vec<bool>,
    pub spline_radius: Vec<f64>,
    pub o_minus_c: Vec<f64>,
    pub o_minus_r: Vec<f64>,
    /// Per-component broadphase box: union of the body boxes' and spline
    /// pieces' bounds, padded.
    pub component_aabb: Vec<Aabb>,
    canonical_corners: Vec<Corners>,
    canonical_spheres: Vec<Vec<Sphere>>,
}

fn put(dst: &mut [f64], at: usize, v: Vec3) {
    dst[at..at + 3].copy_from_slice(&v.to_array());
}

fn get(src: &[f64], at: usize) -> Vec3 {
    Vec3::new(src[at], src[at + 1], src[at + 2])
}

impl BatchLayout {
    /// Copies the approximations and obstacles into the dense arrays.
    ///
    /// `k` fixes the segment dimension; `None` uses the longest piece. Pieces
    /// longer than `k` are an error.
    pub fn serialize(geometry: &RoadmapGeometry, obstacles: &[ObstacleModel], k: Option<usize>) -> Result<Self> {
        let comps = &geometry.components;
        let n = comps.len();
        let b = geometry.spheres.per_body.len();
        let spheres_max = geometry.spheres.max_per_body();
        let pieces_per_sphere = comps
            .iter()
            .map(|g| g.max_pieces())
            .max()
            .unwrap_or(1)
            .max(1);
        let longest = comps
            .iter()
            .flat_map(|g| g.splines())
            .map(|s| s.segment_count())
            .max()
            .unwrap_or(1);
        let k = match k {
            Some(0) => return Err(Error::InvalidParameter("segment dimension must be at least 1".into())),
            Some(k) if longest > k => return Err(Error::SplineOverflow { segments: longest, cap: k }),
            Some(k) => k,
            None => longest,
        };
        let s = spheres_max * pieces_per_sphere;

        let mut spline_radius = vec![0.0; b * s];
        for (bi, spheres) in geometry.spheres.per_body.iter().enumerate() {
            for (si, sp) in spheres.iter().enumerate() {
                for p in 0..pieces_per_sphere {
                    spline_radius[bi * s + si * pieces_per_sphere + p] = sp.radius;
                }
            }
        }

        let mut e_plus = vec![0.0; n * b * 24];
        let mut e_minus = vec![0.0; n * b * s * k * 6];
        let mut seg_mask = vec![false; n * b * s * k];
        let mut component_aabb = Vec::with_capacity(n);
        for (ci, g) in comps.iter().enumerate() {
            if g.over.len() != b || g.under.len() != b {
                return Err(Error::InvalidParameter(format!("component {ci} has the wrong body count")));
            }
            let mut bounds = Aabb::EMPTY;
            for (bi, obb) in g.over.iter().enumerate() {
                let corners = obb.corners();
                bounds = bounds.union(&aabb_of_corners(&corners));
                for (j, v) in corners.iter().enumerate() {
                    put(&mut e_plus, ((ci * b + bi) * 8 + j) * 3, *v);
                }
            }
            for (bi, body) in g.under.iter().enumerate() {
                for (si, pieces) in body.iter().enumerate() {
                    for (pi, piece) in pieces.iter().enumerate() {
                        let slot = si * pieces_per_sphere + pi;
                        if piece.radius.to_bits() != spline_radius[bi * s + slot].to_bits() {
                            return Err(Error::InvalidParameter(format!(
                                "component {ci} spline radius differs from the robot sphere"
                            )));
                        }
                        bounds = bounds.union(&piece.aabb());
                        for (kk, seg) in piece.segments().enumerate() {
                            let row = ((ci * b + bi) * s + slot) * k + kk;
                            seg_mask[row] = true;
                            put(&mut e_minus, row * 6, seg.a);
                            put(&mut e_minus, row * 6 + 3, seg.b);
                        }
                    }
                }
            }
            component_aabb.push(bounds.padded(BROADPHASE_PAD));
        }

        let m = obstacles.len();
        let c = obstacles.iter().map(|o| o.sphere_count()).max().unwrap_or(1);
        let mut layout = Self {
            n,
            b,
            s,
            k,
            m,
            c,
            pieces_per_sphere,
            e_plus,
            o_plus: vec![0.0; m * 24],
            e_minus,
            seg_mask,
            spline_radius,
            o_minus_c: vec![0.0; m * c * 3],
            o_minus_r: Vec::with_capacity(m),
            component_aabb,
            canonical_corners: Vec::with_capacity(m),
            canonical_spheres: Vec::with_capacity(m),
        };
        for (oi, o) in obstacles.iter().enumerate() {
            let spheres = o.canonical_spheres();
            let r = spheres[0].radius;
            if spheres.iter().any(|s| s.radius.to_bits() != r.to_bits()) {
                return Err(Error::InvalidParameter(format!("obstacle {oi} spheres need a shared radius")));
            }
            // Short sphere lists are padded by repeating the last sphere.
            let mut padded = spheres.to_vec();
            padded.resize(c, *spheres.last().unwrap());
            layout.o_minus_r.push(r);
            layout.canonical_corners.push(*o.canonical_corners());
            layout.canonical_spheres.push(padded);
            layout.write_obstacle(oi, o.pose());
        }
        Ok(layout)
    }

    fn write_obstacle(&mut self, o: usize, pose: &Transform) {
        for (j, v) in posed_corners(&self.canonical_corners[o], pose).iter().enumerate() {
            put(&mut self.o_plus, (o * 8 + j) * 3, *v);
        }
        for (j, s) in posed_spheres(&self.canonical_spheres[o], pose).iter().enumerate() {
            put(&mut self.o_minus_c, (o * self.c + j) * 3, s.center);
        }
    }

    /// Rewrites the obstacle rows for absolute poses, always starting from
    /// the canonical geometry. Ids are checked before anything is written.
    pub fn update_transforms(&mut self, moves: &[(ObstacleId, Transform)]) -> Result<()> {
        if let Some(&(o, _)) = moves.iter().find(|(o, _)| *o as usize >= self.m) {
            return Err(Error::UnknownObstacle(o));
        }
        for (_, t) in moves {
            t.validate()?;
        }
        for (o, t) in moves {
            self.write_obstacle(*o as usize, t);
        }
        Ok(())
    }

    pub fn body_corners(&self, comp: usize, body: usize) -> Corners {
        let base = (comp * self.b + body) * 24;
        std::array::from_fn(|j| get(&self.e_plus, base + j * 3))
    }

    pub fn obstacle_corners(&self, o: usize) -> Corners {
        std::array::from_fn(|j| get(&self.o_plus, (o * 8 + j) * 3))
    }

    pub fn obstacle_sphere(&self, o: usize, j: usize) -> Sphere {
        Sphere::new(get(&self.o_minus_c, (o * self.c + j) * 3), self.o_minus_r[o])
    }

    pub fn obstacle_spheres(&self, o: usize) -> Vec<Sphere> {
        (0..self.c).map(|j| self.obstacle_sphere(o, j)).collect()
    }

    /// Bounds of an obstacle's spheres.
    pub fn obstacle_inner_aabb(&self, o: usize) -> Aabb {
        self.obstacle_spheres(o).iter().fold(Aabb::EMPTY, |b, s| b.union(&s.aabb()))
    }

    pub fn segment_row(&self, comp: usize, body: usize, slot: usize, k: usize) -> usize {
        ((comp * self.b + body) * self.s + slot) * self.k + k
    }

    pub fn segment(&self, row: usize) -> Segment {
        Segment::new(get(&self.e_minus, row * 6), get(&self.e_minus, row * 6 + 3))
    }

    /// Array lengths in declaration order, for shape audits.
    pub fn shapes(&self) -> Vec<(&'static str, Vec<usize>, usize)> {
        let (n, b, s, k, m, c) = (self.n, self.b, self.s, self.k, self.m, self.c);
        vec![
            ("E_plus", vec![n, b, 8, 3], self.e_plus.len()),
            ("O_plus", vec![m, 8, 3], self.o_plus.len()),
            ("E_minus", vec![n, b, s, k, 2, 3], self.e_minus.len()),
            ("seg_mask", vec![n, b, s, k], self.seg_mask.len()),
            ("spline_radius", vec![b, s], self.spline_radius.len()),
            ("O_minus_c", vec![m, c, 3], self.o_minus_c.len()),
            ("O_minus_r", vec![m], self.o_minus_r.len()),
        ]
    }

    /// CRC-32 of each array's little-endian bytes, in [`Self::shapes`] order.
    pub fn checksums(&self) -> Vec<u32> {
        let f = |v: &[f64]| {
            let mut h = crc32fast::Hasher::new();
            v.iter().for_each(|x| h.update(&x.to_le_bytes()));
            h.finalize()
        };
        let mask: Vec<u8> = self.seg_mask.iter().map(|&b| b as u8).collect();
        vec![
            f(&self.e_plus),
            f(&self.o_plus),
            f(&self.e_minus),
            crc32fast::hash(&mask),
            f(&self.spline_radius),
            f(&self.o_minus_c),
            f(&self.o_minus_r),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadmap::Roadmap;
    use crate::swept::{Configuration, RobotModel, DEFAULT_SEGMENT_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geometry(nodes: Vec<[f64; 6]>, edges: Vec<(u32, u32)>, eps: f64) -> RoadmapGeometry {
        geometry_with(nodes, edges, eps, Vec3::splat(0.5))
    }

    fn geometry_with(nodes: Vec<[f64; 6]>, edges: Vec<(u32, u32)>, eps: f64, half: Vec3) -> RoadmapGeometry {
        let robot = RobotModel::free_box(half, std::f64::consts::PI).unwrap();
        let nodes = nodes.into_iter().map(|q| Configuration::new(q.to_vec())).collect();
        let roadmap = Roadmap::new(nodes, edges).unwrap();
        RoadmapGeometry::build(&roadmap, &robot, eps, None, DEFAULT_SEGMENT_CAP).unwrap()
    }

    fn line() -> RoadmapGeometry {
        geometry(vec![[0.0; 6], [0.2, 0.0, 0.0, 0.0, 0.0, 0.0]], vec![(0, 1)], 0.3)
    }

    #[test]
    fn short_edge_uses_one_segment_and_masks_the_rest() {
        let g = line();
        let l = BatchLayout::serialize(&g, &[], Some(16)).unwrap();
        assert_eq!((l.n, l.b, l.k), (3, 1, 16));
        for slot in 0..l.s {
            let real: Vec<bool> = (0..16).map(|k| l.seg_mask[l.segment_row(2, 0, slot, k)]).collect();
            let used = g.components[2].under[0].get(slot / l.pieces_per_sphere).is_some()
                && slot % l.pieces_per_sphere == 0;
            if used {
                assert!(real[0]);
                assert!(real[1..].iter().all(|m| !m));
            } else {
                assert!(real.iter().all(|m| !m));
            }
        }
    }

    #[test]
    fn k_too_small_is_rejected() {
        let g = geometry_with(vec![[0.0; 6], [1.0, 0.0, 0.0, 0.0, 0.0, 2.5]], vec![(0, 1)], 0.2, Vec3::new(2.0, 0.5, 0.5));
        assert!(matches!(BatchLayout::serialize(&g, &[], Some(0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(BatchLayout::serialize(&g, &[], Some(1)), Err(Error::SplineOverflow { .. })));
        let tight = BatchLayout::serialize(&g, &[], None).unwrap();
        assert!(BatchLayout::serialize(&g, &[], Some(tight.k)).is_ok());
    }

    #[test]
    fn round_trip_is_bitwise() {
        let g = geometry(
            vec![[0.0; 6], [1.0, 0.5, 0.0, 0.3, 0.0, 0.0], [0.0, 1.5, 0.2, 0.0, -0.4, 0.1]],
            vec![(0, 1), (1, 2), (0, 2)],
            0.2,
        );
        let l = BatchLayout::serialize(&g, &[], None).unwrap();
        for (ci, comp) in g.components.iter().enumerate() {
            for (bi, obb) in comp.over.iter().enumerate() {
                let a = l.body_corners(ci, bi);
                for (x, y) in a.iter().zip(obb.corners().iter()) {
                    assert_eq!(x.to_array().map(f64::to_bits), y.to_array().map(f64::to_bits));
                }
            }
            for (bi, body) in comp.under.iter().enumerate() {
                for (si, pieces) in body.iter().enumerate() {
                    for (pi, piece) in pieces.iter().enumerate() {
                        let slot = si * l.pieces_per_sphere + pi;
                        let segs: Vec<Segment> = piece.segments().collect();
                        for k in 0..l.k {
                            let row = l.segment_row(ci, bi, slot, k);
                            assert_eq!(l.seg_mask[row], k < segs.len());
                            if k < segs.len() {
                                let s = l.segment(row);
                                assert_eq!(s.a.to_array().map(f64::to_bits), segs[k].a.to_array().map(f64::to_bits));
                                assert_eq!(s.b.to_array().map(f64::to_bits), segs[k].b.to_array().map(f64::to_bits));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shapes_match_lengths() {
        let obstacles = vec![
            ObstacleModel::new(Vec3::new(1.0, 0.5, 0.5), None).unwrap(),
            ObstacleModel::new(Vec3::splat(0.5), None).unwrap(),
        ];
        let l = BatchLayout::serialize(&line(), &obstacles, None).unwrap();
        for (name, dims, len) in l.shapes() {
            assert_eq!(dims.iter().product::<usize>(), len, "{name}");
        }
        assert_eq!(l.checksums().len(), 7);
    }

    #[test]
    fn transforms_follow_poses() {
        let o = ObstacleModel::new(Vec3::new(1.0, 0.5, 0.25), None).unwrap();
        let mut l = BatchLayout::serialize(&line(), &[o.clone()], None).unwrap();
        l.update_transforms(&[(0, Transform::IDENTITY)]).unwrap();
        assert_eq!(l.obstacle_corners(0), *o.canonical_corners());
        let t = Transform::from_translation(Vec3::new(1.0, -2.0, 3.0));
        l.update_transforms(&[(0, t)]).unwrap();
        for (a, b) in l.obstacle_corners(0).iter().zip(o.canonical_corners()) {
            assert!((*a - (*b + Vec3::new(1.0, -2.0, 3.0))).norm() < 1e-12);
        }
        assert!(matches!(l.update_transforms(&[(0, t), (1, t)]), Err(Error::UnknownObstacle(1))));
        assert_eq!(l.obstacle_corners(0), posed_corners(o.canonical_corners(), &t));
    }

    #[test]
    fn many_moves_do_not_drift() {
        let o = ObstacleModel::new(Vec3::new(1.0, 0.5, 0.25), None).unwrap();
        let mut l = BatchLayout::serialize(&line(), &[o.clone()], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let t = Transform::from_translation(Vec3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ));
            l.update_transforms(&[(0, t)]).unwrap();
        }
        l.update_transforms(&[(0, Transform::IDENTITY)]).unwrap();
        for (a, b) in l.obstacle_corners(0).iter().zip(o.canonical_corners()) {
            assert!((*a - *b).norm() < 1e-7);
        }
    }
}
