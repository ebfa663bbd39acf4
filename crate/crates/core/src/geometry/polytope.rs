//! Convex polytopes and an exact separating-plane intersection test. This is
//! the narrow phase behind the ground-truth collision oracle.

use super::obb::{Corners, Obb};
use super::transform::{Rigid, Transform};
use super::vec::Vec3;
use crate::error::{Error, Result};

const PARALLEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub indices: Vec<usize>,
    pub normal: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    vertices: Vec<Vec3>,
    faces: Vec<Face>,
    /// Unique unit edge directions (antiparallel duplicates removed).
    edge_dirs: Vec<Vec3>,
    degenerate: bool,
}

fn push_unique_dir(dirs: &mut Vec<Vec3>, d: Vec3) {
    if dirs.iter().all(|e| e.cross(d).norm_squared() >= PARALLEL_EPS) {
        dirs.push(d);
    }
}

impl ConvexPolytope {
    /// Builds a polytope from vertices and face index loops. Face normals are
    /// computed with Newell's method and oriented away from the vertex
    /// centroid. Every vertex must satisfy every face half-space within 1e-9
    /// (scaled by the polytope size). Flat inputs are accepted but flagged
    /// degenerate; [`polytopes_intersect`] rejects them.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if vertices.len() < 4 {
            return Err(Error::InvalidPolytope("fewer than 4 vertices".into()));
        }
        let centroid = vertices.iter().fold(Vec3::ZERO, |s, v| s + *v) * (1.0 / vertices.len() as f64);
        let scale = vertices
            .iter()
            .map(|v| (*v - centroid).norm())
            .fold(0.0, f64::max)
            .max(1.0);
        let degenerate = is_flat(&vertices, scale);

        let mut out_faces = Vec::with_capacity(faces.len());
        let mut edge_dirs = Vec::new();
        for idx in faces {
            if idx.len() < 3 || idx.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidPolytope("bad face index list".into()));
            }
            let mut n = Vec3::ZERO;
            for (k, &i) in idx.iter().enumerate() {
                let a = vertices[i];
                let b = vertices[idx[(k + 1) % idx.len()]];
                n += Vec3::new(
                    (a.y - b.y) * (a.z + b.z),
                    (a.z - b.z) * (a.x + b.x),
                    (a.x - b.x) * (a.y + b.y),
                );
                if let Some(d) = (b - a).normalized() {
                    push_unique_dir(&mut edge_dirs, d);
                }
            }
            let face_center = idx.iter().fold(Vec3::ZERO, |s, &i| s + vertices[i]) * (1.0 / idx.len() as f64);
            let mut normal = match n.normalized() {
                Some(n) => n,
                None if degenerate => Vec3::ZERO,
                None => return Err(Error::InvalidPolytope("zero-area face".into())),
            };
            if normal.dot(face_center - centroid) < 0.0 {
                normal = -normal;
            }
            if !degenerate {
                let offset = normal.dot(face_center);
                if vertices.iter().any(|v| normal.dot(*v) - offset > 1e-9 * scale) {
                    return Err(Error::InvalidPolytope("vertex outside a face half-space".into()));
                }
            }
            out_faces.push(Face {
                indices: idx,
                normal,
            });
        }
        Ok(Self {
            vertices,
            faces: out_faces,
            edge_dirs,
            degenerate,
        })
    }

    pub fn tetrahedron(v: [Vec3; 4]) -> Result<Self> {
        Self::new(
            v.to_vec(),
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
    }

    /// The box as a polytope, with corners in [`Obb::corners`] order.
    pub fn from_obb(o: &Obb) -> Result<Self> {
        Self::from_corners(&o.corners())
    }

    /// A box given by its eight corners in [`Obb::corners`] order.
    pub fn from_corners(corners: &Corners) -> Result<Self> {
        let faces = (0..3)
            .flat_map(|k| {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                [0usize, 1].map(move |side| {
                    [(0, 0), (1, 0), (1, 1), (0, 1)]
                        .iter()
                        .map(|&(bi, bj)| (side << k) | (bi << i) | (bj << j))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        Self::new(corners.to_vec(), faces)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    fn candidate_axes<'a>(&'a self, other: &'a Self) -> impl Iterator<Item = Vec3> + 'a {
        let faces = self
            .faces
            .iter()
            .chain(other.faces.iter())
            .map(|f| f.normal);
        let crosses = self.edge_dirs.iter().flat_map(move |a| {
            other
                .edge_dirs
                .iter()
                .map(move |b| a.cross(*b))
                .filter(|c| c.norm_squared() >= PARALLEL_EPS)
        });
        faces.chain(crosses)
    }

    fn project(&self, axis: Vec3) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let d = v.dot(axis);
            (lo.min(d), hi.max(d))
        })
    }
}

fn is_flat(vertices: &[Vec3], scale: f64) -> bool {
    let tol = 1e-12 * scale;
    let v0 = vertices[0];
    let Some((v1, _)) = vertices
        .iter()
        .map(|v| (*v, (*v - v0).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return true;
    };
    let line = v1 - v0;
    let Some((v2, area)) = vertices
        .iter()
        .map(|v| (*v, line.cross(*v - v0).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return true;
    };
    if area <= tol * line.norm().max(tol) {
        return true;
    }
    let n = line.cross(v2 - v0).normalized().unwrap_or(Vec3::ZERO);
    vertices.iter().all(|v| n.dot(*v - v0).abs() <= tol)
}

impl Rigid for ConvexPolytope {
    fn transformed(&self, t: &Transform) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| t.apply_point(*v)).collect(),
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    indices: f.indices.clone(),
                    normal: t.apply_vector(f.normal),
                })
                .collect(),
            edge_dirs: self.edge_dirs.iter().map(|d| t.apply_vector(*d)).collect(),
            degenerate: self.degenerate,
        }
    }
}

/// Exact convex–convex intersection decision by separating-plane search over
/// every face normal and every edge–edge cross product of both polytopes.
/// Touching polytopes intersect.
pub fn polytopes_intersect(a: &ConvexPolytope, b: &ConvexPolytope) -> Result<bool> {
    if a.degenerate || b.degenerate {
        return Err(Error::DegeneratePolytope);
    }
    Ok(!a.candidate_axes(b).any(|axis| {
        let (alo, ahi) = a.project(axis);
        let (blo, bhi) = b.project(axis);
        ahi < blo || bhi < alo
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_transform, obb_intersects_obb, sat_margin, Mat3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tet(offset: Vec3) -> ConvexPolytope {
        ConvexPolytope::tetrahedron([
            Vec3::ZERO + offset,
            Vec3::X + offset,
            Vec3::Y + offset,
            Vec3::Z + offset,
        ])
        .unwrap()
    }

    #[test]
    fn tetrahedra() {
        assert!(polytopes_intersect(&tet(Vec3::ZERO), &tet(Vec3::ZERO)).unwrap());
        assert!(!polytopes_intersect(&tet(Vec3::ZERO), &tet(Vec3::new(3.0, 0.0, 0.0))).unwrap());
        // Separated only along the slanted face normal (1,1,1)/√3.
        let shifted = tet(Vec3::splat(0.34));
        assert!(!polytopes_intersect(&tet(Vec3::ZERO), &shifted).unwrap());
        assert!(polytopes_intersect(&tet(Vec3::ZERO), &tet(Vec3::splat(0.33))).unwrap());
    }

    #[test]
    fn flat_polytope_is_rejected() {
        let flat = ConvexPolytope::new(
            vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::new(1.0, 1.0, 0.0)],
            vec![vec![0, 1, 3, 2]],
        )
        .unwrap();
        assert!(flat.is_degenerate());
        let err = polytopes_intersect(&flat, &tet(Vec3::ZERO)).unwrap_err();
        assert_eq!(err.to_string(), "degenerate polytope");
    }

    #[test]
    fn rejects_nonconvex_faces() {
        let r = ConvexPolytope::new(
            vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::Z, Vec3::splat(2.0)],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        );
        assert!(r.is_err());
    }

    fn random_obb(rng: &mut ChaCha8Rng) -> Obb {
        let r = Mat3::from_euler_xyz(rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2), rng.gen_range(-3.2..3.2));
        Obb::new(
            Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            r.cols,
            Vec3::new(rng.gen_range(0.05..1.5), rng.gen_range(0.05..1.5), rng.gen_range(0.05..1.5)),
        )
    }

    #[test]
    fn box_polytopes_agree_with_obb_sat() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut hits = 0;
        for _ in 0..10_000 {
            let (a, b) = (random_obb(&mut rng), random_obb(&mut rng));
            if sat_margin(&a, &b).abs() < 1e-6 {
                continue;
            }
            let pa = ConvexPolytope::from_obb(&a).unwrap();
            let pb = ConvexPolytope::from_obb(&b).unwrap();
            let exact = polytopes_intersect(&pa, &pb).unwrap();
            assert_eq!(obb_intersects_obb(&a, &b), exact);
            hits += exact as usize;
        }
        assert!(hits > 1000 && hits < 9000, "poorly mixed sample: {hits}");
    }

    #[test]
    fn transform_moves_polytope() {
        let t = Transform::new(Mat3::from_euler_xyz(0.2, 0.4, -0.9), Vec3::new(1.0, 2.0, 3.0));
        let o = Obb::aligned(Vec3::ZERO, Vec3::new(1.0, 0.5, 0.25));
        let moved = apply_transform(&t, &ConvexPolytope::from_obb(&o).unwrap());
        let direct = ConvexPolytope::from_obb(&apply_transform(&t, &o)).unwrap();
        for (a, b) in moved.vertices().iter().zip(direct.vertices()) {
            assert!((*a - *b).norm() < 1e-12);
        }
        assert!(polytopes_intersect(&moved, &direct).unwrap());
    }
}
