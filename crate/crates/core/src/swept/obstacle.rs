use super::spheres::{default_sphere_count, obstacle_inner_spheres, sphere_in_box};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, ConvexPolytope, Corners, Obb, Sphere, Transform, Vec3};

/// A box obstacle with its outer box, inner spheres and current pose.
///
/// The canonical geometry never changes; the posed geometry is always
/// recomputed from it, so long move sequences do not accumulate drift.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleModel {
    half_extents: Vec3,
    canonical_corners: Corners,
    canonical_spheres: Vec<Sphere>,
    pose: Transform,
}

impl ObstacleModel {
    pub fn new(half_extents: Vec3, sphere_count: Option<usize>) -> Result<Self> {
        let count = sphere_count.unwrap_or_else(|| default_sphere_count(half_extents));
        let spheres = obstacle_inner_spheres(half_extents, count)?;
        Self::with_spheres(half_extents, spheres)
    }

    pub fn with_spheres(half_extents: Vec3, spheres: Vec<Sphere>) -> Result<Self> {
        if spheres.is_empty() || spheres.iter().any(|s| !sphere_in_box(s, half_extents)) {
            return Err(Error::InvalidParameter("obstacle spheres must lie inside the box".into()));
        }
        Ok(Self {
            half_extents,
            canonical_corners: Obb::aligned(Vec3::ZERO, half_extents).corners(),
            canonical_spheres: spheres,
            pose: Transform::IDENTITY,
        })
    }

    pub fn half_extents(&self) -> Vec3 {
        self.half_extents
    }

    pub fn pose(&self) -> &Transform {
        &self.pose
    }

    pub fn set_pose(&mut self, pose: Transform) -> Result<()> {
        pose.validate()?;
        self.pose = pose;
        Ok(())
    }

    pub fn with_pose(mut self, pose: Transform) -> Result<Self> {
        self.set_pose(pose)?;
        Ok(self)
    }

    pub fn canonical_corners(&self) -> &Corners {
        &self.canonical_corners
    }

    pub fn canonical_spheres(&self) -> &[Sphere] {
        &self.canonical_spheres
    }

    pub fn sphere_count(&self) -> usize {
        self.canonical_spheres.len()
    }

    /// Shared radius of the inner spheres.
    pub fn sphere_radius(&self) -> f64 {
        self.canonical_spheres[0].radius
    }

    /// Corners of the posed box: the pose applied to each canonical corner.
    pub fn outer_corners(&self) -> Corners {
        posed_corners(&self.canonical_corners, &self.pose)
    }

    pub fn outer(&self) -> Obb {
        Obb::new(
            self.pose.translation,
            self.pose.rotation.cols,
            self.half_extents,
        )
    }

    pub fn inner(&self) -> Vec<Sphere> {
        posed_spheres(&self.canonical_spheres, &self.pose)
    }

    pub fn outer_aabb(&self) -> Aabb {
        Aabb::from_points(self.outer_corners().iter())
    }

    /// Tight union of the inner spheres' boxes.
    pub fn inner_aabb(&self) -> Aabb {
        self.inner().iter().fold(Aabb::EMPTY, |b, s| b.union(&s.aabb()))
    }

    pub fn polytope(&self) -> ConvexPolytope {
        ConvexPolytope::from_corners(&self.outer_corners()).expect("obstacle boxes have positive extents")
    }
}

pub fn posed_corners(canonical: &Corners, pose: &Transform) -> Corners {
    canonical.map(|c| pose.apply_point(c))
}

pub fn posed_spheres(canonical: &[Sphere], pose: &Transform) -> Vec<Sphere> {
    canonical
        .iter()
        .map(|s| Sphere::new(pose.apply_point(s.center), s.radius))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mat3;

    #[test]
    fn posed_geometry() {
        let mut o = ObstacleModel::new(Vec3::new(5.0, 1.0, 1.0), None).unwrap();
        assert_eq!(o.sphere_count(), 5);
        let t = Transform::new(Mat3::rot_z(0.7), Vec3::new(3.0, 4.0, 5.0));
        o.set_pose(t).unwrap();
        for (a, b) in o.outer_corners().iter().zip(o.outer().corners()) {
            assert!((*a - b).norm() < 1e-12);
        }
        for s in o.inner() {
            let local = t.inverse().apply_point(s.center);
            assert!(sphere_in_box(&Sphere::new(local, s.radius - 1e-9), o.half_extents()));
        }
        assert!(o.set_pose(Transform::from_rotation(Mat3::from_cols(Vec3::X, Vec3::X, Vec3::Z))).is_err());
    }
}
