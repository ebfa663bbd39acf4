//! Box-bodied robot models and their forward kinematics.

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Mat3, Obb, Transform, Vec3};

/// A point in configuration space. Translations are in workspace length
/// units, rotations and joint angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration(pub Vec<f64>);

impl Configuration {
    pub fn new(dofs: Vec<f64>) -> Self {
        Self(dofs)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn dofs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Unweighted Euclidean distance in DOF space.
    pub fn distance(&self, other: &Configuration) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A rigid box body, centered on its local frame origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyBox {
    pub half_extents: Vec3,
    /// Pose of the box relative to the link (or robot) frame it rides on.
    pub local: Transform,
}

impl BodyBox {
    pub fn new(half_extents: Vec3) -> Self {
        Self {
            half_extents,
            local: Transform::IDENTITY,
        }
    }

    pub fn with_local(half_extents: Vec3, local: Transform) -> Self {
        Self { half_extents, local }
    }

    /// The box in its own frame.
    pub fn local_obb(&self) -> Obb {
        Obb::aligned(Vec3::ZERO, self.half_extents)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    /// Unit rotation axis in the parent frame.
    pub axis: Vec3,
    /// Offset of this joint's pivot from the parent joint frame.
    pub origin: Vec3,
    /// Sampling range of the joint angle, radians.
    pub limits: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kinematics {
    /// Three translations followed by fixed-axis XYZ Euler angles. Rotations
    /// are sampled in `[-rotation_limit, rotation_limit]`.
    FreeFlying { rotation_limit: f64 },
    /// Revolute chain: body `i` rides on joint `i`.
    SerialChain { base: Transform, joints: Vec<Joint> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    bodies: Vec<BodyBox>,
    kinematics: Kinematics,
}

impl RobotModel {
    pub fn new(bodies: Vec<BodyBox>, kinematics: Kinematics) -> Result<Self> {
        if bodies.is_empty() {
            return Err(Error::InvalidRobot("robot needs at least one body".into()));
        }
        for b in &bodies {
            let h = b.half_extents;
            if !h.is_finite() || h.min_element() <= 0.0 {
                return Err(Error::InvalidRobot(format!("body half-extents must be positive, got {h:?}")));
            }
            b.local.validate()?;
        }
        let kinematics = match kinematics {
            Kinematics::FreeFlying { rotation_limit } => {
                if !(rotation_limit.is_finite() && rotation_limit >= 0.0) {
                    return Err(Error::InvalidRobot("rotation limit must be finite and nonnegative".into()));
                }
                Kinematics::FreeFlying { rotation_limit }
            }
            Kinematics::SerialChain { base, joints } => {
                base.validate()?;
                if joints.len() != bodies.len() {
                    return Err(Error::InvalidRobot(format!(
                        "serial chain has {} joints for {} bodies",
                        joints.len(),
                        bodies.len()
                    )));
                }
                let joints = joints
                    .into_iter()
                    .map(|j| {
                        let axis = j
                            .axis
                            .normalized()
                            .ok_or_else(|| Error::InvalidRobot("zero joint axis".into()))?;
                        if !j.origin.is_finite() || !(j.limits.0 <= j.limits.1) {
                            return Err(Error::InvalidRobot("joint offset or limits invalid".into()));
                        }
                        Ok(Joint { axis, ..j })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Kinematics::SerialChain { base, joints }
            }
        };
        Ok(Self { bodies, kinematics })
    }

    /// A single free-flying box.
    pub fn free_box(half_extents: Vec3, rotation_limit: f64) -> Result<Self> {
        Self::new(
            vec![BodyBox::new(half_extents)],
            Kinematics::FreeFlying { rotation_limit },
        )
    }

    pub fn bodies(&self) -> &[BodyBox] {
        &self.bodies
    }

    pub fn body_count(&self) -> usize {
        self.bodies.len()
    }

    pub fn kinematics(&self) -> &Kinematics {
        &self.kinematics
    }

    pub fn dof_count(&self) -> usize {
        match &self.kinematics {
            Kinematics::FreeFlying { .. } => 6,
            Kinematics::SerialChain { joints, .. } => joints.len(),
        }
    }

    pub fn shortest_half_extent(&self) -> f64 {
        self.bodies
            .iter()
            .map(|b| b.half_extents.min_element())
            .fold(f64::INFINITY, f64::min)
    }

    /// Per-DOF sampling ranges. Free-flying translations span `env`.
    pub fn dof_bounds(&self, env: &Aabb) -> Vec<(f64, f64)> {
        match &self.kinematics {
            Kinematics::FreeFlying { rotation_limit } => {
                let mut b: Vec<_> = (0..3).map(|k| (env.min[k], env.max[k])).collect();
                b.extend([(-rotation_limit, *rotation_limit); 3]);
                b
            }
            Kinematics::SerialChain { joints, .. } => joints.iter().map(|j| j.limits).collect(),
        }
    }

    pub fn check_configuration(&self, c: &Configuration) -> Result<()> {
        if c.len() != self.dof_count() {
            return Err(Error::DofMismatch {
                expected: self.dof_count(),
                got: c.len(),
            });
        }
        if c.0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// World transform of every body at configuration `c`.
    pub fn forward_kinematics(&self, c: &Configuration) -> Result<Vec<Transform>> {
        self.check_configuration(c)?;
        Ok(self.fk_unchecked(c.dofs()))
    }

    pub(crate) fn fk_unchecked(&self, q: &[f64]) -> Vec<Transform> {
        match &self.kinematics {
            Kinematics::FreeFlying { .. } => {
                let root = Transform::new(
                    Mat3::from_euler_xyz(q[3], q[4], q[5]),
                    Vec3::new(q[0], q[1], q[2]),
                );
                self.bodies.iter().map(|b| root.compose(&b.local)).collect()
            }
            Kinematics::SerialChain { base, joints } => {
                let mut frame = *base;
                joints
                    .iter()
                    .zip(&self.bodies)
                    .zip(q)
                    .map(|((j, b), &angle)| {
                        frame = frame
                            .compose(&Transform::from_translation(j.origin))
                            .compose(&Transform::from_rotation(Mat3::from_axis_angle(j.axis, angle)));
                        frame.compose(&b.local)
                    })
                    .collect()
            }
        }
    }

    /// Upper bound on how far the body-frame point `p` of body `body` moves
    /// per unit of DOF-space distance, for any configuration.
    pub fn point_speed_bound(&self, body: usize, p: Vec3) -> f64 {
        let in_link = self.bodies[body].local.apply_point(p);
        match &self.kinematics {
            Kinematics::FreeFlying { .. } => {
                // |Δt| + |p|·(|Δα|+|Δβ|+|Δγ|) ≤ sqrt(1 + 3|p|²)·|Δq|
                (1.0 + 3.0 * in_link.norm_squared()).sqrt()
            }
            Kinematics::SerialChain { joints, .. } => {
                // Joint j's pivot is at most Σ_{i>j} |o_i| + |p| from the point.
                let sum_sq: f64 = (0..=body)
                    .map(|j| {
                        let lever: f64 =
                            joints[j + 1..=body].iter().map(|jt| jt.origin.norm()).sum::<f64>() + in_link.norm();
                        lever * lever
                    })
                    .sum();
                sum_sq.sqrt()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn planar_two_link(l1: f64) -> RobotModel {
        let link = |len: f64| BodyBox::with_local(Vec3::new(len / 2.0, 0.1, 0.1), Transform::from_translation(Vec3::new(len / 2.0, 0.0, 0.0)));
        RobotModel::new(
            vec![link(l1), link(1.0)],
            Kinematics::SerialChain {
                base: Transform::IDENTITY,
                joints: vec![
                    Joint { axis: Vec3::Z, origin: Vec3::ZERO, limits: (-3.0, 3.0) },
                    Joint { axis: Vec3::Z, origin: Vec3::new(l1, 0.0, 0.0), limits: (-3.0, 3.0) },
                ],
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_configuration_is_local_pose() {
        let body = BodyBox::with_local(Vec3::splat(0.5), Transform::from_translation(Vec3::new(0.0, 1.0, 0.0)));
        let m = RobotModel::new(vec![body.clone()], Kinematics::FreeFlying { rotation_limit: 3.0 }).unwrap();
        let t = m.forward_kinematics(&Configuration::zeros(6)).unwrap();
        assert_eq!(t[0], body.local);
    }

    #[test]
    fn free_flying_translation() {
        let m = RobotModel::free_box(Vec3::splat(0.5), 3.0).unwrap();
        let t = m.forward_kinematics(&Configuration::new(vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(t[0].translation, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(t[0].rotation, Mat3::IDENTITY);
    }

    #[test]
    fn two_link_planar_chain() {
        let l1 = 2.0;
        let m = planar_two_link(l1);
        let q = [FRAC_PI_2, 0.0];
        let t = m.forward_kinematics(&Configuration::new(q.to_vec())).unwrap();
        // Hand-derived: link-2 pivot at l1·(cos q1, sin q1); link-2 body center
        // half a link further along q1 + q2.
        let pivot = Vec3::new(l1 * q[0].cos(), l1 * q[0].sin(), 0.0);
        let center2 = pivot + Vec3::new(0.5 * (q[0] + q[1]).cos(), 0.5 * (q[0] + q[1]).sin(), 0.0);
        assert!((t[1].translation - center2).norm() < 1e-12);
        assert!((t[1].translation - Vec3::new(0.0, 2.5, 0.0)).norm() < 1e-12);
        let tip2 = t[1].apply_point(Vec3::new(-0.5, 0.0, 0.0));
        assert!((tip2 - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(RobotModel::new(vec![], Kinematics::FreeFlying { rotation_limit: 1.0 }).is_err());
        assert!(RobotModel::free_box(Vec3::new(1.0, 0.0, 1.0), 1.0).is_err());
        let m = RobotModel::free_box(Vec3::splat(0.5), 1.0).unwrap();
        assert!(matches!(
            m.forward_kinematics(&Configuration::zeros(3)),
            Err(Error::DofMismatch { expected: 6, got: 3 })
        ));
    }

    #[test]
    fn speed_bound_holds_numerically() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let chain = planar_two_link(1.5);
        let free = RobotModel::new(
            vec![BodyBox::with_local(Vec3::splat(0.5), Transform::from_translation(Vec3::new(0.3, -0.2, 0.7)))],
            Kinematics::FreeFlying { rotation_limit: 3.0 },
        )
        .unwrap();
        for m in [&chain, &free] {
            for _ in 0..500 {
                let n = m.dof_count();
                let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let dq: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e-4..1e-4)).collect();
                let q2: Vec<f64> = q.iter().zip(&dq).map(|(a, b)| a + b).collect();
                let body = m.body_count() - 1;
                let p = Vec3::new(0.2, 0.05, -0.1);
                let a = m.fk_unchecked(&q)[body].apply_point(p);
                let b = m.fk_unchecked(&q2)[body].apply_point(p);
                let step = Configuration::new(q).distance(&Configuration::new(q2));
                assert!((a - b).norm() <= m.point_speed_bound(body, p) * step * (1.0 + 1e-6));
            }
        }
    }
}
