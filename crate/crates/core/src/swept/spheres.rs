//! Inner sphere sets for robot bodies and obstacles.

use super::robot::RobotModel;
use crate::error::{Error, Result};
use crate::geometry::{Sphere, Vec3};

/// Containment slack for the sphere-in-box test.
const CONTAIN_TOL: f64 = 1e-12;

fn longest_axis(h: Vec3) -> usize {
    if h.x >= h.y && h.x >= h.z {
        0
    } else if h.y >= h.z {
        1
    } else {
        2
    }
}

/// Default sphere count for a box: `max(1, ⌈longest / shortest⌉)`.
pub fn default_sphere_count(half_extents: Vec3) -> usize {
    ((half_extents.max_element() / half_extents.min_element()).ceil() as usize).max(1)
}

/// Centers of `count` spheres of radius `radius`, evenly spaced along the
/// longest axis of a box centered at the origin.
fn spaced_centers(half_extents: Vec3, count: usize, radius: f64) -> Vec<Vec3> {
    let axis = longest_axis(half_extents);
    let reach = half_extents[axis] - radius;
    (0..count)
        .map(|i| {
            let t = if count == 1 {
                0.0
            } else {
                -reach + 2.0 * reach * i as f64 / (count - 1) as f64
            };
            Vec3::axis(axis) * t
        })
        .collect()
}

/// `|center_k| + radius ≤ half_extent_k` on every axis.
pub fn sphere_in_box(s: &Sphere, half_extents: Vec3) -> bool {
    (0..3).all(|k| s.center[k].abs() + s.radius <= half_extents[k] + CONTAIN_TOL)
}

/// Inner spheres of an obstacle box: radius equal to the smallest
/// half-extent, `count` centers spread evenly along the longest axis.
pub fn obstacle_inner_spheres(half_extents: Vec3, count: usize) -> Result<Vec<Sphere>> {
    if count == 0 {
        return Err(Error::InvalidParameter("obstacle sphere count must be at least 1".into()));
    }
    if !half_extents.is_finite() || half_extents.min_element() <= 0.0 {
        return Err(Error::InvalidParameter("obstacle half-extents must be positive".into()));
    }
    let r = half_extents.min_element();
    Ok(spaced_centers(half_extents, count, r)
        .into_iter()
        .map(|c| Sphere::new(c, r))
        .collect())
}

/// Inner spheres of every robot body, in body-local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySpheres {
    pub per_body: Vec<Vec<Sphere>>,
}

impl BodySpheres {
    /// Places `count` spheres per body (default [`default_sphere_count`])
    /// along each body's longest axis.
    ///
    /// Each sphere's radius is the body's smallest half-extent minus
    /// `L·step/2`, where `L` bounds the speed of the sphere center per unit of
    /// DOF distance and `step` is the edge discretization. Consecutive sampled
    /// centers are then at most `L·step` apart, so a sphere swept along the
    /// chord between them stays inside the full-size spheres at the two
    /// samples, which lie inside the body box at sampled configurations.
    pub fn for_robot(model: &RobotModel, count: Option<usize>, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidStep(step));
        }
        let mut per_body = Vec::with_capacity(model.body_count());
        for (b, body) in model.bodies().iter().enumerate() {
            let h = body.half_extents;
            let n = count.unwrap_or_else(|| default_sphere_count(h));
            if n == 0 {
                return Err(Error::InvalidParameter("sphere count must be at least 1".into()));
            }
            let full = h.min_element();
            let centers = spaced_centers(h, n, full);
            let spheres = centers
                .into_iter()
                .map(|c| {
                    let r = full - 0.5 * model.point_speed_bound(b, c) * step;
                    if r <= 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "discretization step {step} is too coarse for the inner spheres of body {b}"
                        )));
                    }
                    Ok(Sphere::new(c, r))
                })
                .collect::<Result<Vec<_>>>()?;
            per_body.push(spheres);
        }
        let s = Self { per_body };
        s.validate(model)?;
        Ok(s)
    }

    pub fn validate(&self, model: &RobotModel) -> Result<()> {
        if self.per_body.len() != model.body_count() {
            return Err(Error::InvalidParameter("sphere set does not match body count".into()));
        }
        for (spheres, body) in self.per_body.iter().zip(model.bodies()) {
            if spheres.is_empty() || spheres.iter().any(|s| !(s.radius > 0.0) || !sphere_in_box(s, body.half_extents)) {
                return Err(Error::InvalidParameter("body sphere not contained in its box".into()));
            }
        }
        Ok(())
    }

    pub fn max_per_body(&self) -> usize {
        self.per_body.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_single_sphere() {
        let s = obstacle_inner_spheres(Vec3::splat(1.0), 1).unwrap();
        assert_eq!(s, vec![Sphere::new(Vec3::ZERO, 1.0)]);
    }

    #[test]
    fn long_box_even_spacing() {
        let h = Vec3::new(5.0, 0.5, 0.5);
        let s = obstacle_inner_spheres(h, 5).unwrap();
        let xs: Vec<f64> = s.iter().map(|s| s.center.x).collect();
        let expect = [-4.5, -2.25, 0.0, 2.25, 4.5];
        for (x, e) in xs.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12);
        }
        // Independent spacing check: equal gaps spanning [-4.5, 4.5].
        let gaps: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.iter().all(|g| (g - gaps[0]).abs() < 1e-12));
        for sp in &s {
            assert_eq!(sp.radius, 0.5);
            assert!(sphere_in_box(sp, h));
        }
    }

    #[test]
    fn containment_for_many_shapes() {
        for h in [Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.1, 0.1, 7.0), Vec3::new(4.0, 4.0, 4.0)] {
            for c in 1..8 {
                for s in obstacle_inner_spheres(h, c).unwrap() {
                    assert!(sphere_in_box(&s, h));
                }
            }
        }
        assert!(obstacle_inner_spheres(Vec3::splat(1.0), 0).is_err());
    }

    #[test]
    fn robot_spheres_shrink_by_step() {
        let m = RobotModel::free_box(Vec3::splat(0.5), 3.0).unwrap();
        let s = BodySpheres::for_robot(&m, None, 0.05).unwrap();
        assert_eq!(s.per_body[0].len(), 1);
        assert!((s.per_body[0][0].radius - 0.475).abs() < 1e-12);
        assert!(BodySpheres::for_robot(&m, None, 2.0).is_err());
        let long = RobotModel::free_box(Vec3::new(2.0, 0.5, 0.5), 3.0).unwrap();
        let s = BodySpheres::for_robot(&long, None, 0.05).unwrap();
        assert_eq!(s.per_body[0].len(), 4);
        s.validate(&long).unwrap();
    }
}
