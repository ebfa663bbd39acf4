//! Outer (oriented box) and inner (sphere-swept polyline) approximations of
//! the volume a robot sweeps along a roadmap component.

use super::robot::{Configuration, RobotModel};
use super::spheres::BodySpheres;
use super::spline::{simplify_spline, split_spline, Spline};
use crate::error::{Error, Result};
use crate::geometry::{aabb_of_obb, obb_from_points, Aabb, Obb, Transform, Vec3};

/// Default cap on segments per spline piece in the batch layout.
pub const DEFAULT_SEGMENT_CAP: usize = 16;

/// `N = max(2, ⌈‖b − a‖/ε⌉ + 1)` configurations linearly interpolated from
/// `a` to `b`, both endpoints included exactly.
pub fn discretize_edge(a: &Configuration, b: &Configuration, eps: f64) -> Result<Vec<Configuration>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidStep(eps));
    }
    if a.len() != b.len() {
        return Err(Error::DofMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let len = a.distance(b);
    let n = ((len / eps).ceil() as usize + 1).max(2);
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                return b.clone();
            }
            let t = i as f64 / last;
            Configuration::new(a.0.iter().zip(&b.0).map(|(x, y)| x + (y - x) * t).collect())
        })
        .collect())
}

/// Default discretization: a tenth of the thinnest body half-extent.
pub fn default_epsilon(model: &RobotModel) -> f64 {
    0.1 * model.shortest_half_extent()
}

fn fk_all(model: &RobotModel, cfgs: &[Configuration]) -> Result<Vec<Vec<Transform>>> {
    cfgs.iter().map(|c| model.forward_kinematics(c)).collect()
}

fn outer_from_poses(model: &RobotModel, poses: &[Vec<Transform>]) -> Result<Vec<Obb>> {
    let mut cloud: Vec<Vec3> = Vec::with_capacity(8 * poses.len());
    (0..model.body_count())
        .map(|b| {
            let local = model.bodies()[b].local_obb().corners();
            cloud.clear();
            for pose in poses {
                cloud.extend(local.iter().map(|c| pose[b].apply_point(*c)));
            }
            obb_from_points(&cloud)
        })
        .collect()
}

fn inner_from_poses(spheres: &BodySpheres, poses: &[Vec<Transform>]) -> Vec<Vec<Spline>> {
    spheres
        .per_body
        .iter()
        .enumerate()
        .map(|(b, body_spheres)| {
            body_spheres
                .iter()
                .map(|s| {
                    let raw: Vec<Vec3> = poses.iter().map(|p| p[b].apply_point(s.center)).collect();
                    Spline::new(simplify_spline(&raw, s.radius), s.radius)
                })
                .collect()
        })
        .collect()
}

/// One oriented box per body, fitted around the body's corners at every
/// configuration in `cfgs`.
pub fn build_outer_approx(model: &RobotModel, cfgs: &[Configuration]) -> Result<Vec<Obb>> {
    if cfgs.is_empty() {
        return Err(Error::InvalidParameter("no configurations".into()));
    }
    outer_from_poses(model, &fk_all(model, cfgs)?)
}

/// One simplified spline per (body, sphere): the sphere center traced through
/// `cfgs`.
pub fn build_inner_approx(model: &RobotModel, spheres: &BodySpheres, cfgs: &[Configuration]) -> Result<Vec<Vec<Spline>>> {
    if cfgs.is_empty() {
        return Err(Error::InvalidParameter("no configurations".into()));
    }
    spheres.validate(model)?;
    Ok(inner_from_poses(spheres, &fk_all(model, cfgs)?))
}

/// Both approximations of one roadmap component.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGeometry {
    /// One box per body.
    pub over: Vec<Obb>,
    /// `under[body][sphere]` holds the spline pieces (usually one) traced by
    /// that sphere, each with at most the segment cap.
    pub under: Vec<Vec<Vec<Spline>>>,
}

impl EdgeGeometry {
    /// Builds both approximations from a discretized component.
    pub fn build(model: &RobotModel, spheres: &BodySpheres, cfgs: &[Configuration], segment_cap: usize) -> Result<Self> {
        if cfgs.is_empty() {
            return Err(Error::InvalidParameter("no configurations".into()));
        }
        if segment_cap == 0 {
            return Err(Error::InvalidParameter("segment cap must be at least 1".into()));
        }
        let poses = fk_all(model, cfgs)?;
        let over = outer_from_poses(model, &poses)?;
        let under = inner_from_poses(spheres, &poses)
            .into_iter()
            .map(|body| body.iter().map(|s| split_spline(s, segment_cap)).collect())
            .collect();
        Ok(Self { over, under })
    }

    /// Discretizes the straight DOF-space motion `a → b` and builds its
    /// geometry. A node is the degenerate motion `a → a`.
    pub fn for_motion(
        model: &RobotModel,
        spheres: &BodySpheres,
        a: &Configuration,
        b: &Configuration,
        eps: f64,
        segment_cap: usize,
    ) -> Result<Self> {
        Self::build(model, spheres, &discretize_edge(a, b, eps)?, segment_cap)
    }

    pub fn splines(&self) -> impl Iterator<Item = &Spline> {
        self.under.iter().flatten().flatten()
    }

    /// Union of the body boxes' axis-aligned bounds.
    pub fn over_aabb(&self) -> Aabb {
        self.over.iter().fold(Aabb::EMPTY, |acc, o| acc.union(&aabb_of_obb(o)))
    }

    /// Largest number of pieces any sphere's spline was split into.
    pub fn max_pieces(&self) -> usize {
        self.under.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }
}
